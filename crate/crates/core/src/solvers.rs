//! Solvers for `AX + f(X)B = C` and `AXD + E f(X) B = C`.
//!
//! Every path ends by recomputing the relative residual of the original
//! equation; a candidate that fails it is an error, never a result.

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{sigma_extremes, Lu, Matrix, PIVOT_TOL};
use crate::operator::{Algebra, OperatorKind, StructuredOperator};
use crate::pencil::{laurent_coefficients, relative_charpoly, resolvent_shift, t_sequence, LaurentExpansion, RelCharPoly};
use crate::solvability::{check_condition, check_generalized, kron_nonsingular, kron_operator, permutation_solvability, SolvabilityReport, Tolerances};

/// Relative residual a returned solution must meet.
pub const RESIDUAL_GATE: f64 = 1e-8;
/// `sigma_min ≤ CLOSED_FORM_TOL·sigma_max` marks a closed-form matrix singular.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// `A X D + E f(X) B = C`; `D` and `E` default to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Option<Matrix>,
    pub e: Option<Matrix>,
    pub f: StructuredOperator,
}

impl Problem {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, f: StructuredOperator) -> Result<Self> {
        Self::generalized(a, b, c, None, None, f)
    }

    pub fn generalized(
        a: Matrix,
        b: Matrix,
        c: Matrix,
        d: Option<Matrix>,
        e: Option<Matrix>,
        f: StructuredOperator,
    ) -> Result<Self> {
        let m = a.rows();
        let all = [Some(&a), Some(&b), Some(&c), d.as_ref(), e.as_ref()];
        if m == 0 || all.iter().flatten().any(|x| !x.is_square() || x.rows() != m) {
            return Err(dim_err("A, B, C (and D, E) must be nonempty square matrices of one size"));
        }
        f.check_size(m)?;
        Ok(Self { a, b, c, d, e, f })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn d(&self) -> Matrix {
        self.d.clone().unwrap_or_else(|| Matrix::identity(self.dim()))
    }

    pub fn e(&self) -> Matrix {
        self.e.clone().unwrap_or_else(|| Matrix::identity(self.dim()))
    }

    /// `D` or `E` present and different from the identity.
    pub fn is_generalized(&self) -> bool {
        let eye = Matrix::identity(self.dim());
        [&self.d, &self.e].iter().any(|x| x.as_ref().is_some_and(|x| *x != eye))
    }

    /// Same equation with a different right-hand side.
    pub fn with_rhs(&self, c: Matrix) -> Result<Self> {
        Self::generalized(self.a.clone(), self.b.clone(), c, self.d.clone(), self.e.clone(), self.f.clone())
    }
}

/// `‖AXD + E f(X) B − C‖ / (‖A‖‖X‖‖D‖ + ‖E‖‖X‖‖B‖ + ‖C‖ + 1)`, Frobenius norms.
pub fn equation_residual(p: &Problem, x: &Matrix) -> Result<f64> {
    if !x.is_square() || x.rows() != p.dim() {
        return Err(dim_err("candidate solution has the wrong size"));
    }
    let (d, e) = (p.d(), p.e());
    let fx = p.f.apply(x)?;
    let lhs = &(&(&p.a * x) * &d) + &(&(&e * &fx) * &p.b);
    let nx = x.norm_fro();
    let denom = p.a.norm_fro() * nx * d.norm_fro() + e.norm_fro() * nx * p.b.norm_fro() + p.c.norm_fro() + 1.0;
    Ok((&lhs - &p.c).norm_fro() / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Kron,
    Reduction,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodUsed {
    Kron,
    Reduction,
    ClosedFormPreserving,
    ClosedFormReversing,
}

/// Which characteristic polynomial the preserving closed form is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormVariant {
    /// `X = (Σ pᵢ Wᵢ)·ch_𝒜(ℬ)⁻¹`
    ChA,
    /// `X = −ch_ℬ(𝒜)⁻¹·Σ qᵢ Wᵢ`
    ChB,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    #[serde(rename = "X")]
    pub x: Matrix,
    pub method: MethodUsed,
    pub residual: f64,
    /// Smallest singular value of the matrix the path inverted (realified
    /// for conjugating operators on the Kronecker path).
    pub sigma_min: f64,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solvability: Option<SolvabilityReport>,
}

fn finish(p: &Problem, x: Matrix, method: MethodUsed, sigma_min: f64, warnings: Vec<String>) -> Result<SolveReport> {
    let residual = equation_residual(p, &x)?;
    if residual.is_nan() || residual > RESIDUAL_GATE {
        return Err(Error::ResidualCheckFailed { residual });
    }
    Ok(SolveReport { x, method, residual, sigma_min, warnings, solvability: None })
}

fn require_period_two(p: &Problem, method: &'static str) -> Result<()> {
    if p.f.is_period_two() {
        Ok(())
    } else {
        Err(Error::MethodNotApplicable { method, reason: format!("{} is not an involution", p.f) })
    }
}

fn require_plain(p: &Problem, method: &'static str) -> Result<()> {
    if p.is_generalized() {
        return Err(Error::MethodNotApplicable { method, reason: "D or E differs from the identity".into() });
    }
    require_period_two(p, method)
}

fn require_algebra(p: &Problem, want: Algebra) -> Result<()> {
    let found = p.f.algebra();
    if found != want {
        return Err(Error::WrongOperatorClass { expected: want.name(), found: found.name() });
    }
    Ok(())
}

/// Vectorized solve; works for every operator and for `D, E ≠ I`.
pub fn solve_kron(p: &Problem) -> Result<SolveReport> {
    let (d, e) = (p.d(), p.e());
    let (ok, sigma_min) = kron_nonsingular(&p.a, &p.b, &d, &e, &p.f)?;
    if !ok {
        return Err(Error::NotUniquelySolvable { sigma_min });
    }
    let map = kron_operator(&p.a, &p.b, &d, &e, &p.f)?;
    let v = map.solve(&p.c.vec()).map_err(|_| Error::NotUniquelySolvable { sigma_min })?;
    let m = p.dim();
    finish(p, Matrix::from_vec(m, m, &v), MethodUsed::Kron, sigma_min, Vec::new())
}

/// Solves `K·vec(X) = vec(rhs)` for a complex `K`, reporting `sigma_min(K)`.
fn solve_vectorized(k: &Matrix, rhs: &Matrix) -> Result<(Matrix, f64)> {
    let (lo, hi) = sigma_extremes(k)?;
    let lu = Lu::factor(k);
    if hi == 0.0 || lo <= crate::solvability::KRON_TOL * hi || lu.min_pivot() < PIVOT_TOL * k.norm_max() {
        return Err(Error::NotUniquelySolvable { sigma_min: lo });
    }
    let m = rhs.rows();
    Ok((Matrix::from_vec(m, m, &lu.solve_vec(&rhs.vec())), lo))
}

/// `𝒜 = f(A)A`, `ℬ = f(B)B`, `𝒞 = f(C)B − f(A)C`, so that every solution of
/// the original equation solves `Xℬ − 𝒜X = 𝒞`.
fn preserving_data(p: &Problem) -> Result<(Matrix, Matrix, Matrix)> {
    let (fa, fb, fc) = (p.f.apply(&p.a)?, p.f.apply(&p.b)?, p.f.apply(&p.c)?);
    let cal_a = &fa * &p.a;
    let cal_b = &fb * &p.b;
    let cal_c = &(&fc * &p.b) - &(&fa * &p.c);
    Ok((cal_a, cal_b, cal_c))
}

/// Solves the Sylvester equation `Xℬ − 𝒜X = 𝒞` derived for preserving `f`,
/// then checks the candidate against the original equation.
pub fn reduce_preserving(p: &Problem) -> Result<SolveReport> {
    require_plain(p, "reduction")?;
    require_algebra(p, Algebra::Preserving)?;
    let (cal_a, cal_b, cal_c) = preserving_data(p)?;
    let eye = Matrix::identity(p.dim());
    let k = &cal_b.transpose().kron(&eye) - &eye.kron(&cal_a);
    let (x, smin) = solve_vectorized(&k, &cal_c)?;
    finish(p, x, MethodUsed::Reduction, smin, Vec::new())
}

/// With `Z = (B + γf(A))⁻¹` the swap identity `B Z f(A) = f(A) Z B` turns the
/// equation into `A X (Z f(A)) − f(B) X (Z B) = C Z f(A) − f(C) Z B`.
pub fn reduce_reversing(p: &Problem) -> Result<SolveReport> {
    require_plain(p, "reduction")?;
    require_algebra(p, Algebra::Reversing)?;
    let (fa, fb, fc) = (p.f.apply(&p.a)?, p.f.apply(&p.b)?, p.f.apply(&p.c)?);
    let (gamma, z) = resolvent_shift(&p.b, &fa)?;
    let right1 = &z * &fa;
    let right2 = &z * &p.b;
    let rhs = &(&p.c * &right1) - &(&fc * &right2);
    let k = &right1.transpose().kron(&p.a) - &right2.transpose().kron(&fb);
    let (x, smin) = solve_vectorized(&k, &rhs)?;
    let mut report = finish(p, x, MethodUsed::Reduction, smin, Vec::new())?;
    if gamma.norm() != 0.0 {
        report.warnings.push(format!("resolvent shift γ = {gamma}"));
    }
    Ok(report)
}

/// `Σ cᵢ Mⁱ` by Horner's rule.
pub fn matrix_polynomial(coeffs: &[crate::Complex64], m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = &(&acc * m) + &Matrix::identity(n).scale(c);
    }
    acc
}

/// Coefficients of `det(λI − M)`, ascending.
pub fn charpoly(m: &Matrix) -> Result<Vec<crate::Complex64>> {
    let n = m.rows();
    let rel = relative_charpoly(m, &Matrix::identity(n))?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(rel.coeffs.into_iter().map(|c| c * sign).collect())
}

/// `Wᵢ = Σ_{k=0}^{i−1} 𝒜ᵏ 𝒞 ℬ^{i−1−k}` for `i = 0..=m` (`W₀ = 0`).
fn telescoped(cal_a: &Matrix, cal_b: &Matrix, cal_c: &Matrix) -> Vec<Matrix> {
    let m = cal_a.rows();
    let mut w = vec![Matrix::zeros(m, m)];
    // W_{i+1} = 𝒜·W_i + 𝒞·ℬ^i
    let mut b_pow = Matrix::identity(m);
    for _ in 0..m {
        let next = &(cal_a * w.last().expect("nonempty")) + &(cal_c * &b_pow);
        w.push(next);
        b_pow = &b_pow * cal_b;
    }
    w
}

fn invert_closed_form(m: &Matrix) -> Result<(Matrix, f64)> {
    let (lo, hi) = sigma_extremes(m)?;
    if hi == 0.0 || lo <= CLOSED_FORM_TOL * hi {
        return Err(Error::SingularClosedFormMatrix { sigma_min: lo });
    }
    Ok((m.inverse().map_err(|_| Error::SingularClosedFormMatrix { sigma_min: lo })?, lo))
}

/// Intermediate quantities of the preserving closed form.
#[derive(Clone, Debug)]
pub struct PreservingTrace {
    pub cal_a: Matrix,
    pub cal_b: Matrix,
    pub cal_c: Matrix,
    /// Characteristic polynomial used (of `𝒜` for `ChA`, of `ℬ` for `ChB`).
    pub poly: Vec<crate::Complex64>,
    /// `ch_𝒜(ℬ)` or `ch_ℬ(𝒜)`.
    pub closed_matrix: Matrix,
    pub x: Matrix,
}

pub fn closed_form_preserving_trace(p: &Problem, variant: ClosedFormVariant) -> Result<PreservingTrace> {
    require_plain(p, "closed form")?;
    require_algebra(p, Algebra::Preserving)?;
    let (cal_a, cal_b, cal_c) = preserving_data(p)?;
    let w = telescoped(&cal_a, &cal_b, &cal_c);
    let (poly, closed, x) = match variant {
        ClosedFormVariant::ChA => {
            let poly = charpoly(&cal_a)?;
            let closed = matrix_polynomial(&poly, &cal_b);
            let sum = weighted(&poly, &w);
            let (inv, _) = invert_closed_form(&closed)?;
            let x = &sum * &inv;
            (poly, closed, x)
        }
        ClosedFormVariant::ChB => {
            let poly = charpoly(&cal_b)?;
            let closed = matrix_polynomial(&poly, &cal_a);
            let sum = weighted(&poly, &w);
            let (inv, _) = invert_closed_form(&closed)?;
            let x = -&(&inv * &sum);
            (poly, closed, x)
        }
    };
    Ok(PreservingTrace { cal_a, cal_b, cal_c, poly, closed_matrix: closed, x })
}

fn weighted(poly: &[crate::Complex64], w: &[Matrix]) -> Matrix {
    let m = w[0].rows();
    poly.iter().zip(w).fold(Matrix::zeros(m, m), |acc, (&c, wi)| &acc + &wi.scale(c))
}

/// Closed form for preserving `f` via the Cayley–Hamilton theorem.
pub fn closed_form_preserving(p: &Problem, variant: ClosedFormVariant) -> Result<SolveReport> {
    let t = closed_form_preserving_trace(p, variant)?;
    let (lo, _) = sigma_extremes(&t.closed_matrix)?;
    finish(p, t.x, MethodUsed::ClosedFormPreserving, lo, Vec::new())
}

/// Intermediate quantities of the reversing closed form.
#[derive(Clone, Debug)]
pub struct ReversingTrace {
    /// Expansion of `(A' − λf(B'))⁻¹`.
    pub u: LaurentExpansion,
    /// Expansion of `(B' − λf(A'))⁻¹`.
    pub v: LaurentExpansion,
    /// `det(B' − λf(A'))`.
    pub p: RelCharPoly,
    pub t: Vec<Matrix>,
    /// `Σ pⱼ Uⱼ`
    pub m: Matrix,
    /// `‖Σ pⱼ Vⱼ‖` relative to `‖p‖·max‖Vⱼ‖`; vanishes in exact arithmetic.
    pub side_condition: f64,
    /// `true` when the data were swapped to `(f(B), f(A), f(C))`.
    pub swapped: bool,
    pub x: Matrix,
}

fn rcond(m: &Matrix) -> Result<f64> {
    let (lo, hi) = sigma_extremes(m)?;
    Ok(if hi == 0.0 { 0.0 } else { lo / hi })
}

/// Closed form for reversing `f` from Laurent coefficients.
///
/// Matching powers of `λ` gives `X Vⱼ + Uⱼ f(X) = Tⱼ`. Weighting with the
/// coefficients `pⱼ` of `det(B − λf(A))` kills the `V` terms, leaving
/// `(Σ pⱼUⱼ)·f(X) = Σ pⱼTⱼ`. The weighted sum is invertible when `B` is, so
/// for singular `B` the equivalent equation `f(B)X + f(X)f(A) = f(C)` is used.
pub fn closed_form_reversing_trace(p: &Problem) -> Result<ReversingTrace> {
    require_plain(p, "closed form")?;
    require_algebra(p, Algebra::Reversing)?;
    let (ra, rb) = (rcond(&p.a)?, rcond(&p.b)?);
    if ra.max(rb) <= CLOSED_FORM_TOL {
        return Err(Error::MethodNotApplicable {
            method: "closed form",
            reason: "both A and B are singular".into(),
        });
    }
    let swapped = ra > rb;
    let f = &p.f;
    let (a, b, c) = if swapped {
        (f.apply(&p.b)?, f.apply(&p.a)?, f.apply(&p.c)?)
    } else {
        (p.a.clone(), p.b.clone(), p.c.clone())
    };
    let m = p.dim();
    let (fa, fb) = (f.apply(&a)?, f.apply(&b)?);
    let kmax = 2 * m + 1;
    let u = laurent_coefficients(&a, &fb, kmax)?;
    let v = laurent_coefficients(&b, &fa, kmax)?;
    let poly = relative_charpoly(&b, &fa)?;
    let t = t_sequence(&u, &v, &c, f, m)?;

    let mut msum = Matrix::zeros(m, m);
    let mut tsum = Matrix::zeros(m, m);
    let mut vsum = Matrix::zeros(m, m);
    let mut vscale: f64 = 0.0;
    for (j, &pj) in poly.coeffs.iter().enumerate() {
        let uj = u.get(j as i64)?;
        let vj = v.get(j as i64)?;
        msum = &msum + &uj.scale(pj);
        tsum = &tsum + &t[j].scale(pj);
        vsum = &vsum + &vj.scale(pj);
        vscale = vscale.max(vj.norm_fro());
    }
    let pnorm = poly.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let side_condition = if pnorm * vscale == 0.0 { vsum.norm_fro() } else { vsum.norm_fro() / (pnorm * vscale) };
    let (minv, _) = invert_closed_form(&msum)?;
    let fx = &minv * &tsum;
    let x = f.apply(&fx)?;
    Ok(ReversingTrace { u, v, p: poly, t, m: msum, side_condition, swapped, x })
}

/// Side-condition level above which the reversing closed form warns.
const SIDE_CONDITION_WARN: f64 = 1e-8;

pub fn closed_form_reversing(p: &Problem) -> Result<SolveReport> {
    let t = match closed_form_reversing_trace(p) {
        Ok(t) => t,
        Err(Error::MethodNotApplicable { reason, .. }) if !p.is_generalized() && p.f.is_period_two() => {
            let mut r = solve_kron(p)?;
            r.warnings.push(format!("closed form not applicable ({reason}); solved by kron"));
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let mut warnings = Vec::new();
    if t.swapped {
        warnings.push("B is the worse-conditioned coefficient; used f(B)X + f(X)f(A) = f(C)".into());
    }
    if t.side_condition > SIDE_CONDITION_WARN {
        warnings.push(format!("Cayley-Hamilton side condition only {:.2e}", t.side_condition));
    }
    let (lo, _) = sigma_extremes(&t.m)?;
    finish(p, t.x, MethodUsed::ClosedFormReversing, lo, warnings)
}

/// The solvability report matching the problem's shape.
pub fn analyze(p: &Problem, tol: &Tolerances) -> Result<SolvabilityReport> {
    let m = p.dim();
    if p.is_generalized() {
        return check_generalized(&p.a, &p.d(), &p.e(), &p.b, &p.f, tol);
    }
    match (p.f.kind(), p.f.perm()) {
        (k @ (OperatorKind::PermSimilarity | OperatorKind::PermReversing), Some(perm)) if !p.f.is_period_two() => {
            debug_assert_eq!(perm.len(), m);
            permutation_solvability(&p.a, &p.b, perm, k, tol)
        }
        _ => check_condition(&p.a, &p.b, &p.f, tol),
    }
}

/// Dispatcher. `Auto` uses the reduction when the sufficient condition holds
/// and falls back to the Kronecker solve otherwise.
pub fn solve(p: &Problem, method: Method, tol: &Tolerances) -> Result<SolveReport> {
    let (report, note) = match analyze(p, tol) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(format!("solvability analysis failed: {e}"))),
    };
    let mut out = match method {
        Method::Kron => solve_kron(p),
        Method::Reduction => match p.f.algebra() {
            Algebra::Preserving => reduce_preserving(p),
            Algebra::Reversing => reduce_reversing(p),
        },
        Method::ClosedForm => match p.f.algebra() {
            Algebra::Preserving => closed_form_preserving(p, ClosedFormVariant::ChA),
            Algebra::Reversing => closed_form_reversing(p),
        },
        Method::Auto => {
            let holds = report.as_ref().is_some_and(|r| r.holds);
            if !p.is_generalized() && p.f.is_period_two() && holds {
                let reduced = match p.f.algebra() {
                    Algebra::Preserving => reduce_preserving(p),
                    Algebra::Reversing => reduce_reversing(p),
                };
                reduced.or_else(|e| {
                    let mut r = solve_kron(p)?;
                    r.warnings.push(format!("reduction failed ({e}); solved by kron"));
                    Ok(r)
                })
            } else {
                solve_kron(p)
            }
        }
    }?;
    out.warnings.extend(note);
    out.solvability = report;
    Ok(out)
}
