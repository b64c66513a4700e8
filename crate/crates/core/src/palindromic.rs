//! `f`-palindromic quadratic eigenvalue problems `λ²A₂ + λA₁ + A₀`,
//! `A₀ = f(A₂)`, `f(A₁) = A₁`, and the Riccati equation
//! `R(X) = X A f(X) + X B + C f(X) + D = 0` obtained from the block
//! linearization `λF(Z) + Z`.
//!
//! Eigenvalues come in `s`-reciprocal pairs `(λ, 1/s(λ))`. A Riccati root
//! `X` splits them: with `P = A f(X) + B` and `Q = X A + C`, half of the
//! spectrum solves `det(Q − νf(P)) = 0` and the other half `det(P − νf(Q)) = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{c64, null_vector, Matrix};
use crate::operator::{Algebra, ScalarMap, StructuredOperator};
use crate::pencil::{pencil_spectrum, HomogeneousEig};
use crate::solvers::{solve_kron, Problem};

/// Relative tolerance for `f(A₁) = A₁`.
pub const PALINDROMIC_TOL: f64 = 1e-12;
/// Relative Riccati residual accepted before extracting eigenvalues.
pub const EXTRACTION_GATE: f64 = 1e-8;
/// Chordal tolerance of [`check_pairing`].
pub const PAIRING_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PalindromicQEP {
    pub a2: Matrix,
    pub a1: Matrix,
    pub a0: Matrix,
    pub f: StructuredOperator,
}

impl PalindromicQEP {
    pub fn dim(&self) -> usize {
        self.a2.rows()
    }

    /// `Q(λ) = λ²A₂ + λA₁ + A₀`
    pub fn eval(&self, lambda: Complex64) -> Matrix {
        &(&self.a2.scale(lambda * lambda) + &self.a1.scale(lambda)) + &self.a0
    }
}

/// `{A₂, A₁, f(A₂)}` after checking `f(A₁) = A₁`.
pub fn make_qep(a2: Matrix, a1: Matrix, f: StructuredOperator) -> Result<PalindromicQEP> {
    let m = a2.rows();
    if m == 0 || !a2.is_square() || !a1.is_square() || a1.rows() != m {
        return Err(crate::error::dim_err("A2 and A1 must be nonempty square matrices of one size"));
    }
    if f.algebra() != Algebra::Reversing {
        return Err(Error::WrongOperatorClass { expected: "reversing", found: "preserving" });
    }
    let deviation = (&f.apply(&a1)? - &a1).norm_fro();
    if deviation > PALINDROMIC_TOL * a1.norm_fro().max(1.0) {
        return Err(Error::NotPalindromic { deviation });
    }
    let a0 = f.apply(&a2)?;
    Ok(PalindromicQEP { a2, a1, a0, f })
}

/// `F(M) = [[f(M₁), f(M₃)], [f(M₂), f(M₄)]]` on the 2×2 block partition.
pub fn big_f(f: &StructuredOperator, m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(crate::error::dim_err("F needs a square matrix"));
    }
    let n = m.rows();
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    let h = n / 2;
    let blk = |r: usize, c: usize| f.apply(&m.block(r * h, c * h, h, h));
    Ok(Matrix::from_blocks(&blk(0, 0)?, &blk(1, 0)?, &blk(0, 1)?, &blk(1, 1)?))
}

/// Blocks of `Z = [[A₀, −A₁−A₂], [A₀, A₀]]` renamed `[[A, B], [C, D]]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiccatiBlocks {
    #[serde(rename = "A")]
    pub a: Matrix,
    #[serde(rename = "B")]
    pub b: Matrix,
    #[serde(rename = "C")]
    pub c: Matrix,
    #[serde(rename = "D")]
    pub d: Matrix,
}

impl RiccatiBlocks {
    pub fn z(&self) -> Matrix {
        Matrix::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `1 + ‖A‖‖X‖² + (‖B‖ + ‖C‖)‖X‖ + ‖D‖`, the size of the terms of `R(X)`.
    pub fn residual_scale(&self, x: &Matrix) -> f64 {
        let nx = x.norm_fro();
        1.0 + self.a.norm_fro() * nx * nx + (self.b.norm_fro() + self.c.norm_fro()) * nx + self.d.norm_fro()
    }
}

pub fn build_z(q: &PalindromicQEP) -> RiccatiBlocks {
    RiccatiBlocks {
        a: q.a0.clone(),
        b: -&(&q.a1 + &q.a2),
        c: q.a0.clone(),
        d: q.a0.clone(),
    }
}

/// `R(X) = X A f(X) + X B + C f(X) + D`
pub fn riccati_residual(x: &Matrix, blocks: &RiccatiBlocks, f: &StructuredOperator) -> Result<Matrix> {
    if !x.is_square() || x.rows() != blocks.dim() {
        return Err(crate::error::dim_err("X does not match the Riccati blocks"));
    }
    let fx = f.apply(x)?;
    let xa = x * &blocks.a;
    Ok(&(&(&(&xa * &fx) + &(x * &blocks.b)) + &(&blocks.c * &fx)) + &blocks.d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NewtonStep {
    pub k: usize,
    /// `‖R(X_k)‖_F`
    pub residual: f64,
    /// `‖X_k − X_{k−1}‖_F` (zero for the initial guess).
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonTrace {
    pub iterates: Vec<NewtonStep>,
    pub converged: bool,
    #[serde(rename = "X")]
    pub x: Matrix,
}

impl NewtonTrace {
    pub fn final_residual(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |s| s.residual)
    }

    /// Newton steps actually taken.
    pub fn steps(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }
}

/// Newton's method on `R(X) = 0`. Each step solves the Sylvester-like
/// equation `Δ(A f(X_k) + B) + (X_k A + C) f(Δ) = −R(X_k)`; iteration stops
/// once `‖R(X_k)‖ ≤ tol·scale` (see [`RiccatiBlocks::residual_scale`]).
pub fn newton_riccati(
    blocks: &RiccatiBlocks,
    f: &StructuredOperator,
    x0: &Matrix,
    tol: f64,
    maxit: usize,
) -> Result<NewtonTrace> {
    let m = blocks.dim();
    let eye = Matrix::identity(m);
    let mut x = x0.clone();
    let mut trace = NewtonTrace { iterates: Vec::new(), converged: false, x: x.clone() };
    let mut step = 0.0;
    for k in 0..=maxit {
        let r = riccati_residual(&x, blocks, f)?;
        let rn = r.norm_fro();
        trace.iterates.push(NewtonStep { k, residual: rn, step });
        trace.x = x.clone();
        if rn <= tol * blocks.residual_scale(&x) {
            trace.converged = true;
            return Ok(trace);
        }
        if k == maxit || !rn.is_finite() {
            break;
        }
        let fx = f.apply(&x)?;
        let p = &(&blocks.a * &fx) + &blocks.b;
        let q = &(&x * &blocks.a) + &blocks.c;
        let problem = Problem::generalized(eye.clone(), eye.clone(), -&r, Some(p), Some(q), f.clone())?;
        let delta = match solve_kron(&problem) {
            Ok(rep) => rep.x,
            Err(Error::NotUniquelySolvable { sigma_min }) => {
                return Err(Error::NewtonStepSingular { iteration: k + 1, sigma_min })
            }
            Err(e) => return Err(e),
        };
        step = delta.norm_fro();
        x = &x + &delta;
    }
    Err(Error::NotConverged(Box::new(trace)))
}

/// The two halves of the QEP spectrum a Riccati root separates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QepEigs {
    /// Roots of `det((XA + C) − ν f(A f(X) + B))`.
    pub first: Vec<HomogeneousEig>,
    /// Roots of `det((A f(X) + B) − ν f(XA + C))`.
    pub second: Vec<HomogeneousEig>,
}

impl QepEigs {
    pub fn all(&self) -> Vec<HomogeneousEig> {
        self.first.iter().chain(&self.second).copied().collect()
    }
}

/// QEP eigenvalues from a Riccati root.
pub fn qep_eigs_from_riccati(blocks: &RiccatiBlocks, x: &Matrix, f: &StructuredOperator) -> Result<QepEigs> {
    let r = riccati_residual(x, blocks, f)?;
    let residual = r.norm_fro() / blocks.residual_scale(x);
    if residual.is_nan() || residual > EXTRACTION_GATE {
        return Err(Error::ResidualTooLarge { residual });
    }
    let fx = f.apply(x)?;
    let p = &(&blocks.a * &fx) + &blocks.b;
    let q = &(x * &blocks.a) + &blocks.c;
    let first = pencil_spectrum(&q, &f.apply(&p)?)?;
    let second = pencil_spectrum(&p, &f.apply(&q)?)?;
    if !first.regular || !second.regular {
        return Err(Error::SingularPencil("Riccati root gives a singular half pencil".into()));
    }
    Ok(QepEigs { first: first.pairs, second: second.pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub pairs: Vec<(HomogeneousEig, HomogeneousEig)>,
    pub unmatched: Vec<HomogeneousEig>,
    pub ok: bool,
}

/// Greedy matching into pairs `(λ, 1/s(λ))` within [`PAIRING_TOL`].
pub fn check_pairing(eigs: &[HomogeneousEig], s: ScalarMap) -> PairingReport {
    let n = eigs.len();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let target = eigs[i].map(s).reciprocal();
        let best = (0..n)
            .filter(|&j| j != i && !used[j])
            .map(|j| (j, eigs[j].chordal(&target)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, d)) = best {
            if d <= PAIRING_TOL {
                used[i] = true;
                used[j] = true;
                pairs.push((eigs[i], eigs[j]));
            }
        }
    }
    let unmatched: Vec<_> = (0..n).filter(|&i| !used[i]).map(|i| eigs[i]).collect();
    PairingReport { ok: unmatched.is_empty(), pairs, unmatched }
}

/// `(|det Q(λ)|, |det(s(λ)²A₀ + s(λ)A₁ + A₂)|)`; equal for palindromic `Q`.
pub fn determinant_pair(q: &PalindromicQEP, lambda: Complex64) -> Result<(f64, f64)> {
    let s = q.f.scalar_map(lambda);
    let lhs = crate::matrix::determinant(&q.eval(lambda))?.norm();
    let flipped = &(&q.a0.scale(s * s) + &q.a1.scale(s)) + &q.a2;
    let rhs = crate::matrix::determinant(&flipped)?.norm();
    Ok((lhs, rhs))
}

/// Eigenpairs `(ν, x)` of the QEP, `Q(ν)x = 0`, from the companion pencil
/// `[[0, I], [−A₀, −A₁]] − ν[[I, 0], [0, A₂]]`. Infinite eigenvalues are skipped.
pub fn qep_eigenpairs(q: &PalindromicQEP) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let m = q.dim();
    let zero = Matrix::zeros(m, m);
    let eye = Matrix::identity(m);
    let l0 = Matrix::from_blocks(&zero, &eye, &-&q.a0, &-&q.a1);
    let l1 = Matrix::from_blocks(&eye, &zero, &zero, &q.a2);
    let spectrum = pencil_spectrum(&l0, &l1)?;
    if !spectrum.regular {
        return Err(Error::SingularPencil("quadratic matrix polynomial is singular".into()));
    }
    spectrum.finite()
        .into_iter()
        .map(|nu| Ok((nu, null_vector(&q.eval(nu))?)))
        .collect()
}

/// Riccati root whose `f(X)` has the eigenpairs `(−1/ν, x)` for the `m`
/// chosen QEP eigenpairs: `f(X) = −W diag(1/ν) W⁻¹`. Choosing one member of
/// every reciprocal pair gives `R(X) = 0`.
pub fn riccati_root_from_eigenpairs(f: &StructuredOperator, chosen: &[(Complex64, Vec<Complex64>)]) -> Result<Matrix> {
    let m = chosen.len();
    if m == 0 || chosen.iter().any(|(_, v)| v.len() != m) {
        return Err(crate::error::dim_err("need m eigenvectors of length m"));
    }
    let w = Matrix::from_fn(m, m, |i, j| chosen[j].1[i]);
    let inv_nu: Vec<Complex64> = chosen.iter().map(|(nu, _)| -c64(1.0, 0.0) / nu).collect();
    let fx = &(&w * &Matrix::diag(&inv_nu)) * &w.inverse()?;
    f.apply(&fx)
}
