//! Unique-solvability tests for `AXD + E·f(X)·B = C`.
//!
//! The spectral conditions are sufficient; [`kron_nonsingular`] is the ground
//! truth every report carries alongside them.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, eigenvalues, Matrix};
use crate::operator::{compose_with_operator, commutation_matrix, Algebra, LinearMap, OperatorKind, Permutation, ScalarMap, StructuredOperator};
use crate::pencil::{pencil_spectrum, resolvent_shift, HomogeneousEig, PencilSpectrum};

/// Relative singular-value threshold of the Kronecker ground truth.
pub const KRON_TOL: f64 = 1e-10;
/// Eigenvalues of one spectrum closer than this (chordally) are treated as
/// one multiple eigenvalue and replaced by their centroid.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Chordal distance below which two eigenvalues coincide.
    pub chordal: f64,
    /// `‖XY − YX‖ ≤ commute·‖X‖‖Y‖` counts as commuting.
    pub commute: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { chordal: 1e-8, commute: 1e-10 }
    }
}

impl Tolerances {
    pub fn with_chordal(chordal: f64) -> Self {
        Self { chordal, ..Self::default() }
    }
}

/// Two eigenvalues that violate a condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Offending {
    pub left: HomogeneousEig,
    pub right: HomogeneousEig,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub condition_name: String,
    /// The sufficient (or, for the permutation family, exact) condition holds.
    pub holds: bool,
    /// Smallest chordal gap the condition depends on.
    pub margin: f64,
    pub kron_nonsingular: bool,
    pub sigma_min: f64,
    /// Margin within a factor 10 of the tolerance.
    pub marginal: bool,
    pub details: Vec<Offending>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolvabilityReport {
    fn new(name: impl Into<String>, gap: Gap, kron: (bool, f64), tol: f64) -> Self {
        let holds = gap.offending.is_empty() && gap.notes.is_empty() && gap.margin > tol;
        Self {
            condition_name: name.into(),
            holds,
            margin: gap.margin,
            kron_nonsingular: kron.0,
            sigma_min: kron.1,
            marginal: gap.margin >= tol / 10.0 && gap.margin <= tol * 10.0,
            details: gap.offending,
            notes: gap.notes,
        }
    }
}

/// Outcome of comparing spectra: the smallest gap, the pairs below the
/// tolerance, and reasons the comparison could not be made.
#[derive(Clone, Debug, Default)]
struct Gap {
    margin: f64,
    offending: Vec<Offending>,
    notes: Vec<String>,
}

impl Gap {
    fn failed(note: String) -> Self {
        Gap { margin: 0.0, offending: Vec::new(), notes: vec![note] }
    }

    fn merge(mut self, other: Gap) -> Gap {
        self.margin = self.margin.min(other.margin);
        self.offending.extend(other.offending);
        self.notes.extend(other.notes);
        self
    }
}

fn same_size(mats: &[&Matrix]) -> Result<usize> {
    let m = mats[0].rows();
    if m == 0 || mats.iter().any(|x| !x.is_square() || x.rows() != m) {
        return Err(dim_err("coefficients must be nonempty square matrices of one size"));
    }
    Ok(m)
}

fn period_two(f: &StructuredOperator, m: usize) -> Result<()> {
    f.check_size(m)?;
    if f.is_period_two() {
        Ok(())
    } else {
        Err(Error::MethodNotApplicable {
            method: "spectral condition",
            reason: format!("{f} is not an involution"),
        })
    }
}

/// The vectorized map `vec(X) ↦ vec(AXD + E f(X) B) = (Dᵀ⊗A + (Bᵀ⊗E)K_f) vec(X)`.
pub fn kron_operator(a: &Matrix, b: &Matrix, d: &Matrix, e: &Matrix, f: &StructuredOperator) -> Result<LinearMap> {
    let m = same_size(&[a, b, d, e])?;
    f.check_size(m)?;
    let left = LinearMap::Complex(d.transpose().kron(a));
    let right = compose_with_operator(&b.transpose().kron(e), f, m);
    Ok(left.plus(&right))
}

/// `(sigma_min > 1e-10·scale, sigma_min)` for the Kronecker map, where `scale`
/// is the larger of `sigma_max` and the norms `‖A‖‖D‖`, `‖B‖‖E‖` of the two
/// terms. The term norms catch cancellation that `sigma_max` alone cannot
/// see (for `m = 1` the map is a single number).
pub fn kron_nonsingular(a: &Matrix, b: &Matrix, d: &Matrix, e: &Matrix, f: &StructuredOperator) -> Result<(bool, f64)> {
    let map = kron_operator(a, b, d, e, f)?;
    let (lo, hi) = map.sigma_extremes()?;
    let terms = (a.norm_fro() * d.norm_fro()).max(b.norm_fro() * e.norm_fro());
    let scale = hi.max(terms);
    Ok((scale > 0.0 && lo > KRON_TOL * scale, lo))
}

/// Replaces each chordal cluster of eigenvalues by its centroid. Computed
/// eigenvalues of a Jordan block scatter by `ε^(1/k)` while their mean stays
/// accurate.
pub fn refine_clusters(pairs: &[HomogeneousEig]) -> Vec<HomogeneousEig> {
    let n = pairs.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if pairs[i].chordal(&pairs[j]) <= CLUSTER_TOL {
                let (gi, gj) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == gi {
                        *g = gj;
                    }
                }
            }
        }
    }
    let mut out = pairs.to_vec();
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == g).collect();
        if members.len() < 2 {
            continue;
        }
        let centre = if members.iter().any(|&i| pairs[i].is_infinite()) {
            HomogeneousEig::infinite()
        } else {
            let sum: Complex64 = members.iter().map(|&i| pairs[i].value().expect("finite")).sum();
            HomogeneousEig::finite(sum / members.len() as f64)
        };
        for i in members {
            out[i] = centre;
        }
    }
    out
}

fn finite_pairs(values: Vec<Complex64>) -> Vec<HomogeneousEig> {
    refine_clusters(&values.into_iter().map(HomogeneousEig::finite).collect::<Vec<_>>())
}

/// Every cross pair of `s1 × s2`; pairs within `tol` are offending.
fn disjointness(s1: &[HomogeneousEig], s2: &[HomogeneousEig], tol: f64) -> Gap {
    let mut gap = Gap { margin: f64::INFINITY, ..Gap::default() };
    for x in s1 {
        for y in s2 {
            let d = x.chordal(y);
            gap.margin = gap.margin.min(d);
            if d <= tol {
                gap.offending.push(Offending { left: *x, right: *y, distance: d });
            }
        }
    }
    gap
}

fn regular_spectrum(d: &Matrix, e: &Matrix, label: &str) -> std::result::Result<Vec<HomogeneousEig>, Gap> {
    match pencil_spectrum(d, e) {
        Ok(s) if s.regular => Ok(refine_clusters(&s.pairs)),
        Ok(_) => Err(Gap::failed(format!("pencil {label} is singular"))),
        Err(err) => Err(Gap::failed(format!("pencil {label}: {err}"))),
    }
}

/// Spectra of `f(A)A` and `f(B)B` must be disjoint (multiplication-preserving `f`).
pub fn check_preserving(a: &Matrix, b: &Matrix, f: &StructuredOperator, tol: &Tolerances) -> Result<SolvabilityReport> {
    let m = same_size(&[a, b])?;
    if f.algebra() != Algebra::Preserving {
        return Err(Error::WrongOperatorClass { expected: "preserving", found: "reversing" });
    }
    period_two(f, m)?;
    let s1 = finite_pairs(eigenvalues(&(&f.apply(a)? * a))?);
    let s2 = finite_pairs(eigenvalues(&(&f.apply(b)? * b))?);
    let eye = Matrix::identity(m);
    let kron = kron_nonsingular(a, b, &eye, &eye, f)?;
    Ok(SolvabilityReport::new("sigma(f(A)A) vs sigma(f(B)B)", disjointness(&s1, &s2, tol.chordal), kron, tol.chordal))
}

/// Spectra of the pencils `A − λf(B)` and `B − λf(A)` must be disjoint
/// (multiplication-reversing `f`).
pub fn check_reversing(a: &Matrix, b: &Matrix, f: &StructuredOperator, tol: &Tolerances) -> Result<SolvabilityReport> {
    let m = same_size(&[a, b])?;
    if f.algebra() != Algebra::Reversing {
        return Err(Error::WrongOperatorClass { expected: "reversing", found: "preserving" });
    }
    period_two(f, m)?;
    let (fa, fb) = (f.apply(a)?, f.apply(b)?);
    let gap = match (regular_spectrum(a, &fb, "A - λf(B)"), regular_spectrum(b, &fa, "B - λf(A)")) {
        (Ok(s1), Ok(s2)) => disjointness(&s1, &s2, tol.chordal),
        (Err(g), Ok(_)) | (Ok(_), Err(g)) => g,
        (Err(g1), Err(g2)) => g1.merge(g2),
    };
    let eye = Matrix::identity(m);
    let kron = kron_nonsingular(a, b, &eye, &eye, f)?;
    Ok(SolvabilityReport::new("sigma(A - λf(B)) vs sigma(B - λf(A))", gap, kron, tol.chordal))
}

/// Dispatches to [`check_preserving`] or [`check_reversing`] by operator class.
pub fn check_condition(a: &Matrix, b: &Matrix, f: &StructuredOperator, tol: &Tolerances) -> Result<SolvabilityReport> {
    match f.algebra() {
        Algebra::Preserving => check_preserving(a, b, f, tol),
        Algebra::Reversing => check_reversing(a, b, f, tol),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReciprocalCheck {
    pub free: bool,
    /// Smallest chordal distance between some `s(λᵢ)` and `1/λⱼ`.
    pub margin: f64,
    pub offending: Vec<Offending>,
}

/// No `λᵢ, λⱼ` (including `i = j`) with `s(λᵢ)·λⱼ = 1`; `0` and `∞` are reciprocal.
pub fn reciprocal_free(spectrum: &PencilSpectrum, s: ScalarMap, tol: f64) -> ReciprocalCheck {
    reciprocal_scan(&refine_clusters(&spectrum.pairs), s, tol, true)
}

fn reciprocal_scan(pairs: &[HomogeneousEig], s: ScalarMap, tol: f64, diagonal: bool) -> ReciprocalCheck {
    let mut out = ReciprocalCheck { free: true, margin: f64::INFINITY, offending: Vec::new() };
    for (i, x) in pairs.iter().enumerate() {
        for y in &pairs[if diagonal { i } else { i + 1 }..] {
            let d = x.map(s).chordal(&y.reciprocal());
            out.margin = out.margin.min(d);
            if d <= tol {
                out.free = false;
                out.offending.push(Offending { left: *x, right: *y, distance: d });
            }
        }
    }
    out
}

fn commutes(x: &Matrix, y: &Matrix, tol: f64) -> bool {
    (&(x * y) - &(y * x)).norm_fro() <= tol * x.norm_fro() * y.norm_fro()
}

/// The two pencils whose spectra decide unique solvability of the
/// generalized equation, and whether each could use its reduced form.
fn generalized_pencils(
    a: &Matrix,
    d: &Matrix,
    e: &Matrix,
    b: &Matrix,
    f: &StructuredOperator,
    tol: &Tolerances,
    allow_reduced: bool,
) -> Result<[(Matrix, Matrix, bool); 2]> {
    let (fa, fb, fd, fe) = (f.apply(a)?, f.apply(b)?, f.apply(d)?, f.apply(e)?);
    // first pencil: left factor M1·Z1·A − λ·E·Z1·N1 with Z1 from (E, M1')
    // second: M2·Z2·B − λ·D·Z2·N2 with Z2 from (B, M2')
    let (l1, r1, s1, l2, r2, s2) = match f.algebra() {
        Algebra::Preserving => (&fa, &fe, &fa, &fb, &fd, &fd),
        Algebra::Reversing => (&fd, &fb, &fd, &fe, &fa, &fa),
    };
    let build = |left: &Matrix, lead: &Matrix, shift_with: &Matrix, x: &Matrix, y: &Matrix, right: &Matrix, name: &str| {
        // pencil left·Z·lead − λ·x·Z·right, Z = (y + γ·shift_with)⁻¹
        if allow_reduced && commutes(y, shift_with, tol.commute) {
            return Ok((left * lead, x * right, true));
        }
        let (_, z) = resolvent_shift(y, shift_with)
            .map_err(|_| Error::SingularPencil(format!("{name} admits no resolvent shift")))?;
        Ok::<_, Error>((&(left * &z) * lead, &(x * &z) * right, false))
    };
    Ok([
        build(l1, a, s1, e, e, r1, "first pencil")?,
        build(l2, b, s2, d, b, r2, "second pencil")?,
    ])
}

/// Generalized condition for `AXD + E f(X) B = C`.
///
/// Preserving `f`: spectra of `f(A)Z₁A − λEZ₁f(E)` and `f(B)Z₂B − λDZ₂f(D)`,
/// `Z₁ = (E + γ₁f(A))⁻¹`, `Z₂ = (B + γ₂f(D))⁻¹`.
/// Reversing `f`: `f(D)Z₁A − λEZ₁f(B)` and `f(E)Z₂B − λDZ₂f(A)`,
/// `Z₁ = (E + γ₁f(D))⁻¹`, `Z₂ = (B + γ₂f(A))⁻¹`.
/// When `E` (resp. `B`) commutes with the shift partner, `Z` drops out.
pub fn check_generalized(
    a: &Matrix,
    d: &Matrix,
    e: &Matrix,
    b: &Matrix,
    f: &StructuredOperator,
    tol: &Tolerances,
) -> Result<SolvabilityReport> {
    generalized(a, d, e, b, f, tol, true)
}

/// [`check_generalized`] without the reduced commuting forms.
pub fn check_generalized_full(
    a: &Matrix,
    d: &Matrix,
    e: &Matrix,
    b: &Matrix,
    f: &StructuredOperator,
    tol: &Tolerances,
) -> Result<SolvabilityReport> {
    generalized(a, d, e, b, f, tol, false)
}

fn generalized(
    a: &Matrix,
    d: &Matrix,
    e: &Matrix,
    b: &Matrix,
    f: &StructuredOperator,
    tol: &Tolerances,
    allow_reduced: bool,
) -> Result<SolvabilityReport> {
    let m = same_size(&[a, b, d, e])?;
    period_two(f, m)?;
    let [(p1, q1, red1), (p2, q2, red2)] = generalized_pencils(a, d, e, b, f, tol, allow_reduced)?;
    let gap = match (regular_spectrum(&p1, &q1, "1"), regular_spectrum(&p2, &q2, "2")) {
        (Ok(s1), Ok(s2)) => disjointness(&s1, &s2, tol.chordal),
        (Err(g), Ok(_)) | (Ok(_), Err(g)) => g,
        (Err(g1), Err(g2)) => g1.merge(g2),
    };
    let kron = kron_nonsingular(a, b, d, e, f)?;
    let form = |r: bool| if r { "reduced" } else { "full" };
    let name = format!("generalized {} ({}/{} form)", f.algebra().name(), form(red1), form(red2));
    Ok(SolvabilityReport::new(name, gap, kron, tol.chordal))
}

/// `A⊗B + (C⊗D)·K_f` for `f ∈ {identity, transpose}`.
pub fn assemble_triangular_operator(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix, f: &StructuredOperator) -> Result<Matrix> {
    let m = same_size(&[a, b, c, d])?;
    let right = c.kron(d);
    Ok(match f.kind() {
        OperatorKind::Identity => &a.kron(b) + &right,
        OperatorKind::Transpose => &a.kron(b) + &(&right * &commutation_matrix(m)),
        k => return Err(Error::InvalidInput(format!("triangular spectrum needs identity or transpose, got {k}"))),
    })
}

/// Eigenvalues of `A⊗B + (C⊗D)K_f` for upper-triangular `A, B, C, D`, read
/// off the diagonals (and 2×2 blocks for the transpose).
pub fn triangular_kron_spectrum(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix, f: &StructuredOperator) -> Result<Vec<Complex64>> {
    let m = same_size(&[a, b, c, d])?;
    for (name, x) in [("A", a), ("B", b), ("C", c), ("D", d)] {
        if !x.is_upper_triangular() {
            return Err(Error::NotTriangular(name.into()));
        }
    }
    let (da, db, dc, dd) = (a.diagonal(), b.diagonal(), c.diagonal(), d.diagonal());
    let mut out = Vec::with_capacity(m * m);
    match f.kind() {
        OperatorKind::Identity => {
            for i in 0..m {
                for j in 0..m {
                    out.push(da[i] * db[j] + dc[i] * dd[j]);
                }
            }
        }
        OperatorKind::Transpose => {
            for i in 0..m {
                out.push(da[i] * db[i] + dc[i] * dd[i]);
                for j in i + 1..m {
                    let (p, q) = (da[i] * db[j], dc[i] * dd[j]);
                    let (r, s) = (dc[j] * dd[i], da[j] * db[i]);
                    let half = (p + s) / 2.0;
                    let disc = (((p - s) / 2.0).powi(2) + q * r).sqrt();
                    out.push(half + disc);
                    out.push(half - disc);
                }
            }
        }
        k => return Err(Error::InvalidInput(format!("triangular spectrum needs identity or transpose, got {k}"))),
    }
    Ok(out)
}

/// Exact test for `AX + f(X)B = C` with `f(X) = PXPᵀ` or `PXᵀPᵀ`, any permutation `P`.
///
/// Similarity: `σ(PᵀA) ∩ σ(−PᵀB) = ∅`. Reversing: the pencil `PᵀA − λBᵀP`
/// is regular, reciprocal free away from `1`, and has `1` at most simply.
pub fn permutation_solvability(
    a: &Matrix,
    b: &Matrix,
    p: &Permutation,
    kind: OperatorKind,
    tol: &Tolerances,
) -> Result<SolvabilityReport> {
    let m = same_size(&[a, b])?;
    if p.len() != m {
        return Err(dim_err(format!("permutation of {} for {m}x{m} matrices", p.len())));
    }
    let pm = p.matrix();
    let pt = pm.transpose();
    let (f, name, gap) = match kind {
        OperatorKind::PermSimilarity => {
            let s1 = finite_pairs(eigenvalues(&(&pt * a))?);
            let s2 = finite_pairs(eigenvalues(&-&(&pt * b))?);
            let gap = disjointness(&s1, &s2, tol.chordal);
            (StructuredOperator::perm_similarity(p.clone()), "sigma(PᵀA) vs sigma(-PᵀB)", gap)
        }
        OperatorKind::PermReversing => {
            let gap = match regular_spectrum(&(&pt * a), &(&b.transpose() * &pm), "PᵀA - λBᵀP") {
                Ok(s) => reversing_permutation_gap(&s, tol.chordal),
                Err(g) => g,
            };
            (StructuredOperator::perm_reversing(p.clone()), "PᵀA - λBᵀP reciprocal free", gap)
        }
        k => return Err(Error::InvalidInput(format!("permutation test needs a permutation kind, got {k}"))),
    };
    let eye = Matrix::identity(m);
    let kron = kron_nonsingular(a, b, &eye, &eye, &f)?;
    Ok(SolvabilityReport::new(name, gap, kron, tol.chordal))
}

/// Reciprocal pairs over distinct positions, plus `−1` on its own. A double
/// `1` shows up as a pair; a simple `1` is allowed.
fn reversing_permutation_gap(pairs: &[HomogeneousEig], tol: f64) -> Gap {
    let scan = reciprocal_scan(pairs, ScalarMap::Identity, tol, false);
    let mut gap = Gap { margin: scan.margin, offending: scan.offending, notes: Vec::new() };
    let minus_one = HomogeneousEig::finite(c64(-1.0, 0.0));
    for x in pairs {
        let dist = x.chordal(&minus_one);
        gap.margin = gap.margin.min(dist);
        if dist <= tol {
            gap.offending.push(Offending { left: *x, right: *x, distance: dist });
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> Matrix {
        Matrix::real(&[&[x]])
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn kron_operator_examples() {
        let one = s(1.0);
        let id = StructuredOperator::identity();
        assert_eq!(kron_operator(&s(2.0), &s(3.0), &one, &one, &id).unwrap(), LinearMap::Complex(s(5.0)));

        let conj = StructuredOperator::conjugate();
        assert_eq!(
            kron_operator(&one, &one, &one, &one, &conj).unwrap(),
            LinearMap::Realified(Matrix::real_diag(&[2.0, 0.0]))
        );

        let eye = Matrix::identity(2);
        let t = kron_operator(&eye, &eye, &eye, &eye, &StructuredOperator::transpose()).unwrap();
        assert_eq!(t, LinearMap::Complex(&Matrix::identity(4) + &commutation_matrix(2)));
    }

    #[test]
    fn kron_nonsingular_examples() {
        let one = s(1.0);
        let id = StructuredOperator::identity();
        let (ok, smin) = kron_nonsingular(&one, &one, &one, &one, &id).unwrap();
        assert!(ok && (smin - 2.0).abs() < 1e-14);
        let (ok, smin) = kron_nonsingular(&one, &s(-1.0), &one, &one, &id).unwrap();
        assert!(!ok && smin == 0.0);
    }

    #[test]
    fn preserving_examples() {
        let id = StructuredOperator::identity();
        let r = check_preserving(&s(2.0), &s(3.0), &id, &tol()).unwrap();
        assert!(r.holds && r.kron_nonsingular);

        let r = check_preserving(&s(1.0), &s(1.0), &id, &tol()).unwrap();
        assert!(!r.holds && r.kron_nonsingular);
        assert_eq!(r.details.len(), 1);

        let r = check_preserving(&s(2.0), &s(-2.0), &id, &tol()).unwrap();
        assert!(!r.holds && !r.kron_nonsingular);

        assert!(matches!(
            check_preserving(&s(2.0), &s(3.0), &StructuredOperator::transpose(), &tol()),
            Err(Error::WrongOperatorClass { .. })
        ));
    }

    #[test]
    fn reversing_examples() {
        let t = StructuredOperator::transpose();
        let r = check_reversing(&s(2.0), &s(3.0), &t, &tol()).unwrap();
        assert!(r.holds && r.kron_nonsingular);
        assert!((r.margin - HomogeneousEig::finite(c64(2.0 / 3.0, 0.0)).chordal(&HomogeneousEig::finite(c64(1.5, 0.0)))).abs() < 1e-14);

        let r = check_reversing(&s(1.0), &s(1.0), &t, &tol()).unwrap();
        assert!(!r.holds && r.kron_nonsingular);

        let r = check_reversing(&s(0.0), &s(0.0), &t, &tol()).unwrap();
        assert!(!r.holds && !r.kron_nonsingular);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn reciprocal_examples() {
        let one = |z: f64| HomogeneousEig::finite(c64(z, 0.0));
        let spectrum = |pairs| PencilSpectrum { pairs, regular: true };
        assert!(reciprocal_free(&spectrum(vec![one(2.0 / 3.0)]), ScalarMap::Identity, 1e-8).free);
        let r = reciprocal_free(&spectrum(vec![one(2.0), one(0.5)]), ScalarMap::Identity, 1e-8);
        assert!(!r.free);
        assert_eq!(r.offending.len(), 1);
        assert!(!reciprocal_free(&spectrum(vec![one(0.0), HomogeneousEig::infinite()]), ScalarMap::Identity, 1e-8).free);
        // s = conjugation: i·s(i)... conj(i)·i = 1 so {i} alone is not free
        let i = HomogeneousEig::finite(c64(0.0, 1.0));
        assert!(!reciprocal_free(&spectrum(vec![i]), ScalarMap::Conjugation, 1e-8).free);
        assert!(reciprocal_free(&spectrum(vec![i]), ScalarMap::Identity, 1e-8).free);
    }

    #[test]
    fn generalized_reduces_to_basic_checks() {
        let eye = Matrix::identity(2);
        let a = Matrix::real(&[&[1.0, 2.0], &[0.5, -1.0]]);
        let b = Matrix::real(&[&[3.0, 0.0], &[1.0, 2.0]]);
        for f in [StructuredOperator::identity(), StructuredOperator::transpose()] {
            let g = check_generalized(&a, &eye, &eye, &b, &f, &tol()).unwrap();
            let basic = check_condition(&a, &b, &f, &tol()).unwrap();
            assert_eq!(g.holds, basic.holds, "{f}");
            assert!((g.margin - basic.margin).abs() < 1e-10, "{f}");
            // (B + γf(A))⁻¹ stays as a nonsingular left factor in the reversing case
            let form = if f.algebra() == Algebra::Preserving { "reduced/reduced" } else { "reduced/full" };
            assert!(g.condition_name.contains(form), "{}", g.condition_name);
        }
    }

    #[test]
    fn generalized_scalar_grid() {
        let id = StructuredOperator::identity();
        let vals = [-2.0, -1.0, 0.0, 1.0, 2.0];
        for &a in &vals {
            for &d in &vals {
                for &e in &vals {
                    for &b in &vals {
                        let r = check_generalized(&s(a), &s(d), &s(e), &s(b), &id, &tol()).unwrap();
                        assert_eq!(r.kron_nonsingular, a * d + e * b != 0.0);
                        if r.holds {
                            assert!(r.kron_nonsingular, "a={a} d={d} e={e} b={b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn generalized_commuting_diagonal_agrees_with_full() {
        let a = Matrix::real_diag(&[1.0, 2.0]);
        let d = Matrix::real_diag(&[3.0, -1.0]);
        let e = Matrix::real_diag(&[0.5, 4.0]);
        let b = Matrix::real_diag(&[2.0, 1.5]);
        for f in [StructuredOperator::identity(), StructuredOperator::transpose()] {
            let red = check_generalized(&a, &d, &e, &b, &f, &tol()).unwrap();
            let full = check_generalized_full(&a, &d, &e, &b, &f, &tol()).unwrap();
            assert!(red.condition_name.contains("reduced/reduced"));
            assert!(full.condition_name.contains("full/full"));
            assert_eq!(red.holds, full.holds);
            assert!((red.margin - full.margin).abs() < 1e-10);
        }
    }

    #[test]
    fn triangular_examples() {
        let eye = Matrix::identity(2);
        let v = triangular_kron_spectrum(&eye, &eye, &eye, &eye, &StructuredOperator::identity()).unwrap();
        assert_eq!(v, vec![c64(2.0, 0.0); 4]);

        let (a, b) = (Matrix::real_diag(&[1.0, 2.0]), Matrix::real_diag(&[3.0, 4.0]));
        let (c, d) = (Matrix::real_diag(&[5.0, 6.0]), Matrix::real_diag(&[7.0, 8.0]));
        let mut v = triangular_kron_spectrum(&a, &b, &c, &d, &StructuredOperator::transpose()).unwrap();
        v.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (got, want) in v.iter().zip([-36.0, 38.0, 46.0, 56.0]) {
            assert!((got - c64(want, 0.0)).norm() < 1e-10);
        }

        let v = triangular_kron_spectrum(&s(2.0), &s(3.0), &s(5.0), &s(7.0), &StructuredOperator::transpose()).unwrap();
        assert_eq!(v, vec![c64(41.0, 0.0)]);

        let lower = Matrix::real(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(matches!(
            triangular_kron_spectrum(&lower, &eye, &eye, &eye, &StructuredOperator::identity()),
            Err(Error::NotTriangular(_))
        ));
    }

    #[test]
    fn permutation_examples() {
        let p = Permutation::identity(1);
        let r = permutation_solvability(&s(1.0), &s(-1.0), &p, OperatorKind::PermSimilarity, &tol()).unwrap();
        assert!(!r.holds && !r.kron_nonsingular);

        let r = permutation_solvability(&s(1.0), &s(1.0), &p, OperatorKind::PermReversing, &tol()).unwrap();
        assert!(r.holds && r.kron_nonsingular);

        // eigenvalue −1: x − x = c is singular
        let r = permutation_solvability(&s(1.0), &s(-1.0), &p, OperatorKind::PermReversing, &tol()).unwrap();
        assert!(!r.holds && !r.kron_nonsingular);
    }

    #[test]
    fn double_one_is_rejected() {
        // PᵀA − λBᵀP = I − λI for P = I: eigenvalue 1 twice
        let eye = Matrix::identity(2);
        let r = permutation_solvability(&eye, &eye, &Permutation::identity(2), OperatorKind::PermReversing, &tol()).unwrap();
        assert!(!r.holds && !r.kron_nonsingular);
    }

    #[test]
    fn clusters_are_merged() {
        let a = HomogeneousEig::finite(c64(1.0 + 1e-8, 0.0));
        let b = HomogeneousEig::finite(c64(1.0 - 1e-8, 0.0));
        let c = HomogeneousEig::finite(c64(3.0, 0.0));
        let r = refine_clusters(&[a, b, c]);
        assert!((r[0].value().unwrap() - c64(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r[0], r[1]);
        assert_eq!(r[2], c);
    }
}
