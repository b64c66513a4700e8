//! Regular pencils `D − λE`: spectra, relative characteristic polynomials,
//! resolvent shifts and Laurent expansions of `(D − λE)⁻¹` at infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, eigenvalues, Lu, Matrix, PIVOT_TOL};
use crate::operator::{ScalarMap, StructuredOperator};

/// Relative threshold deciding the degree of a relative characteristic polynomial.
pub const DEGREE_TOL: f64 = 1e-10;
/// Recurrence residual a Laurent expansion must reach.
pub const LAURENT_GATE: f64 = 1e-9;
const MIN_NODES: usize = 128;
const MAX_NODES: usize = 4096;

/// A homogeneous eigenvalue `(α : β)` with `|α|² + |β|² = 1`; `β = 0` is `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousEig {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl HomogeneousEig {
    /// Normalizes `(alpha : beta)`. Both zero is kept as the (invalid) zero pair.
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Self { alpha, beta };
        }
        Self { alpha: alpha / n, beta: beta / n }
    }

    pub fn finite(lambda: Complex64) -> Self {
        Self::new(lambda, c64(1.0, 0.0))
    }

    pub fn infinite() -> Self {
        Self { alpha: c64(1.0, 0.0), beta: c64(0.0, 0.0) }
    }

    pub fn is_infinite(&self) -> bool {
        self.beta == c64(0.0, 0.0)
    }

    /// `α/β`, or `None` for the infinite eigenvalue.
    pub fn value(&self) -> Option<Complex64> {
        (!self.is_infinite()).then(|| self.alpha / self.beta)
    }

    /// Chordal distance `|α₁β₂ − α₂β₁|`.
    pub fn chordal(&self, other: &HomogeneousEig) -> f64 {
        (self.alpha * other.beta - other.alpha * self.beta).norm()
    }

    /// `(β : α)`, i.e. `1/λ` with `0 ↔ ∞`.
    pub fn reciprocal(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }

    pub fn map(&self, s: ScalarMap) -> Self {
        Self { alpha: s.apply(self.alpha), beta: s.apply(self.beta) }
    }

    pub fn neg(&self) -> Self {
        Self { alpha: -self.alpha, beta: self.beta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilSpectrum {
    pub pairs: Vec<HomogeneousEig>,
    pub regular: bool,
}

impl PencilSpectrum {
    pub fn finite(&self) -> Vec<Complex64> {
        self.pairs.iter().filter_map(HomogeneousEig::value).collect()
    }

    pub fn infinite_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_infinite()).count()
    }
}

/// Coefficients `p₀..p_m` of `det(D − λE)` in ascending powers of `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelCharPoly {
    pub coeffs: Vec<Complex64>,
    /// Radius of the interpolation circle; `|p_j|·radius^j` are the
    /// comparable magnitudes.
    pub radius: f64,
    pub regular: bool,
}

impl RelCharPoly {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(c64(0.0, 0.0), |acc, &p| acc * lambda + p)
    }

    fn scaled(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, p)| p.norm() * self.radius.powi(j as i32))
            .collect()
    }

    /// Degree, or `None` for a singular pencil.
    pub fn degree(&self) -> Option<usize> {
        if !self.regular {
            return None;
        }
        let s = self.scaled();
        let top = s.iter().cloned().fold(0.0, f64::max);
        s.iter().rposition(|&x| x > DEGREE_TOL * top)
    }

    /// Finite roots via the companion matrix of the scaled polynomial.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let Some(d) = self.degree() else {
            return Err(Error::SingularPencil("identically zero determinant".into()));
        };
        if d == 0 {
            return Ok(Vec::new());
        }
        let r = self.radius;
        let q: Vec<Complex64> = (0..=d).map(|j| self.coeffs[j] * r.powi(j as i32)).collect();
        let lead = q[d];
        let comp = Matrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -q[i] / lead
            } else if i == j + 1 {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        Ok(eigenvalues(&comp)?.into_iter().map(|z| z * r).collect())
    }
}

fn check_pencil(d: &Matrix, e: &Matrix) -> Result<usize> {
    if !d.is_square() || !e.is_square() || d.rows() != e.rows() {
        return Err(dim_err(format!(
            "pencil needs equal square matrices, got {}x{} and {}x{}",
            d.rows(),
            d.cols(),
            e.rows(),
            e.cols()
        )));
    }
    if d.rows() == 0 {
        return Err(dim_err("empty pencil"));
    }
    Ok(d.rows())
}

/// `det(D − λE)` by interpolation at `m + 1` scaled roots of unity.
pub fn relative_charpoly(d: &Matrix, e: &Matrix) -> Result<RelCharPoly> {
    let m = check_pencil(d, e)?;
    let (nd, ne) = (d.norm_fro(), e.norm_fro());
    let r = if ne == 0.0 { 1.0 } else { (nd / ne).max(1.0) };
    let n = m + 1;
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let dets: Vec<Complex64> = nodes
        .iter()
        .map(|&w| Lu::factor(&(d - &e.scale(w * r))).determinant())
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = c64(0.0, 0.0);
        for (j, det) in dets.iter().enumerate() {
            s += det * nodes[(j * k) % n].conj();
        }
        coeffs.push(s / n as f64 / r.powi(k as i32));
    }
    let scale = (nd + r * ne).powi(m as i32);
    let mut poly = RelCharPoly { coeffs, radius: r, regular: true };
    let top = poly.scaled().into_iter().fold(0.0, f64::max);
    poly.regular = scale > 0.0 && top > 1e-12 * m as f64 * scale;
    Ok(poly)
}

/// Homogeneous spectrum of `D − λE`.
///
/// The degree of `det(D − λE)` fixes how many eigenvalues are infinite; the
/// eigenvalues themselves come from a Schur decomposition of the shifted
/// resolvent `(D − γE)⁻¹E`, whose eigenvalue `μ` maps to `(γμ + 1 : μ)`.
pub fn pencil_spectrum(d: &Matrix, e: &Matrix) -> Result<PencilSpectrum> {
    let m = check_pencil(d, e)?;
    let cp = relative_charpoly(d, e)?;
    let Some(deg) = cp.degree() else {
        return Ok(PencilSpectrum { pairs: Vec::new(), regular: false });
    };
    let n_inf = m - deg;
    let mut pairs = match resolvent_shift(d, &-e) {
        Ok((gamma, z)) => eigenvalues(&(&z * e))?
            .into_iter()
            .map(|mu| HomogeneousEig::new(gamma * mu + 1.0, mu))
            .collect::<Vec<_>>(),
        Err(_) => {
            let mut p: Vec<_> = cp.roots()?.into_iter().map(HomogeneousEig::finite).collect();
            p.resize(m, HomogeneousEig::infinite());
            p
        }
    };
    pairs.sort_by(|a, b| a.beta.norm().total_cmp(&b.beta.norm()));
    for p in pairs.iter_mut().take(n_inf) {
        *p = HomogeneousEig::infinite();
    }
    Ok(PencilSpectrum { pairs, regular: true })
}

/// Candidate shifts `0, 1, −1, 2, −2, i, −i, 3, −3, 2i, −2i, …`.
pub fn shift_candidates(count: usize) -> Vec<Complex64> {
    let mut out = vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)];
    let mut k = 1.0;
    while out.len() < count {
        out.extend([c64(k + 1.0, 0.0), c64(-(k + 1.0), 0.0), c64(0.0, k), c64(0.0, -k)]);
        k += 1.0;
    }
    out.truncate(count);
    out
}

/// A shift `γ` with `A + γB` invertible and `Z = (A + γB)⁻¹`, so that
/// `A·Z·B = B·Z·A`.
pub fn resolvent_shift(a: &Matrix, b: &Matrix) -> Result<(Complex64, Matrix)> {
    let m = check_pencil(a, b)?;
    let (na, nb) = (a.norm_max(), b.norm_max());
    let mut best: Option<(f64, Complex64, Lu)> = None;
    for gamma in shift_candidates(2 * m + 4) {
        let shifted = a + &b.scale(gamma);
        let lu = Lu::factor(&shifted);
        let piv = lu.min_pivot();
        let scale = shifted.norm_max();
        if scale == 0.0 || piv < PIVOT_TOL * scale {
            continue;
        }
        let score = piv / (na + gamma.norm() * nb);
        if best.as_ref().is_none_or(|(s, _, _)| score > s * (1.0 + 1e-9)) {
            best = Some((score, gamma, lu));
        }
    }
    let (_, gamma, lu) =
        best.ok_or_else(|| Error::SingularPencil("no candidate shift makes A + γB invertible".into()))?;
    Ok((gamma, lu.solve(&Matrix::identity(m))))
}

/// Laurent coefficients of `(D − λE)⁻¹ = Σ_k U_k λ^(−k−1)` about infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion {
    pub mu: usize,
    kmin: i64,
    coeffs: Vec<Matrix>,
    /// Radius of the enclosing contour `2(1 + ρ)`.
    pub radius: f64,
    pub residual: f64,
    pub nodes: usize,
}

impl LaurentExpansion {
    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.coeffs.len() as i64 - 1
    }

    /// `U_k`; zero below `−mu`.
    pub fn get(&self, k: i64) -> Result<Matrix> {
        if k < -(self.mu as i64) {
            return Ok(Matrix::zeros(self.dim(), self.dim()));
        }
        if k > self.kmax() {
            return Err(Error::MissingCoefficient { index: k });
        }
        Ok(self.coeffs[(k - self.kmin) as usize].clone())
    }

    fn get_ref(&self, k: i64) -> Result<Option<&Matrix>> {
        if k < -(self.mu as i64) {
            return Ok(None);
        }
        if k > self.kmax() {
            return Err(Error::MissingCoefficient { index: k });
        }
        Ok(Some(&self.coeffs[(k - self.kmin) as usize]))
    }

    /// `(k, U_k)` for `−mu ≤ k ≤ kmax`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Matrix)> {
        let lo = -(self.mu as i64);
        (lo..=self.kmax()).map(move |k| (k, &self.coeffs[(k - self.kmin) as usize]))
    }

    /// `Σ_{k=−mu}^{kmax} U_k λ^(−k−1)`.
    pub fn partial_sum(&self, lambda: Complex64, kmax: i64) -> Matrix {
        let mut acc = Matrix::zeros(self.dim(), self.dim());
        for (k, u) in self.iter().take_while(|(k, _)| *k <= kmax) {
            acc = &acc + &u.scale(lambda.powi(-(k as i32) - 1));
        }
        acc
    }
}

#[derive(Serialize)]
struct LaurentTerm<'a> {
    k: i64,
    #[serde(rename = "U")]
    u: &'a Matrix,
}

impl Serialize for LaurentExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<LaurentTerm<'_>> = self.iter().map(|(k, u)| LaurentTerm { k, u }).collect();
        let mut st = s.serialize_struct("LaurentExpansion", 6)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("kmax", &self.kmax())?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("coeffs", &terms)?;
        st.end()
    }
}

/// Laurent coefficients `U_k`, `−m ≤ k ≤ kmax`, by trapezoidal quadrature on
/// circles enclosing every finite eigenvalue.
///
/// Two circles are used, `R = 2(1 + ρ)` and `R = 1.5ρ` with `ρ` the largest
/// finite eigenvalue modulus. A quadrature sum for `U_k` carries magnitude
/// `s_k = R^(k+1)·max‖(D − λE)⁻¹‖`, so each `U_k` is taken from the circle
/// with the smaller `s_k`: the large one for the polynomial part, the tight one
/// for fast-decaying coefficients.
///
/// The reported residual is the worst recurrence defect
/// `‖D·U_k − E·U_{k+1} − δ_{k,−1}I‖ / (‖D‖·s_k + ‖E‖·s_{k+1})`.
pub fn laurent_coefficients(d: &Matrix, e: &Matrix, kmax: usize) -> Result<LaurentExpansion> {
    let m = check_pencil(d, e)?;
    if kmax < m {
        return Err(Error::InvalidInput(format!("kmax = {kmax} must be at least m = {m}")));
    }
    let spectrum = pencil_spectrum(d, e)?;
    if !spectrum.regular {
        return Err(Error::SingularPencil("det(D - λE) vanishes identically".into()));
    }
    let rho = spectrum.finite().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = 2.0 * (1.0 + rho);
    let mut radii = vec![radius];
    if rho > 0.0 {
        radii.push(1.5 * rho);
    }
    let kmin = -(m as i64);
    let count = (kmax as i64 - kmin + 1) as usize;

    let mut nodes = MIN_NODES.max((4 * count).next_power_of_two());
    loop {
        let mut coeffs: Vec<Matrix> = Vec::with_capacity(count);
        let mut sizes = vec![f64::INFINITY; count];
        for &r in &radii {
            let (u, gmax) = quadrature(d, e, r, kmin, count, nodes)?;
            for (i, ui) in u.into_iter().enumerate() {
                let s = r.powi((kmin + i as i64 + 1) as i32) * gmax;
                if i >= coeffs.len() {
                    coeffs.push(ui);
                    sizes[i] = s;
                } else if s < sizes[i] {
                    coeffs[i] = ui;
                    sizes[i] = s;
                }
            }
        }
        let residual = recurrence_residual(d, e, &coeffs, kmin, &sizes);
        if residual < LAURENT_GATE || nodes >= MAX_NODES {
            if residual >= LAURENT_GATE || !residual.is_finite() {
                return Err(Error::QuadratureNotConverged { residual, nodes });
            }
            return Ok(finish(coeffs, kmin, m, radius, residual, nodes));
        }
        nodes *= 2;
    }
}

fn quadrature(
    d: &Matrix,
    e: &Matrix,
    radius: f64,
    kmin: i64,
    count: usize,
    nodes: usize,
) -> Result<(Vec<Matrix>, f64)> {
    let m = d.rows();
    let eye = Matrix::identity(m);
    let mut acc = vec![Matrix::zeros(m, m); count];
    let mut gmax: f64 = 0.0;
    for n in 0..nodes {
        let lambda = Complex64::from_polar(radius, 2.0 * PI * n as f64 / nodes as f64);
        let shifted = d - &e.scale(lambda);
        let lu = Lu::factor(&shifted);
        if lu.min_pivot() == 0.0 {
            return Err(Error::SingularPencil("quadrature node hit an eigenvalue".into()));
        }
        let res = lu.solve(&eye);
        gmax = gmax.max(res.norm_fro());
        let mut w = lambda.powi((kmin + 1) as i32);
        for u in acc.iter_mut() {
            *u = &*u + &res.scale(w);
            w *= lambda;
        }
    }
    let inv = 1.0 / nodes as f64;
    Ok((acc.into_iter().map(|u| u.scale_real(inv)).collect(), gmax))
}

fn recurrence_residual(d: &Matrix, e: &Matrix, u: &[Matrix], kmin: i64, sizes: &[f64]) -> f64 {
    let m = d.rows();
    let (nd, ne) = (d.norm_fro(), e.norm_fro());
    let mut worst: f64 = 0.0;
    for i in 0..u.len() - 1 {
        let k = kmin + i as i64;
        let mut lhs = &(d * &u[i]) - &(e * &u[i + 1]);
        if k == -1 {
            lhs = &lhs - &Matrix::identity(m);
        }
        worst = worst.max(lhs.norm_fro() / (nd * sizes[i] + ne * sizes[i + 1]));
    }
    worst
}

fn finish(mut coeffs: Vec<Matrix>, kmin: i64, m: usize, radius: f64, residual: f64, nodes: usize) -> LaurentExpansion {
    let at = |k: i64| (k - kmin) as usize;
    let top = (kmin..=0).map(|k| coeffs[at(k)].norm_fro()).fold(0.0, f64::max);
    let mu = (1..=m).rev().find(|&j| coeffs[at(-(j as i64))].norm_fro() > 1e-9 * top).unwrap_or(0);
    for k in kmin..-(mu as i64) {
        coeffs[at(k)] = Matrix::zeros(m, m);
    }
    LaurentExpansion { mu, kmin, coeffs, radius, residual, nodes }
}

/// `Σ_j p_j U_{k+j−m}`.
pub fn rel_cayley_hamilton(p: &RelCharPoly, l: &LaurentExpansion, k: i64) -> Result<Matrix> {
    let m = p.coeffs.len() as i64 - 1;
    let mut acc = Matrix::zeros(l.dim(), l.dim());
    for (j, &pj) in p.coeffs.iter().enumerate() {
        if let Some(u) = l.get_ref(k + j as i64 - m)? {
            acc = &acc + &u.scale(pj);
        }
    }
    Ok(acc)
}

/// `T_j = Σ_{s+t=j−1} U_s C V_t − Σ_{s+t=j} U_s f(C) V_t` for `0 ≤ j ≤ jmax`.
pub fn t_sequence(
    u: &LaurentExpansion,
    v: &LaurentExpansion,
    c: &Matrix,
    f: &StructuredOperator,
    jmax: usize,
) -> Result<Vec<Matrix>> {
    let m = c.rows();
    if u.dim() != m || v.dim() != m || !c.is_square() {
        return Err(dim_err("t_sequence operands differ in size"));
    }
    let fc = f.apply(c)?;
    let conv = |total: i64, mid: &Matrix| -> Result<Matrix> {
        let mut acc = Matrix::zeros(m, m);
        let lo = -(u.mu as i64);
        let hi = total + v.mu as i64;
        for s in lo..=hi {
            let t = total - s;
            if let (Some(us), Some(vt)) = (u.get_ref(s)?, v.get_ref(t)?) {
                acc = &acc + &(&(us * mid) * vt);
            }
        }
        Ok(acc)
    };
    (0..=jmax as i64)
        .map(|j| Ok(&conv(j - 1, c)? - &conv(j, &fc)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn sorted_finite(s: &PencilSpectrum) -> Vec<Complex64> {
        let mut v = s.finite();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn spectrum_examples() {
        let s = pencil_spectrum(&Matrix::real_diag(&[1.0, 2.0]), &Matrix::identity(2)).unwrap();
        assert!(s.regular);
        let f = sorted_finite(&s);
        assert!((f[0] - c64(1.0, 0.0)).norm() < 1e-12 && (f[1] - c64(2.0, 0.0)).norm() < 1e-12);

        let s = pencil_spectrum(&Matrix::identity(2), &Matrix::zeros(2, 2)).unwrap();
        assert!(s.regular);
        assert_eq!(s.pairs, vec![HomogeneousEig::infinite(); 2]);

        let s = pencil_spectrum(&Matrix::zeros(1, 1), &Matrix::zeros(1, 1)).unwrap();
        assert!(!s.regular);
        assert!(s.pairs.is_empty());
    }

    #[test]
    fn spectrum_mixes_finite_and_infinite() {
        // det = (1 − λ)·1 → one finite eigenvalue, one infinite
        let d = Matrix::identity(2);
        let e = Matrix::real_diag(&[1.0, 0.0]);
        let s = pencil_spectrum(&d, &e).unwrap();
        assert_eq!(s.infinite_count(), 1);
        assert!((s.finite()[0] - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_pencil_with_nonzero_entries() {
        // both matrices share a zero column
        let d = Matrix::real(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let e = Matrix::real(&[&[3.0, 0.0], &[1.0, 0.0]]);
        assert!(!pencil_spectrum(&d, &e).unwrap().regular);
        assert!(matches!(laurent_coefficients(&d, &e, 2), Err(Error::SingularPencil(_))));
    }

    #[test]
    fn charpoly_examples() {
        let p = relative_charpoly(&Matrix::real_diag(&[1.0, 2.0]), &Matrix::identity(2)).unwrap();
        for (got, want) in p.coeffs.iter().zip([2.0, -3.0, 1.0]) {
            assert!((got - c64(want, 0.0)).norm() < 1e-12);
        }
        let p = relative_charpoly(&Matrix::real(&[&[3.0]]), &Matrix::real(&[&[2.0]])).unwrap();
        assert!((p.coeffs[0] - c64(3.0, 0.0)).norm() < 1e-12);
        assert!((p.coeffs[1] - c64(-2.0, 0.0)).norm() < 1e-12);
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn charpoly_reproduces_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let (d, e) = (random(&mut rng, 4), random(&mut rng, 4));
            let p = relative_charpoly(&d, &e).unwrap();
            for _ in 0..10 {
                let z = c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let det = crate::matrix::determinant(&(&d - &e.scale(z))).unwrap();
                assert!((p.eval(z) - det).norm() <= 1e-8 * det.norm().max(1.0));
            }
        }
    }

    #[test]
    fn spectrum_agrees_with_charpoly_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let (d, e) = (random(&mut rng, 4), random(&mut rng, 4));
            let s = pencil_spectrum(&d, &e).unwrap();
            let roots = relative_charpoly(&d, &e).unwrap().roots().unwrap();
            for r in roots {
                let h = HomogeneousEig::finite(r);
                let near = s.pairs.iter().map(|p| p.chordal(&h)).fold(f64::INFINITY, f64::min);
                assert!(near < 1e-7, "{near}");
            }
        }
    }

    #[test]
    fn shift_examples() {
        let (g, z) = resolvent_shift(&Matrix::identity(2), &Matrix::zeros(2, 2)).unwrap();
        assert_eq!(g, c64(0.0, 0.0));
        assert_eq!(z, Matrix::identity(2));

        let (g, z) = resolvent_shift(&Matrix::zeros(1, 1), &Matrix::identity(1)).unwrap();
        assert_eq!(g, c64(1.0, 0.0));
        assert_eq!(z, Matrix::identity(1));

        let a = Matrix::real_diag(&[1.0, 0.0]);
        let b = Matrix::real_diag(&[0.0, 1.0]);
        let (g, z) = resolvent_shift(&a, &b).unwrap();
        assert_eq!(g, c64(1.0, 0.0));
        assert_eq!(z, Matrix::identity(2));

        assert!(matches!(
            resolvent_shift(&Matrix::zeros(2, 2), &Matrix::zeros(2, 2)),
            Err(Error::SingularPencil(_))
        ));
        let c = shift_candidates(11);
        assert_eq!(c[7], c64(3.0, 0.0));
        assert_eq!(c[10], c64(0.0, -2.0));
    }

    #[test]
    fn swap_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for m in 1..=6 {
            let (a, b) = (random(&mut rng, m), random(&mut rng, m));
            let (_, z) = resolvent_shift(&a, &b).unwrap();
            let lhs = &(&a * &z) * &b;
            let rhs = &(&b * &z) * &a;
            assert!((&lhs - &rhs).norm_fro() <= 1e-10 * lhs.norm_fro().max(1.0));
        }
    }

    #[test]
    fn laurent_scalar_examples() {
        let one = Matrix::identity(1);
        let l = laurent_coefficients(&one, &one, 4).unwrap();
        assert_eq!(l.mu, 0);
        for k in 0..=4 {
            assert!((l.get(k).unwrap()[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-12);
        }

        let l = laurent_coefficients(&one, &Matrix::zeros(1, 1), 3).unwrap();
        assert_eq!(l.mu, 1);
        assert!((l.get(-1).unwrap()[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-12);
        for k in 0..=3 {
            assert!(l.get(k).unwrap()[(0, 0)].norm() < 1e-12);
        }

        let l = laurent_coefficients(&Matrix::real(&[&[2.0]]), &Matrix::real(&[&[3.0]]), 6).unwrap();
        for k in 0..=6 {
            let want = -(2.0f64 / 3.0).powi(k as i32) / 3.0;
            assert!((l.get(k).unwrap()[(0, 0)] - c64(want, 0.0)).norm() < 1e-12);
        }
        assert!(matches!(l.get(7), Err(Error::MissingCoefficient { index: 7 })));
        assert_eq!(l.get(-5).unwrap(), Matrix::zeros(1, 1));
    }

    #[test]
    fn laurent_matches_closed_form_for_invertible_e() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for m in 1..=5 {
            let (d, e) = (random(&mut rng, m), random(&mut rng, m));
            let l = laurent_coefficients(&d, &e, 6.max(m)).unwrap();
            let einv = e.inverse().unwrap();
            let g = &einv * &d;
            for k in 0..=6 {
                let want = -&(&g.powi(k) * &einv);
                let got = l.get(k as i64).unwrap();
                assert!((&got - &want).norm_fro() <= 1e-8 * want.norm_fro().max(1.0), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn cayley_hamilton_diag_example() {
        let d = Matrix::real_diag(&[1.0, 2.0]);
        let e = Matrix::identity(2);
        let p = relative_charpoly(&d, &e).unwrap();
        let l = laurent_coefficients(&d, &e, 5).unwrap();
        for k in [-1, 2, 3] {
            assert!(rel_cayley_hamilton(&p, &l, k).unwrap().norm_fro() < 1e-10);
        }
        assert!(matches!(rel_cayley_hamilton(&p, &l, 6), Err(Error::MissingCoefficient { index: 6 })));
    }

    #[test]
    fn t_sequence_scalar() {
        let a = Matrix::real(&[&[2.0]]);
        let b = Matrix::real(&[&[3.0]]);
        let f = StructuredOperator::transpose();
        let u = laurent_coefficients(&a, &b, 3).unwrap();
        let v = laurent_coefficients(&b, &a, 3).unwrap();
        let c = c64(1.5, -0.5);
        let t = t_sequence(&u, &v, &Matrix::scalar(c), &f, 1).unwrap();
        assert!((t[0][(0, 0)] - (-c / 6.0)).norm() < 1e-12);
        assert!((t[1][(0, 0)] - (-c * 7.0 / 36.0)).norm() < 1e-12);

        let zero = t_sequence(&u, &v, &Matrix::zeros(1, 1), &f, 2).unwrap();
        assert!(zero.iter().all(|t| t.norm_fro() == 0.0));
    }

    #[test]
    fn homogeneous_helpers() {
        let z = HomogeneousEig::finite(c64(0.0, 0.0));
        assert!(z.reciprocal().is_infinite());
        let h = HomogeneousEig::finite(c64(2.0, 1.0));
        assert!((h.alpha.norm_sqr() + h.beta.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(h.chordal(&HomogeneousEig::finite(c64(2.0, 1.0))) < 1e-15);
        assert!((h.map(ScalarMap::Conjugation).value().unwrap() - c64(2.0, -1.0)).norm() < 1e-14);
    }
}
