//! Dense complex matrices and the factorizations every other module builds on.
//!
//! Everything is computed in complex arithmetic; a real matrix is simply a
//! complex one whose imaginary parts are zero. Storage is row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dim_err, Error, Result};

/// Relative pivot threshold below which a matrix is treated as singular.
pub const PIVOT_TOL: f64 = 1e-12;

const SCHUR_MAX_ITER: usize = 10_000;
const SVD_MAX_ITER: usize = 10_000;

/// Shorthand for `Complex64::new(re, im)`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// Square matrix from real rows; panics on ragged input. Meant for
    /// literals in tests and examples.
    pub fn real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| c64(rows[i][j], 0.0))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
    }

    pub fn scalar(z: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex64::default() })
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let d: Vec<_> = entries.iter().map(|&x| c64(x, 0.0)).collect();
        Self::diag(&d)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Column-stacking `vec` operator.
    pub fn vec(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`Matrix::vec`].
    pub fn from_vec(rows: usize, cols: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), rows * cols, "vector length does not match shape");
        Self::from_fn(rows, cols, |i, j| v[i + j * rows])
    }

    /// Column vector (n×1).
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |r, c| {
            self[(r / p, c / q)] * other[(r % p, c % q)]
        })
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)] == Complex64::default()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == Complex64::default()))
    }

    pub fn powi(&self, k: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Copy of the `nr×nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Assembles a matrix from a 2×2 grid of equally sized square blocks.
    pub fn from_blocks(b11: &Matrix, b12: &Matrix, b21: &Matrix, b22: &Matrix) -> Matrix {
        let m = b11.rows;
        Self::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
            (true, true) => b11[(i, j)],
            (true, false) => b12[(i, j - m)],
            (false, true) => b21[(i - m, j)],
            (false, false) => b22[(i - m, j - m)],
        })
    }

    /// Real 2n×2n matrix acting on stacked `[Re x; Im x]`.
    pub fn realify(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(2 * r, 2 * c, |i, j| {
            let z = self[(i % r, j % c)];
            let v = match (i < r, j < c) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            };
            c64(v, 0.0)
        })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        solve_linear(self, &Matrix::identity(self.rows))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == Complex64::default() {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    odd_swaps: bool,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Lu {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd_swaps = !odd_swaps;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l == Complex64::default() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
        Lu { lu, perm, odd_swaps }
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.rows)
            .map(|i| self.lu[(i, i)].norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn determinant(&self) -> Complex64 {
        let d: Complex64 = (0..self.lu.rows).map(|i| self.lu[(i, i)]).product();
        if self.odd_swaps {
            -d
        } else {
            d
        }
    }

    /// Solves `A·X = B`. Assumes the factorization is nonsingular.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        let n = self.lu.rows;
        assert_eq!(b.rows, n, "right-hand side has the wrong row count");
        let mut x = Matrix::from_fn(n, b.cols, |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        self.solve(&Matrix::column(b)).data
    }
}

/// `true` when the factorization's smallest pivot clears the relative
/// threshold `tol · ‖A‖_max`.
pub(crate) fn pivots_ok(lu: &Lu, a: &Matrix, tol: f64) -> bool {
    let scale = a.norm_max();
    scale > 0.0 && lu.min_pivot() >= tol * scale
}

/// Solves `A·X = B` by pivoted elimination.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    solve_linear_tol(a, b, PIVOT_TOL)
}

pub fn solve_linear_tol(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(dim_err(format!("solve_linear needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    if b.rows != a.rows {
        return Err(dim_err(format!(
            "right-hand side has {} rows, matrix has {}",
            b.rows, a.rows
        )));
    }
    let lu = Lu::factor(a);
    if !pivots_ok(&lu, a, tol) {
        return Err(Error::SingularMatrix { pivot: lu.min_pivot() });
    }
    Ok(lu.solve(b))
}

pub fn determinant(a: &Matrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(dim_err(format!("determinant of a {}x{} matrix", a.rows, a.cols)));
    }
    if a.rows == 0 {
        return Ok(c64(1.0, 0.0));
    }
    Ok(Lu::factor(a).determinant())
}

/// Eigenvalues with multiplicity, via a complex Schur decomposition.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(dim_err(format!("eigenvalues of a {}x{} matrix", a.rows, a.cols)));
    }
    if a.rows == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(a.to_nalgebra(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let (_, t) = schur.unpack();
    Ok((0..a.rows).map(|i| t[(i, i)]).collect())
}

/// Unit right singular vector of the smallest singular value of a square
/// matrix, i.e. the best available null vector.
pub fn null_vector(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() || a.rows == 0 {
        return Err(dim_err(format!("null vector of a {}x{} matrix", a.rows, a.cols)));
    }
    let svd = nalgebra::SVD::try_new(a.to_nalgebra(), false, true, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let v_t = svd.v_t.ok_or(Error::ConvergenceFailure)?;
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    Ok((0..a.cols).map(|j| v_t[(k, j)].conj()).collect())
}

/// Singular values in descending order.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if a.rows == 0 || a.cols == 0 {
        return Ok(Vec::new());
    }
    let svd = nalgebra::SVD::try_new(a.to_nalgebra(), false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// `(sigma_min, sigma_max)` of a nonempty matrix.
pub fn sigma_extremes(a: &Matrix) -> Result<(f64, f64)> {
    let sv = singular_values(a)?;
    Ok((*sv.last().unwrap_or(&0.0), *sv.first().unwrap_or(&0.0)))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let grid = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| part(&self[(i, j)])).collect())
                .collect()
        };
        let has_im = self.data.iter().any(|z| z.im.to_bits() != 0);
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            re: grid(|z| z.re),
            im: has_im.then(|| grid(|z| z.im)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let check = |grid: &Vec<Vec<f64>>, name: &str| -> std::result::Result<(), D::Error> {
            if grid.len() != raw.rows || grid.iter().any(|r| r.len() != raw.cols) {
                return Err(D::Error::custom(format!(
                    "\"{name}\" does not have shape {}x{}",
                    raw.rows, raw.cols
                )));
            }
            Ok(())
        };
        check(&raw.re, "re")?;
        if let Some(im) = &raw.im {
            check(im, "im")?;
        }
        let mut data = Vec::with_capacity(raw.rows * raw.cols);
        for i in 0..raw.rows {
            for j in 0..raw.cols {
                let im = raw.im.as_ref().map_or(0.0, |g| g[i][j]);
                data.push(c64(raw.re[i][j], im));
            }
        }
        Matrix::new(raw.rows, raw.cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        Matrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = Matrix::from_fn(3, 2, |_, _| c64(rng.random(), rng.random()));
        let x = solve_linear(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_small_examples() {
        let x = solve_linear(&Matrix::real(&[&[2.0]]), &Matrix::real(&[&[10.0]])).unwrap();
        assert_eq!(x[(0, 0)], c64(5.0, 0.0));

        let a = Matrix::real(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let b = Matrix::from_real(2, 1, &[3.0, 2.0]).unwrap();
        let x = solve_linear(&a, &b).unwrap();
        assert_relative_eq!(x[(0, 0)].re, 1.0);
        assert_relative_eq!(x[(1, 0)].re, 2.0);
    }

    #[test]
    fn null_vector_annihilates() {
        let a = Matrix::real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let v = null_vector(&a).unwrap();
        let r = &a * &Matrix::column(&v);
        assert!(r.norm_fro() < 1e-14);
        assert!((Matrix::column(&v).norm_fro() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = Matrix::real(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let err = solve_linear(&a, &Matrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
        assert!(matches!(
            solve_linear(&Matrix::zeros(2, 2), &Matrix::identity(2)),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&Matrix::identity(4)).unwrap(), c64(1.0, 0.0));
        assert_relative_eq!(determinant(&Matrix::real_diag(&[1.0, 2.0, 3.0])).unwrap().re, 6.0);
        let swap = Matrix::real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(determinant(&swap).unwrap(), c64(-1.0, 0.0));
        assert_eq!(determinant(&Matrix::zeros(3, 3)).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn eigenvalues_examples() {
        let mut ev = eigenvalues(&Matrix::real_diag(&[1.0, 2.0, 3.0])).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c64(want, 0.0)).norm() < 1e-12);
        }
        let rot = Matrix::real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let mut ev = eigenvalues(&rot).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c64(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c64(0.0, 1.0)).norm() < 1e-12);
    }

    /// Characteristic polynomial from determinant samples at roots of unity,
    /// roots from a companion matrix; independent of the Schur path only in
    /// how the spectrum is reached, which is the point of the comparison.
    #[test]
    fn eigenvalues_match_charpoly_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let a = random(&mut rng, n);
        // det(zI - A) sampled at n+1 roots of unity, inverted by DFT.
        let nodes: Vec<Complex64> = (0..=n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / (n + 1) as f64))
            .collect();
        let vals: Vec<Complex64> = nodes
            .iter()
            .map(|&z| determinant(&(&Matrix::identity(n).scale(z) - &a)).unwrap())
            .collect();
        let coeffs: Vec<Complex64> = (0..=n)
            .map(|k| {
                vals.iter()
                    .zip(&nodes)
                    .map(|(v, z)| v * z.powi(-(k as i32)))
                    .sum::<Complex64>()
                    / (n + 1) as f64
            })
            .collect();
        let lead = coeffs[n];
        let companion = Matrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -coeffs[n - 1 - j] / lead
            } else if i == j + 1 {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let roots = eigenvalues(&companion).unwrap();
        let ev = eigenvalues(&a).unwrap();
        for r in &roots {
            let best = ev.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "root {r} unmatched (distance {best:e})");
        }
    }

    #[test]
    fn solve_recovers_rhs_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = &random(&mut rng, 8) + &Matrix::identity(8).scale_real(3.0);
            let b = random(&mut rng, 8);
            let x = solve_linear(&a, &b).unwrap();
            let r = (&(&a * &x) - &b).norm_fro() / b.norm_fro();
            assert!(r < 1e-10, "relative residual {r:e}");
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = random(&mut rng, 6);
            let b = random(&mut rng, 6);
            let lhs = determinant(&(&a * &b)).unwrap();
            let rhs = determinant(&a).unwrap() * determinant(&b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-300));
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=8 {
            let a = random(&mut rng, n);
            let s: Complex64 = eigenvalues(&a).unwrap().into_iter().sum();
            let t = a.trace();
            assert!((s - t).norm() <= 1e-8 * t.norm().max(1.0));
        }
    }

    #[test]
    fn vec_and_kron_conventions() {
        let x = Matrix::real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let v: Vec<f64> = x.vec().iter().map(|z| z.re).collect();
        assert_eq!(v, [1.0, 3.0, 2.0, 4.0]);
        assert_eq!(Matrix::from_vec(2, 2, &x.vec()), x);

        // vec(AXB) = (Bᵀ ⊗ A) vec(X)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, x) = (random(&mut rng, 3), random(&mut rng, 3), random(&mut rng, 3));
        let lhs = (&(&a * &x) * &b).vec();
        let rhs = &b.transpose().kron(&a) * &Matrix::column(&x.vec());
        for (p, q) in lhs.iter().zip(rhs.as_slice()) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn realify_matches_complex_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 3);
        let x: Vec<Complex64> = (0..3).map(|_| c64(rng.random(), rng.random())).collect();
        let y = &a * &Matrix::column(&x);
        let stacked: Vec<Complex64> = x.iter().map(|z| c64(z.re, 0.0)).chain(x.iter().map(|z| c64(z.im, 0.0))).collect();
        let yr = &a.realify() * &Matrix::column(&stacked);
        for i in 0..3 {
            assert!((yr[(i, 0)].re - y[(i, 0)].re).abs() < 1e-14);
            assert!((yr[(i + 3, 0)].re - y[(i, 0)].im).abs() < 1e-14);
        }
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(matches!(Matrix::new(2, 2, vec![c64(0.0, 0.0); 3]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            Matrix::from_real(1, 1, &[f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn json_schema() {
        let m: Matrix = serde_json::from_str(r#"{"rows":2,"cols":2,"re":[[1,2],[3,4]]}"#).unwrap();
        assert_eq!(m, Matrix::real(&[&[1.0, 2.0], &[3.0, 4.0]]));
        let z: Matrix = serde_json::from_str(r#"{"rows":1,"cols":1,"re":[[0]],"im":[[1.5]]}"#).unwrap();
        assert_eq!(z[(0, 0)], c64(0.0, 1.5));
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":2,"cols":2,"re":[[1,2]]}"#).is_err());
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":1,"cols":1,"re":[[1]],"im":[[1,2]]}"#).is_err());
    }
}
