//! The structured operator `f` of `AX + f(X)B = C`.
//!
//! Every supported operator permutes the entries of a square matrix and
//! optionally conjugates them, so `vec(f(X)) = K·vec(X)` or `K·conj(vec(X))`
//! for a permutation matrix `K`. The conjugating operators are only
//! ℝ-linear; their matrix representation lives on the realified space
//! `[Re vec(X); Im vec(X)]`, see [`LinearMap`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, pivots_ok, Lu, Matrix, PIVOT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Identity,
    Transpose,
    Conjugate,
    ConjugateTranspose,
    PermSimilarity,
    PermReversing,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::Identity,
        OperatorKind::Transpose,
        OperatorKind::Conjugate,
        OperatorKind::ConjugateTranspose,
        OperatorKind::PermSimilarity,
        OperatorKind::PermReversing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Identity => "identity",
            OperatorKind::Transpose => "transpose",
            OperatorKind::Conjugate => "conjugate",
            OperatorKind::ConjugateTranspose => "conjugate_transpose",
            OperatorKind::PermSimilarity => "perm_similarity",
            OperatorKind::PermReversing => "perm_reversing",
        }
    }

    pub fn needs_perm(self) -> bool {
        matches!(self, OperatorKind::PermSimilarity | OperatorKind::PermReversing)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A permutation of `{0, …, m−1}`; row `i` of its matrix is `e_{π(i)}ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// From zero-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &p in &images {
            if p >= m || seen[p] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection on 0..{m}")));
            }
            seen[p] = true;
        }
        Ok(Self(images))
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation("one-based entries must be >= 1".into()));
        }
        Self::new(images.iter().map(|&p| p - 1).collect())
    }

    pub fn identity(m: usize) -> Self {
        Self((0..m).collect())
    }

    /// The `k`-th permutation of `{1..m}` in lexicographic order (`k` is one-based).
    pub fn from_lex_index(k: u128, m: usize) -> Result<Self> {
        let total = factorial(m).ok_or_else(|| Error::InvalidInput(format!("{m}! overflows")))?;
        if k < 1 || k > total {
            return Err(Error::IndexOutOfRange { index: k, max: total });
        }
        let mut rest = k - 1;
        let mut pool: Vec<usize> = (0..m).collect();
        let mut images = Vec::with_capacity(m);
        for slot in (0..m).rev() {
            let block = factorial(slot).expect("smaller factorial fits");
            let pick = (rest / block) as usize;
            rest %= block;
            images.push(pool.remove(pick));
        }
        Ok(Self(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    /// `π∘π = id`, i.e. `P² = I`.
    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| self.0[p] == i)
    }

    pub fn matrix(&self) -> Matrix {
        let m = self.len();
        Matrix::from_fn(m, m, |i, j| if self.0[i] == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
    }
}

fn factorial(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, x| acc.checked_mul(x))
}

/// `index_to_permutation`: the lexicographic permutation and its matrix `P_k`.
pub fn index_to_permutation(k: u128, m: usize) -> Result<(Permutation, Matrix)> {
    let p = Permutation::from_lex_index(k, m)?;
    let mat = p.matrix();
    Ok((p, mat))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algebra {
    /// `f(AB) = f(A) f(B)`
    Preserving,
    /// `f(AB) = f(B) f(A)`
    Reversing,
}

impl Algebra {
    pub fn name(self) -> &'static str {
        match self {
            Algebra::Preserving => "preserving",
            Algebra::Reversing => "reversing",
        }
    }
}

/// The scalar companion `s` in `f(aX) = s(a) f(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMap {
    Identity,
    Conjugation,
}

impl ScalarMap {
    #[inline]
    pub fn apply(self, a: Complex64) -> Complex64 {
        match self {
            ScalarMap::Identity => a,
            ScalarMap::Conjugation => a.conj(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorClass {
    pub algebra: Algebra,
    pub linear_over_complex: bool,
    pub scalar_map: ScalarMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredOperator {
    kind: OperatorKind,
    perm: Option<Permutation>,
}

impl StructuredOperator {
    pub fn new(kind: OperatorKind, perm: Option<Permutation>) -> Result<Self> {
        match (kind.needs_perm(), perm.is_some()) {
            (true, false) => Err(Error::InvalidInput(format!("{kind} needs a permutation"))),
            (false, true) => Err(Error::InvalidInput(format!("{kind} does not take a permutation"))),
            _ => Ok(Self { kind, perm }),
        }
    }

    pub fn identity() -> Self {
        Self { kind: OperatorKind::Identity, perm: None }
    }

    pub fn transpose() -> Self {
        Self { kind: OperatorKind::Transpose, perm: None }
    }

    pub fn conjugate() -> Self {
        Self { kind: OperatorKind::Conjugate, perm: None }
    }

    pub fn conjugate_transpose() -> Self {
        Self { kind: OperatorKind::ConjugateTranspose, perm: None }
    }

    /// `X ↦ P X Pᵀ`
    pub fn perm_similarity(p: Permutation) -> Self {
        Self { kind: OperatorKind::PermSimilarity, perm: Some(p) }
    }

    /// `X ↦ P Xᵀ Pᵀ`
    pub fn perm_reversing(p: Permutation) -> Self {
        Self { kind: OperatorKind::PermReversing, perm: Some(p) }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn perm(&self) -> Option<&Permutation> {
        self.perm.as_ref()
    }

    /// Matrix size the operator is tied to, if any.
    pub fn size(&self) -> Option<usize> {
        self.perm.as_ref().map(Permutation::len)
    }

    pub fn classify(&self) -> OperatorClass {
        use OperatorKind::*;
        let algebra = match self.kind {
            Identity | Conjugate | PermSimilarity => Algebra::Preserving,
            Transpose | ConjugateTranspose | PermReversing => Algebra::Reversing,
        };
        let conj = self.is_conjugating();
        OperatorClass {
            algebra,
            linear_over_complex: !conj,
            scalar_map: if conj { ScalarMap::Conjugation } else { ScalarMap::Identity },
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.classify().algebra
    }

    /// `f(f(X)) = X`. Permutation kinds only have this for involutions.
    pub fn is_period_two(&self) -> bool {
        self.perm.as_ref().is_none_or(Permutation::is_involution)
    }

    pub fn is_conjugating(&self) -> bool {
        matches!(self.kind, OperatorKind::Conjugate | OperatorKind::ConjugateTranspose)
    }

    pub fn scalar_map(&self, a: Complex64) -> Complex64 {
        self.classify().scalar_map.apply(a)
    }

    pub fn check_size(&self, m: usize) -> Result<()> {
        match self.size() {
            Some(n) if n != m => Err(dim_err(format!("{} operator acts on {n}x{n}, got {m}x{m}", self.kind))),
            _ => Ok(()),
        }
    }

    /// `f(X)[i][j]` is (possibly the conjugate of) `X[source(i, j)]`.
    #[inline]
    fn source(&self, i: usize, j: usize) -> (usize, usize) {
        match self.kind {
            OperatorKind::Identity | OperatorKind::Conjugate => (i, j),
            OperatorKind::Transpose | OperatorKind::ConjugateTranspose => (j, i),
            OperatorKind::PermSimilarity => {
                let p = self.perm.as_ref().expect("perm kind carries a permutation").images();
                (p[i], p[j])
            }
            OperatorKind::PermReversing => {
                let p = self.perm.as_ref().expect("perm kind carries a permutation").images();
                (p[j], p[i])
            }
        }
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if !x.is_square() {
            return Err(dim_err(format!("operator applied to a {}x{} matrix", x.rows(), x.cols())));
        }
        self.check_size(x.rows())?;
        let conj = self.is_conjugating();
        Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            let z = x[self.source(i, j)];
            if conj {
                z.conj()
            } else {
                z
            }
        }))
    }

    /// `src[p] = q` means `vec(f(X))[p]` is built from `vec(X)[q]`.
    pub(crate) fn vec_sources(&self, m: usize) -> Vec<usize> {
        let mut src = vec![0; m * m];
        for j in 0..m {
            for i in 0..m {
                let (si, sj) = self.source(i, j);
                src[i + j * m] = si + sj * m;
            }
        }
        src
    }
}

impl fmt::Display for StructuredOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.perm {
            Some(p) => write!(f, "{}{:?}", self.kind, p.one_based()),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// The m²×m² permutation matrix with `K·vec(X) = vec(Xᵀ)`.
pub fn commutation_matrix(m: usize) -> Matrix {
    permutation_columns(&Matrix::identity(m * m), &StructuredOperator::transpose().vec_sources(m), false)
}

/// Right-multiplies `a` by the permutation matrix `K` with `K[p][src[p]] = 1`,
/// optionally negating the result (used for the imaginary half of `conj`).
fn permutation_columns(a: &Matrix, src: &[usize], negate: bool) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), a.cols());
    let sign = if negate { -1.0 } else { 1.0 };
    for (p, &q) in src.iter().enumerate() {
        for r in 0..a.rows() {
            out[(r, q)] = a[(r, p)] * sign;
        }
    }
    out
}

/// A linear map on `vec(X)`: either an honest complex matrix, or (for maps
/// that are only ℝ-linear) a real matrix on the stacked vector
/// `[Re vec(X); Im vec(X)]` (stored with zero imaginary parts).
#[derive(Clone, Debug, PartialEq)]
pub enum LinearMap {
    Complex(Matrix),
    Realified(Matrix),
}

impl LinearMap {
    pub fn matrix(&self) -> &Matrix {
        match self {
            LinearMap::Complex(m) | LinearMap::Realified(m) => m,
        }
    }

    pub fn is_realified(&self) -> bool {
        matches!(self, LinearMap::Realified(_))
    }

    /// Length of the complex vectors the map acts on.
    pub fn complex_dim(&self) -> usize {
        match self {
            LinearMap::Complex(m) => m.cols(),
            LinearMap::Realified(m) => m.cols() / 2,
        }
    }

    /// Real matrix representation (realifies complex maps).
    pub fn to_realified(&self) -> Matrix {
        match self {
            LinearMap::Complex(m) => m.realify(),
            LinearMap::Realified(m) => m.clone(),
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            LinearMap::Complex(m) => (m * &Matrix::column(x)).as_slice().to_vec(),
            LinearMap::Realified(m) => unstack(&(m * &Matrix::column(&stack(x)))),
        }
    }

    /// Solves `map(x) = rhs` with the default pivot threshold.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let (m, b) = match self {
            LinearMap::Complex(m) => (m, rhs.to_vec()),
            LinearMap::Realified(m) => (m, stack(rhs)),
        };
        let lu = Lu::factor(m);
        if !pivots_ok(&lu, m, PIVOT_TOL) {
            return Err(Error::SingularMatrix { pivot: lu.min_pivot() });
        }
        let sol = lu.solve_vec(&b);
        Ok(match self {
            LinearMap::Complex(_) => sol,
            LinearMap::Realified(_) => unstack(&Matrix::column(&sol)),
        })
    }

    /// `(sigma_min, sigma_max)` of the underlying (complex or real) matrix.
    pub fn sigma_extremes(&self) -> Result<(f64, f64)> {
        crate::matrix::sigma_extremes(self.matrix())
    }

    /// `self + other`, promoting to the realified form when either side needs it.
    pub(crate) fn plus(&self, other: &LinearMap) -> LinearMap {
        match (self, other) {
            (LinearMap::Complex(a), LinearMap::Complex(b)) => LinearMap::Complex(a + b),
            _ => LinearMap::Realified(&self.to_realified() + &other.to_realified()),
        }
    }
}

pub(crate) fn stack(x: &[Complex64]) -> Vec<Complex64> {
    x.iter()
        .map(|z| c64(z.re, 0.0))
        .chain(x.iter().map(|z| c64(z.im, 0.0)))
        .collect()
}

pub(crate) fn unstack(v: &Matrix) -> Vec<Complex64> {
    let n = v.rows() / 2;
    (0..n).map(|i| c64(v[(i, 0)].re, v[(i + n, 0)].re)).collect()
}

/// Matrix representation of `vec ∘ f` on m×m matrices.
pub fn kf_matrix(f: &StructuredOperator, m: usize) -> Result<LinearMap> {
    f.check_size(m)?;
    let src = f.vec_sources(m);
    let n = m * m;
    if !f.is_conjugating() {
        return Ok(LinearMap::Complex(permutation_columns(&Matrix::identity(n), &src, false)));
    }
    Ok(LinearMap::Realified(conj_perm_right(&Matrix::identity(2 * n), &src)))
}

/// Right-multiplies a 2n-column real matrix by `diag(K, −K)`.
pub(crate) fn conj_perm_right(a: &Matrix, src: &[usize]) -> Matrix {
    let n = src.len();
    let mut out = Matrix::zeros(a.rows(), a.cols());
    for (p, &q) in src.iter().enumerate() {
        for r in 0..a.rows() {
            out[(r, q)] = a[(r, p)];
            out[(r, n + q)] = -a[(r, n + p)];
        }
    }
    out
}

/// `M · K_f` for a complex `M` acting on `vec(f(X))`, as a map on `vec(X)`.
pub(crate) fn compose_with_operator(mat: &Matrix, f: &StructuredOperator, m: usize) -> LinearMap {
    let src = f.vec_sources(m);
    if f.is_conjugating() {
        LinearMap::Realified(conj_perm_right(&mat.realify(), &src))
    } else {
        LinearMap::Complex(permutation_columns(mat, &src, false))
    }
}
