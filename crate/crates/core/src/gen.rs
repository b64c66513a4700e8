//! Seeded random instances. Every generator draws from one `ChaCha8Rng`, so
//! a seed reproduces an instance bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c64, Matrix};
use crate::operator::{OperatorKind, Permutation, StructuredOperator};
use crate::palindromic::{make_qep, PalindromicQEP};
use crate::solvers::Problem;
use crate::Complex64;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: real and imaginary parts are N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| c64(rng.sample(StandardNormal), 0.0))
}

/// Unit-modulus scalar with uniform phase.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Haar-ish unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Matrix {
    loop {
        let g = gaussian(rng, m, m);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut ok = true;
        for j in 0..m {
            let mut v: Vec<Complex64> = (0..m).map(|i| g[(i, j)]).collect();
            // two passes keep the columns orthogonal to working precision
            for _ in 0..2 {
                for q in &cols {
                    let d: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
        if ok {
            return Matrix::from_fn(m, m, |i, j| cols[j][i]);
        }
    }
}

/// Random upper triangular matrix.
pub fn random_upper<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Matrix {
    Matrix::from_fn(m, m, |i, j| if i <= j { complex_normal(rng) } else { c64(0.0, 0.0) })
}

/// `Q T Q*` with eigenvalues of modulus in `[inner, outer]` and uniform phase.
pub fn random_with_spectrum_in_annulus<R: Rng + ?Sized>(rng: &mut R, m: usize, inner: f64, outer: f64) -> Matrix {
    let q = random_unitary(rng, m);
    let t = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            random_phase(rng) * rng.random_range(inner..=outer)
        } else if i < j {
            complex_normal(rng) * 0.3
        } else {
            c64(0.0, 0.0)
        }
    });
    &(&q * &t) * &q.adjoint()
}

/// Random involution: a shuffled product of disjoint transpositions.
pub fn random_involution<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Permutation {
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(rng);
    let swaps = rng.random_range(0..=m / 2);
    let mut images: Vec<usize> = (0..m).collect();
    for k in 0..swaps {
        let (a, b) = (idx[2 * k], idx[2 * k + 1]);
        images[a] = b;
        images[b] = a;
    }
    Permutation::new(images).expect("involution is a permutation")
}

/// Operator of the given kind; permutation kinds get a random involution.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, kind: OperatorKind, m: usize) -> StructuredOperator {
    let perm = kind.needs_perm().then(|| random_involution(rng, m));
    StructuredOperator::new(kind, perm).expect("permutation supplied for permutation kinds")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Gaussian `A`, `B`, `C`.
    Generic,
    /// `A = aU`, `B = bV` with unitary `U`, `V` and `|a| = 0.8`, `|b| = 1.5`:
    /// the relevant spectra sit on two separated circles.
    ConditionA,
    /// Reversing `f`: `A = WM`, `B = f(W)` with `0.35 ≤ |σ(M)| ≤ 0.7`, so
    /// `σ(A − λf(B)) = σ(M)` lies inside the unit circle and `σ(B − λf(A))`
    /// outside. The inner radius keeps the closed-form reversing solver
    /// accurate; its error grows like `(max|σ|/min|σ|)^m`.
    /// Preserving `f`: `A = aU`, `B = bV` with `|a|² = 0.49 < 1 < |b|²`.
    ConditionB,
    /// `A = −f(X₀) B X₀⁻¹`, so `X₀ ≠ 0` solves the homogeneous equation.
    Singular,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 4] = [Self::Generic, Self::ConditionA, Self::ConditionB, Self::Singular];

    pub fn name(self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::ConditionA => "condition_a",
            Self::ConditionB => "condition_b",
            Self::Singular => "singular",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown instance kind '{s}'")))
    }
}

fn separated_circles<R: Rng + ?Sized>(rng: &mut R, m: usize, ra: f64, rb: f64) -> (Matrix, Matrix) {
    let a = random_unitary(rng, m).scale(random_phase(rng) * ra);
    let b = random_unitary(rng, m).scale(random_phase(rng) * rb);
    (a, b)
}

/// Random `AX + f(X)B = C` of the requested kind.
pub fn generate<R: Rng + ?Sized>(rng: &mut R, kind: InstanceKind, m: usize, f: &StructuredOperator) -> Result<Problem> {
    if m == 0 {
        return Err(crate::error::dim_err("m must be positive"));
    }
    f.check_size(m)?;
    let (a, b) = match kind {
        InstanceKind::Generic => (gaussian(rng, m, m), gaussian(rng, m, m)),
        InstanceKind::ConditionA => separated_circles(rng, m, 0.8, 1.5),
        InstanceKind::ConditionB => match f.algebra() {
            crate::operator::Algebra::Reversing => {
                let w = &gaussian(rng, m, m) + &Matrix::identity(m).scale_real(2.0 * (m as f64).sqrt());
                let mm = random_with_spectrum_in_annulus(rng, m, 0.35, 0.7);
                (&w * &mm, f.apply(&w)?)
            }
            crate::operator::Algebra::Preserving => separated_circles(rng, m, 0.7, 1.5),
        },
        InstanceKind::Singular => {
            let b = gaussian(rng, m, m);
            let x0 = &gaussian(rng, m, m) + &Matrix::identity(m).scale_real((m as f64).sqrt());
            let a = -&(&(&f.apply(&x0)? * &b) * &x0.inverse()?);
            (a, b)
        }
    };
    let c = gaussian(rng, m, m);
    Problem::new(a, b, c, f.clone())
}

/// Random `f`-palindromic QEP with no eigenvalue near the unit circle:
/// `A₁ = H + c·I` with `H = S + f(S)` and `c = ‖H‖ + 4‖A₂‖ + 1`, so on
/// `|λ| = 1` the middle term beats the outer ones by at least 1.
pub fn random_palindromic<R: Rng + ?Sized>(rng: &mut R, m: usize, f: &StructuredOperator) -> Result<PalindromicQEP> {
    let a2 = gaussian(rng, m, m).scale_real(0.3);
    let s = gaussian(rng, m, m);
    let h = &s + &f.apply(&s)?;
    let c = h.norm_fro() + 4.0 * a2.norm_fro() + 1.0;
    let a1 = &h + &Matrix::identity(m).scale_real(c);
    make_qep(a2, a1, f.clone())
}

/// Random regular pencil `D − λE`; with `rank_drop > 0` the matrix `E` loses
/// that much rank, giving infinite eigenvalues.
pub fn random_pencil<R: Rng + ?Sized>(rng: &mut R, m: usize, rank_drop: usize) -> (Matrix, Matrix) {
    let d = gaussian(rng, m, m);
    let keep = m.saturating_sub(rank_drop);
    let s = Matrix::real_diag(&(0..m).map(|i| if i < keep { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    let e = &(&gaussian(rng, m, m) * &s) * &gaussian(rng, m, m);
    (d, e)
}
