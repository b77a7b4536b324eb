//! Dense complex matrices on (C^3)^{⊗L} and the leg bookkeeping used by every
//! other module.
//!
//! Basis convention: a two-site state |ab⟩ has index `3a + b`, a three-site
//! state |abc⟩ has index `9a + 3b + c`. Site 1 is the most significant digit.

mod linalg;
mod poly;

pub use linalg::{eig_sym_sector, eigenvalues, inverse, solve_linear, SectorProjector};
pub use poly::{poly_deriv, poly_eval, poly_roots};

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid leg embedding: slot ({0}, {0}+1) on {1} sites")]
    BadSlot(usize, usize),
    #[error("matrix is singular (condition estimate {cond:.3e})")]
    Singular { cond: f64 },
    #[error("operator leaks out of the sector (leakage norm {leakage:.3e})")]
    SectorLeakage { leakage: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(&'static str),
}

/// Square dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            for col in 0..self.dim {
                let z = self[(r, col)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                data.push(f(r, col));
            }
        }
        Self { dim, data }
    }

    /// Checked constructor: rejects a wrong length and NaN/Inf entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, TensorError> {
        if data.len() != dim * dim {
            return Err(TensorError::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TensorError::NonFinite { row: i / dim, col: i % dim });
        }
        Ok(Self { dim, data })
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Elementary 3x3 matrix E_ij with a single 1 at (i, j).
    pub fn elementary(i: usize, j: usize) -> Self {
        let mut m = Self::zeros(3);
        m[(i, j)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, col| self[(col, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Largest entry modulus.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm of `self - other`; panics on dimension mismatch.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |r, col| m[(r, col)])
    }
}

/// Serialized as a list of rows of `[re, im]` pairs.
impl serde::Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[C64]> = self.data.chunks(self.dim).collect();
        rows.serialize(s)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + col]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product, (A⊗B)|ij⟩ = A|i⟩⊗B|j⟩.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Adjacent pair of sites (1-based `first`, acting on `first` and `first + 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LegEmbedding {
    pub total_sites: usize,
    pub first: usize,
}

impl LegEmbedding {
    pub fn new(total_sites: usize, first: usize) -> Result<Self, TensorError> {
        if total_sites < 2 || first < 1 || first >= total_sites {
            return Err(TensorError::BadSlot(first, total_sites));
        }
        Ok(Self { total_sites, first })
    }

    pub fn s12() -> Self {
        Self { total_sites: 3, first: 1 }
    }

    pub fn s23() -> Self {
        Self { total_sites: 3, first: 2 }
    }
}

pub fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Place a two-site operator on the slot `e`, identity elsewhere.
pub fn embed(m: &ComplexMatrix, e: LegEmbedding) -> Result<ComplexMatrix, TensorError> {
    if m.dim() != 9 {
        return Err(TensorError::DimensionMismatch { expected: 9, got: m.dim() });
    }
    LegEmbedding::new(e.total_sites, e.first)?;
    let left = ComplexMatrix::identity(pow3(e.first - 1));
    let right = ComplexMatrix::identity(pow3(e.total_sites - e.first - 1));
    Ok(kron(&kron(&left, m), &right))
}

/// M ⊗ I_3 on three sites.
pub fn embed12(m: &ComplexMatrix) -> ComplexMatrix {
    kron(m, &ComplexMatrix::identity(3))
}

/// I_3 ⊗ M on three sites.
pub fn embed23(m: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(3), m)
}

/// Two-site operator acting on arbitrary sites (i, j), 0-based, of an L-site
/// chain. Used for the periodic wrap term (L-1, 0).
pub fn embed_pair(m: &ComplexMatrix, l: usize, i: usize, j: usize) -> ComplexMatrix {
    assert!(m.dim() == 9 && i < l && j < l && i != j);
    let n = pow3(l);
    let digit = |s: usize, p: usize| (s / pow3(l - 1 - p)) % 3;
    let mut out = ComplexMatrix::zeros(n);
    for col in 0..n {
        let (ci, cj) = (digit(col, i), digit(col, j));
        let rest = col - ci * pow3(l - 1 - i) - cj * pow3(l - 1 - j);
        for ri in 0..3 {
            for rj in 0..3 {
                let v = m[(3 * ri + rj, 3 * ci + cj)];
                if v != ZERO {
                    let row = rest + ri * pow3(l - 1 - i) + rj * pow3(l - 1 - j);
                    out[(row, col)] += v;
                }
            }
        }
    }
    out
}

/// Leg swap P|ab⟩ = |ba⟩.
pub fn permutation_operator() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(9);
    for a in 0..3 {
        for b in 0..3 {
            p[(3 * b + a, 3 * a + b)] = ONE;
        }
    }
    p
}

/// Total S^z on L sites: the basis label of each site summed.
pub fn spin_z(l: usize) -> ComplexMatrix {
    let n = pow3(l);
    let d: Vec<C64> = (0..n).map(|s| re(site_sum(s, l) as f64)).collect();
    ComplexMatrix::diag(&d)
}

/// Sum of the base-3 digits of basis index `s` on `l` sites.
pub fn site_sum(mut s: usize, l: usize) -> usize {
    let mut t = 0;
    for _ in 0..l {
        t += s % 3;
        s /= 3;
    }
    t
}

/// Relative sup-norm residual ‖x‖∞ / max(1, scale).
pub fn rel(x: f64, scale: f64) -> f64 {
    x / scale.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(kron(&i3, &i3), ComplexMatrix::identity(9));
    }

    #[test]
    fn kron_elementary_position() {
        let m = kron(&ComplexMatrix::elementary(0, 1), &ComplexMatrix::elementary(1, 0));
        // |01⟩ is index 1, |10⟩ is index 3
        for r in 0..9 {
            for col in 0..9 {
                let want = if (r, col) == (1, 3) { ONE } else { ZERO };
                assert_eq!(m[(r, col)], want);
            }
        }
    }

    #[test]
    fn kron_trace_multiplies() {
        let d = ComplexMatrix::diag(&[re(1.0), re(2.0), re(3.0)]);
        let m = kron(&d, &ComplexMatrix::identity(3));
        assert_eq!(m.trace(), re(18.0));
    }

    #[test]
    fn permutation_basics() {
        let p = permutation_operator();
        assert_eq!(p[(3, 1)], ONE);
        assert_eq!(p.matmul(&p), ComplexMatrix::identity(9));
        assert_eq!(p.trace(), re(3.0));
        assert_eq!(p.transpose(), p);
    }

    #[test]
    fn spin_z_labels() {
        assert_eq!(spin_z(1).diagonal(), vec![re(0.0), re(1.0), re(2.0)]);
        assert_eq!(spin_z(2)[(8, 8)], re(4.0));
    }

    #[test]
    fn embed_matches_definition() {
        let m = ComplexMatrix::from_fn(9, |r, col| c(r as f64, col as f64 * 0.5));
        assert_eq!(embed(&m, LegEmbedding::s12()).unwrap(), embed12(&m));
        assert_eq!(embed(&m, LegEmbedding::s23()).unwrap(), embed23(&m));
        assert_eq!(
            embed(&ComplexMatrix::identity(9), LegEmbedding::s12()).unwrap(),
            ComplexMatrix::identity(27)
        );
        assert!(embed(&ComplexMatrix::identity(3), LegEmbedding::s12()).is_err());
        assert!(LegEmbedding::new(3, 3).is_err());
    }

    #[test]
    fn embed_pair_agrees_with_adjacent_embed() {
        let m = ComplexMatrix::from_fn(9, |r, col| c((r * 9 + col) as f64, 1.0));
        assert_eq!(embed_pair(&m, 3, 0, 1), embed12(&m));
        assert_eq!(embed_pair(&m, 3, 1, 2), embed23(&m));
        // wrapped pair (2, 0) on two sites is P M P
        let p = permutation_operator();
        assert_eq!(embed_pair(&m, 2, 1, 0), p.matmul(&m).matmul(&p));
    }

    #[test]
    fn checked_constructor_rejects_nan() {
        let mut d = vec![ZERO; 9];
        d[4] = c(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::from_row_major(3, d),
            Err(TensorError::NonFinite { row: 1, col: 1 })
        ));
    }
}
