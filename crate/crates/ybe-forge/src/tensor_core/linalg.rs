use super::{site_sum, ComplexMatrix, TensorError, C64};
use nalgebra::DMatrix;

/// Pivot ratio below which a matrix is reported singular.
const SINGULAR_RATIO: f64 = 1e-14;

/// Set of basis indices spanning an invariant subspace, usually an S^z sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorProjector {
    pub indices: Vec<usize>,
}

impl SectorProjector {
    /// Basis states of `l` sites whose labels sum to `m`.
    pub fn spin(l: usize, m: usize) -> Self {
        let n = super::pow3(l);
        Self { indices: (0..n).filter(|&s| site_sum(s, l) == m).collect() }
    }

    pub fn full(dim: usize) -> Self {
        Self { indices: (0..dim).collect() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Restriction of `m` to the sector.
    pub fn block(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let ix = &self.indices;
        ComplexMatrix::from_fn(ix.len(), |r, c| m[(ix[r], ix[c])])
    }

    /// Largest entry coupling the sector to its complement.
    pub fn leakage(&self, m: &ComplexMatrix) -> f64 {
        let mut inside = vec![false; m.dim()];
        for &i in &self.indices {
            inside[i] = true;
        }
        let mut worst: f64 = 0.0;
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                if inside[r] != inside[c] {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// All eigenvalues of a square matrix, repeated by algebraic multiplicity.
/// Complex Schur form (Hessenberg reduction and shifted QR) from nalgebra.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>, TensorError> {
    match m.dim() {
        0 => return Ok(vec![]),
        1 => return Ok(vec![m[(0, 0)]]),
        _ => {}
    }
    let eps = 1e-15 * m.sup_norm().max(1.0);
    let t = match nalgebra::Schur::try_new(m.to_nalgebra(), eps, 10_000) {
        Some(schur) => schur.unpack().1,
        None => {
            // Shifted QR stalls on cyclic permutations; a fixed unit-triangular
            // similarity breaks the symmetry without changing the spectrum.
            let s = ComplexMatrix::from_fn(m.dim(), |r, c| {
                if r == c {
                    super::ONE
                } else if r > c {
                    C64::from_polar(0.37f64.powi((r - c) as i32), 0.9 * (r + 2 * c) as f64)
                } else {
                    super::ZERO
                }
            });
            let conj = inverse(&s)?.matmul(m).matmul(&s);
            nalgebra::Schur::try_new(conj.to_nalgebra(), eps, 10_000).ok_or(TensorError::NoConvergence)?.unpack().1
        }
    };
    Ok((0..m.dim()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of the block of `m` on `sector`; fails if `m` couples the
/// sector to the rest beyond 1e-10 (relative).
pub fn eig_sym_sector(m: &ComplexMatrix, sector: &SectorProjector) -> Result<Vec<C64>, TensorError> {
    let leakage = sector.leakage(m);
    if leakage > 1e-10 * m.sup_norm().max(1.0) {
        return Err(TensorError::SectorLeakage { leakage });
    }
    eigenvalues(&sector.block(m))
}

fn checked_lu(a: &ComplexMatrix) -> Result<nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>, TensorError> {
    let lu = a.to_nalgebra().lu();
    let u = lu.u();
    let piv: Vec<f64> = (0..a.dim()).map(|i| u[(i, i)].norm()).collect();
    let hi = piv.iter().cloned().fold(0.0, f64::max);
    let lo = piv.iter().cloned().fold(f64::INFINITY, f64::min);
    if a.dim() > 0 && (hi == 0.0 || lo <= SINGULAR_RATIO * hi) {
        let cond = if lo == 0.0 { f64::INFINITY } else { hi / lo };
        return Err(TensorError::Singular { cond });
    }
    Ok(lu)
}

/// Solve A x = b by partial-pivot LU.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>, TensorError> {
    if b.len() != a.dim() {
        return Err(TensorError::DimensionMismatch { expected: a.dim(), got: b.len() });
    }
    let lu = checked_lu(a)?;
    let rhs = DMatrix::from_column_slice(b.len(), 1, b);
    let x = lu.solve(&rhs).ok_or(TensorError::Singular { cond: f64::INFINITY })?;
    Ok(x.iter().cloned().collect())
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, TensorError> {
    let lu = checked_lu(a)?;
    let inv = lu.try_inverse().ok_or(TensorError::Singular { cond: f64::INFINITY })?;
    Ok(ComplexMatrix::from_nalgebra(&inv))
}
