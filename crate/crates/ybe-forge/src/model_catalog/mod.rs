//! Two-site Hamiltonians of the catalogue, periodic chains, and the
//! equivalence transformations (gauge, grading, telescoping, shifts).

mod gauge;
mod hamiltonians;
mod named;

pub use gauge::{find_diagonal_gauge, find_diagonal_gauge_with_tol, GaugeFit, GAUGE_TOL};
pub use hamiltonians::{
    gb_hamiltonian, gb_hamiltonian_with_upsilon, gb_upsilon, h14, h17, h17_as_printed,
    j_sixth, mb0_hamiltonian, Mb0Aux, J_DEFAULT,
};
pub use named::{parse_complex, Entry, ModelSpecFile, NamedModel, MODEL_NAMES};

use crate::tensor_core::{embed_pair, kron, ComplexMatrix, C64, ONE, ZERO};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameters within 1e-8 of a pole: {0}")]
    Pole(String),
    #[error("chain length {0} outside 2..=6")]
    ChainLength(usize),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("operator is not ice-rule: entry ({row}, {col}) = {value:e}")]
    NotIceRule { row: usize, col: usize, value: f64 },
    #[error("incompatible zero patterns at ({row}, {col})")]
    ZeroPattern { row: usize, col: usize },
    #[error("gauge fit failed: residual {residual:.3e}")]
    GaugeFitFailed { residual: f64 },
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("bad model parameters: {0}")]
    BadParams(String),
}

/// Distance to a pole locus below which constructors refuse to evaluate.
pub const POLE_GUARD: f64 = 1e-8;

pub(crate) fn guard(value: C64, what: &str) -> Result<(), ModelError> {
    if value.norm() < POLE_GUARD {
        Err(ModelError::Pole(what.to_string()))
    } else {
        Ok(())
    }
}

/// The nineteen couplings of the general U(1)-invariant two-site Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct HamiltonianParams {
    pub p: C64,
    pub q: C64,
    pub t1: C64,
    pub t2: C64,
    pub t3: C64,
    pub s1: C64,
    pub s2: C64,
    pub s3: C64,
    pub tp: C64,
    pub sp: C64,
    pub v: [[C64; 3]; 3],
}

/// (row, col) of each hopping coupling in the 9x9 matrix, index |ab⟩ = 3a+b.
const P_POS: (usize, usize) = (1, 3);
const Q_POS: (usize, usize) = (3, 1);
const T1_POS: (usize, usize) = (6, 4);
const S1_POS: (usize, usize) = (4, 6);
const T2_POS: (usize, usize) = (2, 4);
const S2_POS: (usize, usize) = (4, 2);
const T3_POS: (usize, usize) = (5, 7);
const S3_POS: (usize, usize) = (7, 5);
const TP_POS: (usize, usize) = (2, 6);
const SP_POS: (usize, usize) = (6, 2);

impl HamiltonianParams {
    fn hops(&self) -> [(C64, (usize, usize)); 10] {
        [
            (self.p, P_POS),
            (self.q, Q_POS),
            (self.t1, T1_POS),
            (self.s1, S1_POS),
            (self.t2, T2_POS),
            (self.s2, S2_POS),
            (self.t3, T3_POS),
            (self.s3, S3_POS),
            (self.tp, TP_POS),
            (self.sp, SP_POS),
        ]
    }

    /// Read the couplings back from an ice-rule matrix.
    pub fn from_matrix(h: &ComplexMatrix) -> Result<Self, ModelError> {
        if let Some((row, col, value)) = ice_violation(h, 0.0) {
            return Err(ModelError::NotIceRule { row, col, value });
        }
        let at = |(r, c): (usize, usize)| h[(r, c)];
        let mut v = [[ZERO; 3]; 3];
        for (a, row) in v.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x = h[(3 * a + b, 3 * a + b)];
            }
        }
        Ok(Self {
            p: at(P_POS),
            q: at(Q_POS),
            t1: at(T1_POS),
            s1: at(S1_POS),
            t2: at(T2_POS),
            s2: at(S2_POS),
            t3: at(T3_POS),
            s3: at(S3_POS),
            tp: at(TP_POS),
            sp: at(SP_POS),
            v,
        })
    }

    /// Parameter image under charge conjugation.
    pub fn charge_conjugated(&self) -> Self {
        let mut v = [[ZERO; 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.v[2 - i][2 - j];
            }
        }
        Self {
            p: self.s3,
            s3: self.p,
            q: self.t3,
            t3: self.q,
            t1: self.t2,
            t2: self.t1,
            s1: self.s2,
            s2: self.s1,
            tp: self.sp,
            sp: self.tp,
            v,
        }
    }
}

/// Assemble the 9x9 matrix; positions outside the 19-vertex pattern stay zero.
pub fn build_two_site(params: &HamiltonianParams) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(9);
    for (val, pos) in params.hops() {
        h[pos] = val;
    }
    for a in 0..3 {
        for b in 0..3 {
            h[(3 * a + b, 3 * a + b)] = params.v[a][b];
        }
    }
    h
}

/// First entry breaking the ice rule by more than `tol`, if any.
pub fn ice_violation(m: &ComplexMatrix, tol: f64) -> Option<(usize, usize, f64)> {
    let n = m.dim();
    let l = (n as f64).log(3.0).round() as usize;
    for r in 0..n {
        for c in 0..n {
            let v = m[(r, c)].norm();
            if v > tol && crate::tensor_core::site_sum(r, l) != crate::tensor_core::site_sum(c, l) {
                return Some((r, c, v));
            }
        }
    }
    None
}

/// Periodic (or open) chain H = Σ_j H_{j,j+1}.
pub fn build_chain(h2: &ComplexMatrix, l: usize, periodic: bool) -> Result<ComplexMatrix, ModelError> {
    if !(2..=6).contains(&l) {
        return Err(ModelError::ChainLength(l));
    }
    let mut h = ComplexMatrix::zeros(crate::tensor_core::pow3(l));
    for j in 0..l - 1 {
        h = &h + &embed_pair(h2, l, j, j + 1);
    }
    if periodic {
        h = &h + &embed_pair(h2, l, l - 1, 0);
    }
    Ok(h)
}

/// The equivalence transformations on a two-site Hamiltonian.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TwistSpec {
    /// Single-site gauge g, applied as (g⊗g) H (g⊗g)^{-1}.
    pub gauge_g: Option<ComplexMatrix3>,
    /// Grading parameter α: conjugation by e^{α s}⊗e^{-α s}.
    pub grading_alpha: Option<C64>,
    /// Diagonal of A for the telescopic term A⊗I − I⊗A.
    pub telescope_a: Option<[C64; 3]>,
    /// H → H + α I.
    pub identity_shift: C64,
    /// H → H + β (s⊗I + I⊗s).
    pub sz_shift: C64,
}

/// Serializable 3x3 matrix wrapper for `TwistSpec::gauge_g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix3(pub [[C64; 3]; 3]);

impl ComplexMatrix3 {
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(3, |r, c| self.0[r][c])
    }

    pub fn diag(d: [C64; 3]) -> Self {
        let mut m = [[ZERO; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        Self(m)
    }
}

impl TwistSpec {
    pub fn is_identity(&self) -> bool {
        *self == Self::default()
    }
}

/// Two-site S^z = s⊗I + I⊗s.
pub fn two_site_sz() -> ComplexMatrix {
    crate::tensor_core::spin_z(2)
}

/// e^{α s} on one site.
pub fn grading_factor(alpha: C64) -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, alpha.exp(), (alpha * 2.0).exp()])
}

/// Telescopic term A⊗I − I⊗A for diagonal A.
pub fn telescope_term(a: [C64; 3]) -> ComplexMatrix {
    let am = ComplexMatrix::diag(&a);
    let i3 = ComplexMatrix::identity(3);
    &kron(&am, &i3) - &kron(&i3, &am)
}

/// Apply a twist in the fixed order gauge → grading → telescope → identity
/// shift → S^z shift.
pub fn apply_twist_h(h: &ComplexMatrix, t: &TwistSpec) -> Result<ComplexMatrix, ModelError> {
    let mut out = h.clone();
    if let Some(g) = &t.gauge_g {
        let g = g.to_matrix();
        let gi = crate::tensor_core::inverse(&g).map_err(|_| ModelError::SingularGauge)?;
        out = kron(&g, &g).matmul(&out).matmul(&kron(&gi, &gi));
    }
    if let Some(alpha) = t.grading_alpha {
        let f = kron(&grading_factor(alpha), &grading_factor(-alpha));
        let fi = kron(&grading_factor(-alpha), &grading_factor(alpha));
        out = f.matmul(&out).matmul(&fi);
    }
    if let Some(a) = t.telescope_a {
        out = &out + &telescope_term(a);
    }
    let id = ComplexMatrix::identity(9).scale(t.identity_shift);
    let sz = two_site_sz().scale(t.sz_shift);
    Ok(&(&out + &id) + &sz)
}

/// Conjugation by X⊗X with X|j⟩ = |2−j⟩.
pub fn charge_conjugate(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.dim();
    let l = (n as f64).log(3.0).round() as usize;
    let flip = |s: usize| n - 1 - s;
    debug_assert_eq!(crate::tensor_core::pow3(l), n);
    ComplexMatrix::from_fn(n, |r, c| h[(flip(r), flip(c))])
}
