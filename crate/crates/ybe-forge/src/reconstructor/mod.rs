//! Taylor-series reconstruction of R-matrices from a Hamiltonian (univariate,
//! Idzumi recursion) or from the boundary slice Ř(x, 0) (bivariate), the
//! zero-propagation mask and the no-go search over twists.

mod bivariate;
mod nogo;

pub use bivariate::{
    curve_boundary_series, reconstruct_bivariate, BiSeries, BivariateError, CurveChart, DEFAULT_PIN,
};
pub use nogo::{certify_no_go, ObstructionReport, SearchSpace, StartOutcome, TwistParams, Verdict};

use crate::model_catalog::{apply_twist_h, ModelError, TwistSpec};
use crate::tensor_core::{embed12, embed23, ComplexMatrix, C64, ZERO};
use serde::Serialize;

/// A consistency residual above this aborts a reconstruction.
pub const OBSTRUCTION_THRESHOLD: f64 = 1e-6;
/// Residuals below this count as an exact solution.
pub const EXISTENCE_THRESHOLD: f64 = 1e-10;

/// Ř(u) = Σ coeffs[k] (u − 1)^k, normalized so that Ř_aa^{aa}(u) = 1.
#[derive(Clone, Debug, Serialize)]
pub struct UniSeries {
    pub coeffs: Vec<ComplexMatrix>,
    pub norm_index: usize,
    /// Multiple of the identity added to the twisted H so that H_aa^{aa} = 0.
    pub normalization_shift: C64,
    /// Consistency residual of each coefficient (0 for orders 0 and 1).
    pub residual_by_order: Vec<f64>,
}

impl UniSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum UniOutcome {
    Series(UniSeries),
    Obstructed(ObstructionReport),
}

/// Three-site embeddings of each coefficient, grown as the series grows.
#[derive(Default)]
struct Embedded {
    e12: Vec<ComplexMatrix>,
    e23: Vec<ComplexMatrix>,
}

impl Embedded {
    fn push(&mut self, m: &ComplexMatrix) {
        self.e12.push(embed12(m));
        self.e23.push(embed23(m));
    }
}

fn three(a: usize, b: usize, c: usize) -> usize {
    9 * a + 3 * b + c
}

/// Q⁽ᵏ⁾ with Ř₁₂⁽ᵏ⁺¹⁾ − Ř₂₃⁽ᵏ⁺¹⁾ = Q⁽ᵏ⁾; needs coefficients 0..=k.
fn idzumi_q(emb: &Embedded, k: usize) -> ComplexMatrix {
    let (a, b) = (&emb.e12, &emb.e23);
    let (h12, h23) = (&a[1], &b[1]);
    let mut q = ComplexMatrix::zeros(27);
    let mut acc = |m: ComplexMatrix, w: f64| {
        if w != 0.0 {
            q = &q + &m.scale(C64::new(w, 0.0));
        }
    };
    for j in 0..=k {
        let ab = a[j].matmul(&b[k - j]);
        acc(ab.matmul(h12), 1.0);
        acc(h23.matmul(&a[k - j]).matmul(&b[j]), -1.0);
        let kj = (k - j) as f64;
        acc(ab, kj);
        acc(a[k - j].matmul(&b[j]), -kj);
    }
    for j in 1..=k {
        let w = (k - j + 1) as f64;
        acc(a[j].matmul(&b[k - j + 1]), w);
        acc(a[k - j + 1].matmul(&b[j]), -w);
    }
    q.scale(C64::new(1.0 / (k + 1) as f64, 0.0))
}

/// Solves X₁₂ − X₂₃ = Q for a two-site X with X_aa^{aa} = 0. Returns X and the
/// largest disagreement between redundant determinations of one entry.
fn extract(q: &ComplexMatrix, a: usize) -> (ComplexMatrix, f64) {
    let mut x = ComplexMatrix::zeros(9);
    let mut spread: f64 = 0.0;
    let mut vals = Vec::with_capacity(6);
    for b in 0..3 {
        for d in 0..3 {
            for c in 0..3 {
                for e in 0..3 {
                    if b == c && d == e {
                        continue;
                    }
                    vals.clear();
                    for s in 0..3 {
                        if d != e {
                            vals.push(-q[(three(s, b, d), three(s, c, e))]);
                        }
                        if b != c {
                            vals.push(q[(three(b, d, s), three(c, e, s))]);
                        }
                    }
                    let mean = vals.iter().sum::<C64>() / vals.len() as f64;
                    spread = vals.iter().fold(spread, |m, v| m.max((v - mean).norm()));
                    x[(3 * b + d, 3 * c + e)] = mean;
                }
            }
        }
    }
    // diagonal entries relative to the pinned one
    let mut diag = [[None::<C64>; 3]; 3];
    diag[a][a] = Some(ZERO);
    for b in (0..3).filter(|&b| b != a) {
        diag[a][b] = Some(-q[(three(a, a, b), three(a, a, b))]);
        diag[b][a] = Some(q[(three(b, a, a), three(b, a, a))]);
    }
    for b in 0..3 {
        for c in 0..3 {
            let v = match diag[b][c] {
                Some(v) => v,
                None => q[(three(b, c, a), three(b, c, a))] + diag[c][a].unwrap(),
            };
            x[(3 * b + c, 3 * b + c)] = v;
        }
    }
    (x, spread)
}

/// sup |X₁₂ − X₂₃ − Q|.
fn equation_residual(x: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
    (&(&embed12(x) - &embed23(x)) - q).sup_norm()
}

/// One step of the recursion: Ř⁽ᵏ⁺¹⁾ from coefficients 0..=k and its
/// consistency residual (spread of redundant determinations plus the
/// residual of the full three-site equation).
pub fn idzumi_step(series: &UniSeries, h: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let mut emb = Embedded::default();
    for (i, m) in series.coeffs.iter().enumerate() {
        emb.push(if i == 1 { h } else { m });
    }
    let k = series.order();
    if k == 0 {
        return (h.clone(), 0.0);
    }
    step(&emb, k, series.norm_index)
}

fn step(emb: &Embedded, k: usize, a: usize) -> (ComplexMatrix, f64) {
    let q = idzumi_q(emb, k);
    let (x, spread) = extract(&q, a);
    let r = spread + equation_residual(&x, &q);
    (x, r)
}

/// Pinned entry: a = 0, unless H neither maps |00⟩ anywhere nor is reached
/// from it while |22⟩ is coupled, in which case a = 2.
pub fn normalization_index(h: &ComplexMatrix) -> usize {
    let tol = 1e-14 * h.sup_norm().max(1.0);
    let isolated = |s: usize| (0..9).all(|t| h[(s, t)].norm() <= tol && h[(t, s)].norm() <= tol);
    if isolated(0) && !isolated(8) {
        2
    } else {
        0
    }
}

/// Series of a multiplicative Ř with Ř⁽¹⁾ = twisted, normalized H.
/// Stops at the first order whose residual exceeds [`OBSTRUCTION_THRESHOLD`].
pub fn series_from_hamiltonian(h: &ComplexMatrix, n: usize) -> UniSeries {
    let a = normalization_index(h);
    let shift = -h[(4 * a, 4 * a)];
    let h1 = h + &ComplexMatrix::identity(9).scale(shift);
    let mut emb = Embedded::default();
    let mut series = UniSeries {
        coeffs: vec![ComplexMatrix::identity(9), h1.clone()],
        norm_index: a,
        normalization_shift: shift,
        residual_by_order: vec![0.0, 0.0],
    };
    emb.push(&series.coeffs[0]);
    emb.push(&h1);
    for k in 1..n {
        let (x, r) = step(&emb, k, a);
        emb.push(&x);
        series.coeffs.push(x);
        series.residual_by_order.push(r);
        if !(r <= OBSTRUCTION_THRESHOLD) {
            break;
        }
    }
    series.coeffs.truncate(n + 1);
    series.residual_by_order.truncate(n + 1);
    series
}

/// Iterates the recursion to order `n` on apply_twist_h(H, twist).
pub fn reconstruct_univariate(h: &ComplexMatrix, n: usize, twist: &TwistSpec) -> Result<UniOutcome, ModelError> {
    let ht = apply_twist_h(h, twist)?;
    let series = series_from_hamiltonian(&ht, n.max(1));
    let failed = series.residual_by_order.iter().position(|r| !(*r <= OBSTRUCTION_THRESHOLD));
    Ok(match failed {
        None => UniOutcome::Series(series),
        Some(k) => UniOutcome::Obstructed(ObstructionReport::single(&series, k, n)),
    })
}

/// Partial sum with a geometric tail bound from the last two coefficient norms.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesValue {
    pub value: ComplexMatrix,
    pub tail_estimate: f64,
    /// Coefficients grow faster than |u − 1|⁻¹: the partial sum is unreliable.
    pub diverging: bool,
}

impl SeriesValue {
    pub fn within_tolerance(&self) -> bool {
        !self.diverging && self.tail_estimate < EXISTENCE_THRESHOLD
    }
}

pub(crate) fn geometric_tail(last: f64, prev: f64, t: f64, n: usize) -> (f64, bool) {
    if t == 0.0 || last == 0.0 {
        return (0.0, false);
    }
    let ratio = if prev > 0.0 { last / prev } else { f64::INFINITY };
    let q = ratio * t;
    if q >= 1.0 {
        return (f64::INFINITY, true);
    }
    (last * t.powi(n as i32) * q / (1.0 - q), false)
}

pub fn series_eval(series: &UniSeries, u: C64) -> SeriesValue {
    let t = u - 1.0;
    let mut value = ComplexMatrix::zeros(9);
    let mut p = C64::new(1.0, 0.0);
    for c in &series.coeffs {
        value = &value + &c.scale(p);
        p *= t;
    }
    let n = series.order();
    let norms: Vec<f64> = series.coeffs.iter().map(|c| c.sup_norm()).collect();
    let (tail_estimate, diverging) = if n >= 2 {
        geometric_tail(norms[n], norms[n - 1], t.norm(), n)
    } else {
        (0.0, false)
    };
    SeriesValue { value, tail_estimate, diverging }
}

/// Positions of Ř that may be nonzero for a multiplicative Ř built from H:
/// the ice rule, minus every row or column family whose H entries vanish.
/// A family fixes one digit of the row (or column) state and collects the
/// entries where that digit changes.
pub fn sparsity_mask(h: &ComplexMatrix) -> [[bool; 9]; 9] {
    let tol = 1e-14 * h.sup_norm().max(1.0);
    let digits = |s: usize| [s / 3, s % 3];
    let mut mask = [[false; 9]; 9];
    for (r, row) in mask.iter_mut().enumerate() {
        for (c, m) in row.iter_mut().enumerate() {
            *m = r / 3 + r % 3 == c / 3 + c % 3;
        }
    }
    // (digit position, fixed on the row side?)
    for pos in 0..2 {
        for row_side in [true, false] {
            for v in 0..3 {
                let members: Vec<(usize, usize)> = (0..9)
                    .flat_map(|r| (0..9).map(move |c| (r, c)))
                    .filter(|&(r, c)| {
                        let (fixed, other) = if row_side { (r, c) } else { (c, r) };
                        digits(fixed)[pos] == v && digits(other)[pos] != v
                    })
                    .collect();
                if members.iter().all(|&(r, c)| h[(r, c)].norm() <= tol) {
                    for (r, c) in members {
                        mask[r][c] = false;
                    }
                }
            }
        }
    }
    mask
}

pub fn mask_count(mask: &[[bool; 9]; 9]) -> usize {
    mask.iter().flatten().filter(|m| **m).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_catalog::h14;
    use crate::tensor_core::re;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let s = series_from_hamiltonian(&ComplexMatrix::zeros(9), 6);
        assert_eq!(s.order(), 6);
        for c in &s.coeffs[1..] {
            assert_eq!(c.sup_norm(), 0.0);
        }
    }

    #[test]
    fn first_step_returns_h() {
        let h = h14(re(2.0));
        let s = UniSeries {
            coeffs: vec![ComplexMatrix::identity(9)],
            norm_index: 0,
            normalization_shift: ZERO,
            residual_by_order: vec![0.0],
        };
        let (x, r) = idzumi_step(&s, &h);
        assert_eq!(x, h);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn fourteen_vertex_mask_has_fifteen_entries() {
        let m = sparsity_mask(&h14(re(1.0)));
        assert_eq!(mask_count(&m), 15);
        for (r, c) in [(3, 1), (4, 2), (6, 2), (7, 5)] {
            assert!(!m[r][c]);
        }
    }

    #[test]
    fn pinned_index_rule() {
        assert_eq!(normalization_index(&h14(re(2.0))), 2);
        assert_eq!(normalization_index(&ComplexMatrix::identity(9)), 0);
    }

    #[test]
    fn eval_at_one_is_identity() {
        let s = series_from_hamiltonian(&h14(re(2.0)), 3);
        let v = series_eval(&s, re(1.0));
        assert_eq!(v.value, ComplexMatrix::identity(9));
        assert_eq!(v.tail_estimate, 0.0);
    }
}
