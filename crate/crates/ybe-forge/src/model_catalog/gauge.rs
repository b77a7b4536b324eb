//! Fit of a diagonal gauge, grading, identity shift and S^z shift mapping
//! one ice-rule Hamiltonian onto another.
//!
//! For an ice-rule operator only two combinations of (g, α) act on the
//! off-diagonal entries: κ = g₁²/g₂ and c = e^{2α}. Entry (r, col) is scaled by
//! κ^m c^n with m = (n₁(r) − n₁(col))/2, n₁ the number of sites in state 1,
//! and n = ((r₁−r₂) − (col₁−col₂))/2. The fit returns g = diag(1, √κ, 1).

use super::{ice_violation, ComplexMatrix3, ModelError, TwistSpec};
use crate::tensor_core::{ComplexMatrix, C64, ONE, ZERO};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GaugeFit {
    pub twist: TwistSpec,
    pub kappa: C64,
    pub grading_c: C64,
    /// ‖twist(H1) − H2‖∞ / max(1, ‖H1‖∞, ‖H2‖∞).
    pub residual: f64,
}

/// Success threshold on the relative residual.
pub const GAUGE_TOL: f64 = 1e-9;

struct Ratio {
    m: i32,
    n: i32,
    h1: C64,
    h2: C64,
}

fn digits(s: usize) -> (i32, i32) {
    ((s / 3) as i32, (s % 3) as i32)
}

fn ones(s: usize) -> i32 {
    let (a, b) = digits(s);
    (a == 1) as i32 + (b == 1) as i32
}

fn exponents(r: usize, col: usize) -> (i32, i32) {
    let (r1, r2) = digits(r);
    let (c1, c2) = digits(col);
    ((ones(r) - ones(col)) / 2, ((r1 - r2) - (c1 - c2)) / 2)
}

fn roots(z: C64, n: i32) -> Vec<C64> {
    let k = n.unsigned_abs();
    let base = if n < 0 { ONE / z } else { z };
    let r0 = base.powf(1.0 / k as f64);
    (0..k)
        .map(|j| r0 * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64))
        .collect()
}

fn twist_of(kappa: C64, cg: C64, shift: C64, beta: C64) -> TwistSpec {
    TwistSpec {
        gauge_g: Some(ComplexMatrix3::diag([ONE, kappa.sqrt(), ONE])),
        grading_alpha: Some(cg.ln() * 0.5),
        telescope_a: None,
        identity_shift: shift,
        sz_shift: beta,
    }
}

/// Least-squares fit of H2_diag − H1_diag = s + β(a+b).
fn fit_diagonal(h1: &ComplexMatrix, h2: &ComplexMatrix) -> (C64, C64) {
    // normal equations for the two unknowns
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    let (mut b1, mut b2) = (ZERO, ZERO);
    for i in 0..9 {
        let (a, b) = digits(i);
        let w = (a + b) as f64;
        let d = h2[(i, i)] - h1[(i, i)];
        s11 += 1.0;
        s12 += w;
        s22 += w * w;
        b1 += d;
        b2 += d * w;
    }
    let det = s11 * s22 - s12 * s12;
    let s = (b1 * s22 - b2 * s12) / det;
    let beta = (b2 * s11 - b1 * s12) / det;
    (s, beta)
}

fn residual_of(h1: &ComplexMatrix, h2: &ComplexMatrix, t: &TwistSpec, scale: f64) -> f64 {
    match super::apply_twist_h(h1, t) {
        Ok(m) => m.dist(h2) / scale,
        Err(_) => f64::INFINITY,
    }
}

pub fn find_diagonal_gauge(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<GaugeFit, ModelError> {
    find_diagonal_gauge_with_tol(h1, h2, GAUGE_TOL)
}

/// As [`find_diagonal_gauge`] with a caller-chosen success threshold, for
/// inputs that carry finite-difference error.
pub fn find_diagonal_gauge_with_tol(h1: &ComplexMatrix, h2: &ComplexMatrix, tol: f64) -> Result<GaugeFit, ModelError> {
    let scale = h1.sup_norm().max(h2.sup_norm()).max(1.0);
    let thr = 1e-12 * scale;
    for h in [h1, h2] {
        if let Some((row, col, value)) = ice_violation(h, thr) {
            return Err(ModelError::NotIceRule { row, col, value });
        }
    }
    let mut ratios = Vec::new();
    for r in 0..9 {
        for col in 0..9 {
            if r == col || crate::tensor_core::site_sum(r, 2) != crate::tensor_core::site_sum(col, 2) {
                continue;
            }
            let (a, b) = (h1[(r, col)], h2[(r, col)]);
            match (a.norm() > thr, b.norm() > thr) {
                (true, true) => {
                    let (m, n) = exponents(r, col);
                    ratios.push(Ratio { m, n, h1: a, h2: b });
                }
                (false, false) => {}
                _ => return Err(ModelError::ZeroPattern { row: r, col }),
            }
        }
    }

    // candidate values for c = e^{2α}
    let mut cands: Vec<C64> = Vec::new();
    for e in ratios.iter().filter(|e| e.m == 0 && e.n != 0) {
        cands.extend(roots(e.h2 / e.h1, e.n));
    }
    for (i, e) in ratios.iter().enumerate() {
        for f in ratios.iter().skip(i + 1) {
            if e.m == 0 || f.m == 0 {
                continue;
            }
            let (z, n) = if e.m == -f.m {
                ((e.h2 / e.h1) * (f.h2 / f.h1), e.n + f.n)
            } else {
                ((e.h2 / e.h1) / (f.h2 / f.h1), e.n - f.n)
            };
            if n != 0 {
                cands.extend(roots(z, n));
            }
        }
    }
    if cands.is_empty() {
        cands.push(ONE);
    }

    let mut best: Option<GaugeFit> = None;
    for cg in cands {
        let kappa = ratios
            .iter()
            .find(|e| e.m != 0)
            .map(|e| {
                let k = e.h2 / (e.h1 * cg.powi(e.n));
                if e.m > 0 { k } else { ONE / k }
            })
            .unwrap_or(ONE);
        let (kappa, cg) = refine(&ratios, kappa, cg);
        let (s, beta) = fit_diagonal(h1, h2);
        let twist = twist_of(kappa, cg, s, beta);
        let residual = residual_of(h1, h2, &twist, scale);
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(GaugeFit { twist, kappa, grading_c: cg, residual });
        }
    }
    let best = best.expect("at least one candidate");
    if best.residual <= tol {
        Ok(best)
    } else {
        Err(ModelError::GaugeFitFailed { residual: best.residual })
    }
}

/// Gauss-Newton on (log κ, log c) with residuals h1·κ^m c^n − h2.
fn refine(ratios: &[Ratio], kappa: C64, cg: C64) -> (C64, C64) {
    let (mut lk, mut lc) = (kappa.ln(), cg.ln());
    for _ in 0..8 {
        // normal equations J^H J δ = −J^H r with J_e = f_e·(m, n)
        let (mut a11, mut a12, mut a22) = (ZERO, ZERO, ZERO);
        let (mut g1, mut g2) = (ZERO, ZERO);
        let mut worst: f64 = 0.0;
        for e in ratios {
            let f = e.h1 * (lk * e.m as f64 + lc * e.n as f64).exp();
            let r = f - e.h2;
            worst = worst.max(r.norm());
            let (j1, j2) = (f * e.m as f64, f * e.n as f64);
            a11 += j1.conj() * j1;
            a12 += j1.conj() * j2;
            a22 += j2.conj() * j2;
            g1 += j1.conj() * r;
            g2 += j2.conj() * r;
        }
        if worst < 1e-15 {
            break;
        }
        let a21 = a12.conj();
        let det = a11 * a22 - a12 * a21;
        if det.norm() > 1e-300 {
            lk -= (a22 * g1 - a12 * g2) / det;
            lc -= (a11 * g2 - a21 * g1) / det;
        } else if a11.norm() > 1e-300 {
            lk -= g1 / a11;
        } else if a22.norm() > 1e-300 {
            lc -= g2 / a22;
        } else {
            break;
        }
    }
    (lk.exp(), lc.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_catalog::{apply_twist_h, gb_hamiltonian, J_DEFAULT};
    use crate::tensor_core::{c, re};

    #[test]
    fn identical_inputs_give_identity_twist() {
        let h = gb_hamiltonian(c(0.3, 0.4), re(1.1), re(0.7), J_DEFAULT).unwrap();
        let fit = find_diagonal_gauge(&h, &h).unwrap();
        assert!((fit.kappa - ONE).norm() < 1e-12 && (fit.grading_c - ONE).norm() < 1e-12);
        assert!(fit.residual < 1e-14);
    }

    #[test]
    fn recovers_known_twist() {
        let h = gb_hamiltonian(c(0.3, 0.4), re(1.1), re(0.7), J_DEFAULT).unwrap();
        let t = TwistSpec {
            gauge_g: Some(ComplexMatrix3::diag([ONE, c(0.8, 0.3), c(1.4, -0.2)])),
            grading_alpha: Some(c(0.25, -0.6)),
            identity_shift: c(0.1, 0.2),
            sz_shift: re(-0.35),
            ..Default::default()
        };
        let h2 = apply_twist_h(&h, &t).unwrap();
        let fit = find_diagonal_gauge(&h, &h2).unwrap();
        assert!(fit.residual < 1e-12, "{}", fit.residual);
        assert!((fit.twist.sz_shift - re(-0.35)).norm() < 1e-12);
    }

    #[test]
    fn zero_pattern_mismatch_reported() {
        let h = gb_hamiltonian(c(0.3, 0.4), re(1.1), re(0.7), J_DEFAULT).unwrap();
        let mut h2 = h.clone();
        h2[(1, 3)] = ZERO;
        assert!(matches!(find_diagonal_gauge(&h, &h2), Err(ModelError::ZeroPattern { row: 1, col: 3 })));
    }
}
