//! Hecke, Temperley–Lieb and BMW detection for a two-site operator, and the
//! corresponding Baxterized R-matrices.
//!
//! Every fit is affine: T = α H + β I, with (α, β) solved in closed form from
//! the eigenvalue clusters of H.

use crate::tensor_core::{
    eigenvalues, embed12, embed23, inverse, poly_roots, ComplexMatrix, TensorError, C64, ONE, ZERO,
};
use serde::Serialize;

/// Eigenvalues closer than this (relative to max(1, ‖H‖)) are one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;
/// Every algebra relation must hold to this relative accuracy.
pub const RELATION_TOL: f64 = 1e-10;
/// Baxterized matrices refuse spectral parameters this close to a pole.
pub const POLE_EXCLUSION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    Hecke,
    #[serde(rename = "TL")]
    TemperleyLieb,
    #[serde(rename = "BMW")]
    Bmw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BmwSign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraFit {
    pub family: Family,
    pub alpha_scale: C64,
    pub beta_shift: C64,
    /// ξ = T − T⁻¹ on the Hecke part (Hecke, BMW).
    pub xi: Option<C64>,
    /// TL loop parameter or BMW eigenvalue constant.
    pub a: Option<C64>,
    /// BMW: ξ = q − 1/q.
    pub q: Option<C64>,
    #[serde(skip)]
    pub t: ComplexMatrix,
    /// BMW: Z = T − T⁻¹ − ξ.
    #[serde(skip)]
    pub z: Option<ComplexMatrix>,
    pub residuals: Vec<(String, f64)>,
}

impl AlgebraFit {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BaxterError {
    #[error("minimal polynomial has degree {0}, the family needs at most {1}")]
    Degree(usize, usize),
    #[error("relation {name} fails: residual {residual:.3e}")]
    Relation { name: String, residual: f64 },
    #[error("degenerate constants: {0}")]
    Degenerate(&'static str),
    #[error("spectral parameter {0} is within the pole exclusion")]
    Pole(C64),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn rel_residual(m: &ComplexMatrix, scale: f64) -> f64 {
    m.sup_norm() / scale.max(1.0)
}

/// T₁₂T₂₃T₁₂ − T₂₃T₁₂T₂₃, relative sup norm.
pub fn braid_relation_residual(t: &ComplexMatrix) -> f64 {
    let (a, b) = (embed12(t), embed23(t));
    let lhs = a.matmul(&b).matmul(&a);
    let rhs = b.matmul(&a).matmul(&b);
    rel_residual(&(&lhs - &rhs), lhs.sup_norm().max(rhs.sup_norm()))
}

/// Distinct eigenvalues of a diagonalizable H, by clustering with
/// [`CLUSTER_GAP`]. Non-diagonalizable input reports one degree more than
/// the cluster count.
pub fn minimal_polynomial_roots(h: &ComplexMatrix) -> Result<Vec<C64>, BaxterError> {
    let scale = h.sup_norm().max(1.0);
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for ev in eigenvalues(h)? {
        match clusters.iter_mut().find(|(c, _)| (*c - ev).norm() < CLUSTER_GAP * scale) {
            Some((c, n)) => {
                *c = (*c * *n as f64 + ev) / (*n as f64 + 1.0);
                *n += 1;
            }
            None => clusters.push((ev, 1)),
        }
    }
    let roots: Vec<C64> = clusters.into_iter().map(|c| c.0).collect();
    let mut p = ComplexMatrix::identity(h.dim());
    for &r in &roots {
        p = p.matmul(&(h - &ComplexMatrix::identity(h.dim()).scale(r)));
    }
    if rel_residual(&p, scale.powi(roots.len() as i32)) > 1e-8 {
        return Err(BaxterError::Degree(roots.len() + 1, roots.len()));
    }
    Ok(roots)
}

/// Projector onto the eigenspace of `roots[k]` (Lagrange interpolation).
fn spectral_projector(h: &ComplexMatrix, roots: &[C64], k: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(h.dim());
    let mut p = id.clone();
    for (j, &r) in roots.iter().enumerate() {
        if j != k {
            p = p.matmul(&(h - &id.scale(r))).scale(ONE / (roots[k] - r));
        }
    }
    p
}

/// Best κ with M ≈ κ N (least squares) and the relative misfit.
fn proportionality(m: &ComplexMatrix, n: &ComplexMatrix) -> (C64, f64) {
    let num: C64 = m.data().iter().zip(n.data()).map(|(a, b)| a * b.conj()).sum();
    let den: f64 = n.data().iter().map(|b| b.norm_sqr()).sum();
    if den == 0.0 {
        return (ZERO, m.sup_norm());
    }
    let k = num / den;
    (k, rel_residual(&(m - &n.scale(k)), m.sup_norm()))
}

fn require(name: &str, residual: f64) -> Result<(String, f64), BaxterError> {
    if residual <= RELATION_TOL {
        Ok((name.to_string(), residual))
    } else {
        Err(BaxterError::Relation { name: name.to_string(), residual })
    }
}

fn affine(h: &ComplexMatrix, alpha: C64, beta: C64) -> ComplexMatrix {
    &h.scale(alpha) + &ComplexMatrix::identity(h.dim()).scale(beta)
}

/// T = αH + β with T − T⁻¹ = ξ and the braid relation.
///
/// Writing H = λ₂ + (λ₁ − λ₂)E, the braid relation for T = c + dE reduces to
/// E₁E₂E₁ − E₂E₁E₂ = κ(E₁ − E₂) with (c/d)(c/d + 1) = −κ, and Hecke fixes
/// c(c + d) = −1.
pub fn hecke_fit(h: &ComplexMatrix) -> Result<AlgebraFit, BaxterError> {
    let roots = minimal_polynomial_roots(h)?;
    if roots.len() > 2 {
        return Err(BaxterError::Degree(roots.len(), 2));
    }
    if roots.len() < 2 {
        return Err(BaxterError::Degenerate("H is a multiple of the identity"));
    }
    let (l1, l2) = (roots[0], roots[1]);
    let e = spectral_projector(h, &roots, 0);
    let (e1, e2) = (embed12(&e), embed23(&e));
    let lhs = &e1.matmul(&e2).matmul(&e1) - &e2.matmul(&e1).matmul(&e2);
    let (kappa, misfit) = proportionality(&lhs, &(&e1 - &e2));
    let mut residuals = vec![require("braid_projector", misfit)?];
    if kappa.norm() < 1e-12 {
        return Err(BaxterError::Degenerate("κ = 0: T would not be invertible"));
    }
    let r = (-1.0 + (1.0 - 4.0 * kappa).sqrt()) / 2.0;
    let d = ONE / kappa.sqrt();
    let c = r * d;
    let alpha = d / (l1 - l2);
    let beta = c - alpha * l2;
    let xi = 2.0 * c + d;
    let t = affine(h, alpha, beta);
    let ti = inverse(&t)?;
    residuals.push(require(
        "hecke",
        rel_residual(&(&(&t - &ti) - &ComplexMatrix::identity(9).scale(xi)), t.sup_norm()),
    )?);
    residuals.push(require("braid", braid_relation_residual(&t))?);
    Ok(AlgebraFit { family: Family::Hecke, alpha_scale: alpha, beta_shift: beta, xi: Some(xi), a: None, q: None, t, z: None, residuals })
}

/// Ř(z) = zT − z⁻¹T⁻¹, with T⁻¹ = T − ξ.
pub fn hecke_baxterize(fit: &AlgebraFit, z: C64) -> Result<ComplexMatrix, BaxterError> {
    if z.norm() < POLE_EXCLUSION {
        return Err(BaxterError::Pole(z));
    }
    let xi = fit.xi.ok_or(BaxterError::Degenerate("fit carries no ξ"))?;
    let ti = &fit.t - &ComplexMatrix::identity(9).scale(xi);
    Ok(&fit.t.scale(z) - &ti.scale(ONE / z))
}

/// 𝔱 = T + 1 with 𝔱² = 2a𝔱 and 𝔱ᵢ𝔱ᵢ₊₁𝔱ᵢ = 𝔱ᵢ (both neighbours).
pub fn tl_fit(h: &ComplexMatrix) -> Result<AlgebraFit, BaxterError> {
    let roots = minimal_polynomial_roots(h)?;
    let id = ComplexMatrix::identity(9);
    if roots.len() == 1 {
        // 𝔱 = 0: every a is admissible; a = 0 keeps √(a² − 1) = i
        return Ok(AlgebraFit {
            family: Family::TemperleyLieb,
            alpha_scale: ZERO,
            beta_shift: -ONE,
            xi: None,
            a: Some(ZERO),
            q: None,
            t: id.scale(-ONE),
            z: None,
            residuals: vec![("tl_square".into(), 0.0), ("tl_triple".into(), 0.0)],
        });
    }
    if roots.len() > 2 {
        return Err(BaxterError::Degree(roots.len(), 2));
    }
    let mut last_err = BaxterError::Degenerate("no projector choice satisfies the TL relations");
    for k in 0..2 {
        let e = spectral_projector(h, &roots, k);
        let (e1, e2) = (embed12(&e), embed23(&e));
        let (mu, misfit) = proportionality(&e1.matmul(&e2).matmul(&e1), &e1);
        if misfit > RELATION_TOL || mu.norm() < 1e-12 {
            last_err = BaxterError::Relation { name: "tl_triple".into(), residual: misfit };
            continue;
        }
        // 𝔱 = sE with s² μ = 1
        let s = ONE / mu.sqrt();
        let a = s / 2.0;
        if (a * a - 1.0).norm() < 1e-12 {
            return Err(BaxterError::Degenerate("a² = 1"));
        }
        let other = roots[1 - k];
        let alpha = s / (roots[k] - other);
        let beta = -alpha * other - 1.0;
        let t = affine(h, alpha, beta);
        let tt = &t + &id;
        let (t1, t2) = (embed12(&tt), embed23(&tt));
        let res = (|| {
            Ok::<_, BaxterError>(vec![
                require("tl_square", rel_residual(&(&tt.matmul(&tt) - &tt.scale(2.0 * a)), tt.sup_norm().powi(2)))?,
                require("tl_triple", rel_residual(&(&t1.matmul(&t2).matmul(&t1) - &t1), t1.sup_norm().powi(3)))?,
                require(
                    "tl_triple_mirrored",
                    rel_residual(&(&t2.matmul(&t1).matmul(&t2) - &t2), t2.sup_norm().powi(3)),
                )?,
            ])
        })();
        match res {
            Ok(residuals) => {
                return Ok(AlgebraFit {
                    family: Family::TemperleyLieb,
                    alpha_scale: alpha,
                    beta_shift: beta,
                    xi: None,
                    a: Some(a),
                    q: None,
                    t,
                    z: None,
                    residuals,
                })
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Ř(z) = 𝔱 − a + (z+1)/(z−1)·√(a² − 1), principal square root.
pub fn tl_baxterize(fit: &AlgebraFit, z: C64) -> Result<ComplexMatrix, BaxterError> {
    if (z - 1.0).norm() < POLE_EXCLUSION {
        return Err(BaxterError::Pole(z));
    }
    let a = fit.a.ok_or(BaxterError::Degenerate("fit carries no a"))?;
    let id = ComplexMatrix::identity(9);
    let c = -a + (z + 1.0) / (z - 1.0) * (a * a - 1.0).sqrt();
    Ok(&(&fit.t + &id) + &id.scale(c))
}

fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_add(p: &[C64], q: &[C64], sign: f64) -> Vec<C64> {
    let mut out = vec![ZERO; p.len().max(q.len())];
    for (i, a) in p.iter().enumerate() {
        out[i] += a;
    }
    for (i, b) in q.iter().enumerate() {
        out[i] += b * sign;
    }
    out
}

/// BMW relations of a candidate T, with Z = T − T⁻¹ − ξ.
fn bmw_residuals(t: &ComplexMatrix, xi: C64, a: C64) -> Result<(ComplexMatrix, Vec<(String, f64)>), BaxterError> {
    let id = ComplexMatrix::identity(9);
    let ti = inverse(t)?;
    let z = &(t - &ti) - &id.scale(xi);
    let s = z.sup_norm().max(1.0) * t.sup_norm().max(1.0);
    let (z1, z2) = (embed12(&z), embed23(&z));
    let (t1, ti1) = (embed12(t), embed12(&ti));
    let (t2, ti2) = (embed23(t), embed23(&ti));
    let zs = z.sup_norm().max(1.0);
    let zz = zs * zs * t.sup_norm().max(ti.sup_norm()).max(1.0);
    let res = vec![
        ("braid".to_string(), braid_relation_residual(t)),
        ("zt".to_string(), rel_residual(&(&z.matmul(t) + &z.scale(a)), s)),
        ("tz".to_string(), rel_residual(&(&t.matmul(&z) + &z.scale(a)), s)),
        // Zᵢ T_{i−1}^{±1} Zᵢ with i = 2 on three sites
        ("z2_t1_z2".to_string(), rel_residual(&(&z2.matmul(&t1).matmul(&z2) - &z2.scale(xi / a)), zz)),
        ("z2_t1inv_z2".to_string(), rel_residual(&(&z2.matmul(&ti1).matmul(&z2) - &z2.scale(xi * a)), zz)),
        ("z1_t2_z1".to_string(), rel_residual(&(&z1.matmul(&t2).matmul(&z1) - &z1.scale(xi / a)), zz)),
        ("z1_t2inv_z1".to_string(), rel_residual(&(&z1.matmul(&ti2).matmul(&z1) - &z1.scale(xi * a)), zz)),
    ];
    Ok((z, res))
}

/// T = αH + β with eigenvalues {q, −1/q, −a}; Z is supported on the −a
/// eigenspace. With the roles of the three eigenvalue clusters fixed, α, β
/// and a are rational in q and the relation Z₂T₁Z₂ = ξa⁻¹Z₂ becomes a
/// sextic in q. Operators with two clusters fit as Hecke with Z = 0.
pub fn bmw_fit(h: &ComplexMatrix) -> Result<AlgebraFit, BaxterError> {
    let roots = minimal_polynomial_roots(h)?;
    if roots.len() <= 2 {
        let hk = hecke_fit(h)?;
        let (_, residuals) = bmw_residuals(&hk.t, hk.xi.unwrap(), ONE)?;
        let residuals: Vec<_> = residuals.into_iter().filter(|r| r.0 == "braid").chain(hk.residuals).collect();
        let xi = hk.xi.unwrap();
        // q − 1/q = ξ, the root near the eigenvalue q of T
        let q = (xi + (xi * xi + 4.0).sqrt()) / 2.0;
        return Ok(AlgebraFit { family: Family::Bmw, q: Some(q), a: None, z: Some(ComplexMatrix::zeros(9)), residuals, ..hk });
    }
    if roots.len() > 3 {
        return Err(BaxterError::Degree(roots.len(), 3));
    }
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<(f64, AlgebraFit)> = None;
    for p in perms {
        let (l1, l2, l3) = (roots[p[0]], roots[p[1]], roots[p[2]]);
        let delta = l1 - l2;
        let e = spectral_projector(h, &roots, p[2]);
        let e2 = embed23(&e);
        let (hv, misfit) = proportionality(&e2.matmul(&embed12(h)).matmul(&e2), &e2);
        if misfit > 1e-8 {
            continue;
        }
        // q·(αh + β) = P1(q), q·a = PA(q), q·ξ = PX(q)
        let p1 = [(hv - l1) / delta, ZERO, (hv - l2) / delta];
        let pa = [-(l3 - l1) / delta, ZERO, -(l3 - l2) / delta];
        let px = [-ONE, ZERO, ONE];
        let q2 = [ZERO, ZERO, ONE];
        let inner = poly_add(&poly_add(&q2, &poly_mul(&pa, &pa), -1.0), &poly_mul(&pa, &px), -1.0);
        let sextic = poly_add(&poly_mul(&p1, &inner), &poly_mul(&px, &q2), -1.0);
        let Ok(cands) = poly_roots(&sextic) else { continue };
        for q in cands {
            if q.norm() < 1e-8 || !q.is_finite() {
                continue;
            }
            let alpha = (q * q + 1.0) / (q * delta);
            let beta = q - alpha * l1;
            let a = -(alpha * l3 + beta);
            let xi = q - ONE / q;
            if a.norm() < 1e-10 {
                continue;
            }
            let t = affine(h, alpha, beta);
            let Ok((z, residuals)) = bmw_residuals(&t, xi, a) else { continue };
            let worst = residuals.iter().filter(|r| !r.0.starts_with("z1")).map(|r| r.1).fold(0.0, f64::max);
            if best.as_ref().is_none_or(|b| worst < b.0) {
                let fit = AlgebraFit {
                    family: Family::Bmw,
                    alpha_scale: alpha,
                    beta_shift: beta,
                    xi: Some(xi),
                    a: Some(a),
                    q: Some(q),
                    t,
                    z: Some(z),
                    residuals,
                };
                best = Some((worst, fit));
            }
        }
    }
    let (worst, fit) = best.ok_or(BaxterError::Degenerate("no eigenvalue assignment admits a BMW solution"))?;
    if worst > RELATION_TOL {
        let name = fit.residuals.iter().filter(|r| !r.0.starts_with("z1")).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        return Err(BaxterError::Relation { name: name.0.clone(), residual: worst });
    }
    Ok(fit)
}

/// Ř^{(±)}(z) = T + a±z²/(1 − a±z²)·Z − ξz²/(z² − 1)·I with a± = ∓a q^{±1}.
/// The identity term carries the sign under which the braided YBE holds.
pub fn bmw_baxterize(fit: &AlgebraFit, z: C64, sign: BmwSign) -> Result<ComplexMatrix, BaxterError> {
    let xi = fit.xi.ok_or(BaxterError::Degenerate("fit carries no ξ"))?;
    let q = fit.q.ok_or(BaxterError::Degenerate("fit carries no q"))?;
    let id = ComplexMatrix::identity(9);
    let z2 = z * z;
    if (z2 - 1.0).norm() < POLE_EXCLUSION {
        return Err(BaxterError::Pole(z));
    }
    let mut out = &fit.t - &id.scale(xi * z2 / (z2 - 1.0));
    if let (Some(a), Some(zm)) = (fit.a, &fit.z) {
        let apm = match sign {
            BmwSign::Plus => -a * q,
            BmwSign::Minus => a / q,
        };
        if (1.0 - apm * z2).norm() < POLE_EXCLUSION {
            return Err(BaxterError::Pole(z));
        }
        out = &out + &zm.scale(apm * z2 / (1.0 - apm * z2));
    }
    Ok(out)
}

/// Every family whose fit succeeds.
pub fn detect_families(h: &ComplexMatrix) -> Vec<AlgebraFit> {
    [hecke_fit(h), tl_fit(h), bmw_fit(h)].into_iter().filter_map(Result::ok).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{c, permutation_operator, re};

    #[test]
    fn braid_trivial_cases() {
        assert_eq!(braid_relation_residual(&ComplexMatrix::identity(9)), 0.0);
        assert!(braid_relation_residual(&permutation_operator()) < 1e-15);
        let g = ComplexMatrix::from_fn(9, |r, c| re(((r * 7 + c * 3) % 5) as f64 - 2.0));
        assert!(braid_relation_residual(&g) > 1e-3);
    }

    #[test]
    fn permutation_is_hecke() {
        let h = &permutation_operator().scale(re(2.0)) + &ComplexMatrix::identity(9).scale(c(0.1, 0.3));
        let fit = hecke_fit(&h).unwrap();
        assert!(fit.max_residual() <= RELATION_TOL);
        let r1 = hecke_baxterize(&fit, ONE).unwrap();
        assert!(r1.dist(&ComplexMatrix::identity(9).scale(fit.xi.unwrap())) < 1e-12);
    }

    #[test]
    fn identity_fits_tl_trivially() {
        let fit = tl_fit(&ComplexMatrix::identity(9).scale(re(3.0))).unwrap();
        let r = tl_baxterize(&fit, re(2.0)).unwrap();
        let d = r[(0, 0)];
        assert!(r.dist(&ComplexMatrix::identity(9).scale(d)) < 1e-15);
        assert!(hecke_fit(&ComplexMatrix::identity(9)).is_err());
    }

    #[test]
    fn pole_guards() {
        let fit = tl_fit(&ComplexMatrix::identity(9)).unwrap();
        assert!(matches!(tl_baxterize(&fit, re(1.0005)), Err(BaxterError::Pole(_))));
    }
}
