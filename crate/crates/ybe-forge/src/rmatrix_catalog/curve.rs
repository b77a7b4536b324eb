//! Spectral curves of the main and special branches, point sampling, and the
//! special-branch R-matrix.

use super::{Arity, RError, RMatrixModel, SpectralArg};
use crate::model_catalog::{j_sixth, POLE_GUARD};
use crate::tensor_core::{poly_deriv, poly_eval, poly_roots, ComplexMatrix, C64, ONE, ZERO};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Residual bound for a point to count as on the curve.
pub const CURVE_TOL: f64 = 1e-10;
/// Margin kept from denominator zeros when sampling.
pub const SAMPLE_MARGIN: f64 = 1e-4;
/// Both polynomials have degree ≤ 8 in each variable; 16 samples avoid aliasing.
const DFT_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum CurveBranch {
    Mb { alpha: C64, beta: C64 },
    Sb { lambda4: C64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub branch: CurveBranch,
    /// Root of j² − j + 1 = 0 (used by the special branch only).
    pub j: C64,
}

impl CurveSpec {
    pub fn sb(lambda4: C64) -> Self {
        Self { branch: CurveBranch::Sb { lambda4 }, j: j_sixth() }
    }

    pub fn mb(alpha: C64, beta: C64) -> Self {
        Self { branch: CurveBranch::Mb { alpha, beta }, j: j_sixth() }
    }

    /// The displayed polynomial F(a, b).
    pub fn poly(&self, a: C64, b: C64) -> C64 {
        let (a2, b2) = (a * a, b * b);
        let g = a2 * a2 + a2 * b2 + b2 * b2;
        match self.branch {
            CurveBranch::Sb { lambda4 } => (a2 + self.j * b2) * (g + lambda4 * a * b) + b2 - a2,
            CurveBranch::Mb { alpha, beta } => {
                let ab = alpha * beta;
                let ab_ = a * b;
                (ab - 1.0) * g * g + (2.0 - ab + alpha * alpha + beta * beta) * (beta * g + ab_) * ab_
                    - (ab - 2.0) * a2 * a2
                    + beta * beta * a2 * b2
                    - (2.0 - ab + beta * beta) * b2 * b2
                    - 2.0 * beta * ab_
                    - 1.0
            }
        }
    }

    /// Ascending coefficients of F(a, ·), read off by a DFT on the unit circle.
    pub fn b_coefficients(&self, a: C64) -> Vec<C64> {
        dft_coefficients(|b| self.poly(a, b))
    }

    /// Ascending coefficients of F(·, b).
    pub fn a_coefficients(&self, b: C64) -> Vec<C64> {
        dft_coefficients(|a| self.poly(a, b))
    }

    pub(crate) fn partials(&self, a: C64, b: C64) -> (C64, C64) {
        let fa = poly_eval(&poly_deriv(&self.a_coefficients(b)), a);
        let fb = poly_eval(&poly_deriv(&self.b_coefficients(a)), b);
        (fa, fb)
    }
}

fn dft_coefficients(f: impl Fn(C64) -> C64) -> Vec<C64> {
    let n = DFT_POINTS;
    let samples: Vec<C64> = (0..n).map(|k| f(C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))).collect();
    let mut out: Vec<C64> = (0..=8)
        .map(|m| {
            let s: C64 = samples
                .iter()
                .enumerate()
                .map(|(k, &v)| v * C64::from_polar(1.0, -2.0 * PI * (k * m) as f64 / n as f64))
                .sum();
            s / n as f64
        })
        .collect();
    // exact integers come back with ~1e-16 noise
    let scale = out.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in out.iter_mut() {
        if z.norm() <= 1e-15 * scale {
            *z = ZERO;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub a: C64,
    pub b: C64,
}

impl CurvePoint {
    pub fn new(a: C64, b: C64) -> Self {
        Self { a, b }
    }
}

pub fn curve_residual(pt: &CurvePoint, spec: &CurveSpec) -> f64 {
    spec.poly(pt.a, pt.b).norm()
}

fn polish(spec: &CurveSpec, a: C64, mut b: C64) -> Result<CurvePoint, RError> {
    let p = spec.b_coefficients(a);
    let dp = poly_deriv(&p);
    for _ in 0..30 {
        let d = poly_eval(&dp, b);
        if d.norm() == 0.0 {
            break;
        }
        let step = poly_eval(&p, b) / d;
        b -= step;
        if step.norm() <= 1e-16 * b.norm().max(1.0) {
            break;
        }
    }
    let pt = CurvePoint::new(a, b);
    let residual = curve_residual(&pt, spec);
    if residual <= CURVE_TOL {
        Ok(pt)
    } else {
        Err(RError::RootPolish { b, residual })
    }
}

/// All roots b of F(a, b) = 0 at fixed a; a failed polish is reported per root.
pub fn sample_curve(spec: &CurveSpec, a: C64) -> Result<Vec<Result<CurvePoint, RError>>, RError> {
    let coeffs = spec.b_coefficients(a);
    let roots = poly_roots(&coeffs).map_err(|_| RError::DegenerateCurve(a))?;
    Ok(roots.into_iter().map(|b| polish(spec, a, b)).collect())
}

/// Random curve point with a on a polar grid in 0.5 ≤ |a| ≤ 2, away from the
/// zeros of a² + j b² by `SAMPLE_MARGIN`.
pub fn sample_curve_random(spec: &CurveSpec, rng: &mut ChaCha8Rng) -> CurvePoint {
    loop {
        let r = 0.5 + 1.5 * rng.gen_range(0..=64) as f64 / 64.0;
        let phi = 2.0 * PI * (rng.gen_range(0..256) as f64 + 0.5) / 256.0;
        let a = C64::from_polar(r, phi);
        let Ok(roots) = sample_curve(spec, a) else { continue };
        let good: Vec<CurvePoint> = roots
            .into_iter()
            .flatten()
            .filter(|p| (p.a * p.a + spec.j * p.b * p.b).norm() >= SAMPLE_MARGIN && p.b.norm() <= 4.0)
            .collect();
        if !good.is_empty() {
            return good[rng.gen_range(0..good.len())];
        }
    }
}

/// The one-directional entries of the special-branch matrix at (x, y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbEntries {
    pub ra: C64,
    pub rb: C64,
    pub rbb: C64,
    pub rd: C64,
    pub rf: C64,
}

pub fn sb_entries(x: &CurvePoint, y: &CurvePoint, j: C64) -> Result<SbEntries, RError> {
    let (ax, bx, ay, by) = (x.a, x.b, y.a, y.b);
    let dx = ax * ax + j * bx * bx;
    let dy = ay * ay + j * by * by;
    for d in [dx, dy] {
        if d.norm() < POLE_GUARD {
            return Err(RError::Pole("a^2 + j b^2 = 0".into()));
        }
    }
    let den = j * ax * ay + bx * by * dx * dy;
    if den.norm() < POLE_GUARD {
        return Err(RError::Pole("r_d denominator".into()));
    }
    let ra = ax * ay / dy + j * bx * by / dx;
    let rb = bx * ay / dy - ax * by / dx;
    let rbb = j * bx * ay / dx - j * ax * by / dy;
    let rd = j * (bx * ay * dy - ax * by * dx) / den;
    let rf = rd * (bx * ay * dx * dy - j * j * ax * by) / (dx * dy);
    Ok(SbEntries { ra, rb, rbb, rd, rf })
}

/// Non-braided special-branch matrix, normalized so that r_c = 1.
///
/// r_g is evaluated as r_f(y,x) + r_a(y,x), using r_d(y,x) = −r_d(x,y); the
/// quotient form is 0/0 at x = y.
pub fn sb_r(x: &CurvePoint, y: &CurvePoint, j: C64) -> Result<ComplexMatrix, RError> {
    let e = sb_entries(x, y, j)?;
    let t = sb_entries(y, x, j)?;
    let rg = t.rf + t.ra;
    let rh = e.ra + e.rf / j;
    let rhb = e.ra + j * e.rf;
    let mut r = ComplexMatrix::zeros(9);
    let mut put = |v: C64, terms: &[(usize, usize, usize, usize)]| {
        for &(i1, j1, i2, j2) in terms {
            r[(3 * i1 + i2, 3 * j1 + j2)] = v;
        }
    };
    put(e.ra, &[(0, 0, 0, 0), (2, 2, 2, 2)]);
    put(e.rb, &[(0, 0, 1, 1), (2, 2, 1, 1)]);
    put(e.rbb, &[(1, 1, 0, 0), (1, 1, 2, 2)]);
    put(e.rf, &[(0, 0, 2, 2), (2, 2, 0, 0)]);
    put(rg, &[(1, 1, 1, 1)]);
    put(ONE, &[(0, 1, 1, 0), (1, 0, 0, 1), (1, 2, 2, 1), (2, 1, 1, 2)]);
    put(rh, &[(0, 2, 2, 0)]);
    put(rhb, &[(2, 0, 0, 2)]);
    put(e.rd, &[(0, 1, 2, 1), (1, 2, 1, 0)]);
    put(j * e.rd, &[(1, 0, 1, 2), (2, 1, 0, 1)]);
    Ok(r)
}

/// Special-branch model on its curve, base point (1, 0).
#[derive(Clone, Copy, Debug)]
pub struct SbModel {
    pub spec: CurveSpec,
}

impl SbModel {
    pub fn new(lambda4: C64, j: C64) -> Self {
        Self { spec: CurveSpec { branch: CurveBranch::Sb { lambda4 }, j } }
    }

    fn on_curve(&self, p: &CurvePoint) -> Result<(), RError> {
        let res = curve_residual(p, &self.spec);
        if res > 1e-8 {
            return Err(RError::OffCurve(res));
        }
        Ok(())
    }
}

impl RMatrixModel for SbModel {
    fn name(&self) -> String {
        match self.spec.branch {
            CurveBranch::Sb { lambda4 } => format!("sb(lambda4={}, j={})", lambda4, self.spec.j),
            CurveBranch::Mb { .. } => "mb".into(),
        }
    }

    fn arity(&self) -> Arity {
        Arity::Curve
    }

    fn rcheck(&self, x: &SpectralArg, y: &SpectralArg) -> Result<ComplexMatrix, RError> {
        let (x, y) = (x.point()?, y.point()?);
        self.on_curve(&x)?;
        self.on_curve(&y)?;
        Ok(super::braid(&sb_r(&x, &y, self.spec.j)?))
    }

    /// Moves a by t and follows the branch through b: a tangent predictor with
    /// slope db/da = −F_a/F_b, then Newton on F(a + t, ·).
    fn shift(&self, base: &SpectralArg, t: C64) -> Result<SpectralArg, RError> {
        let p = base.point()?;
        let (fa, fb) = self.spec.partials(p.a, p.b);
        if fb.norm() < POLE_GUARD {
            return Err(RError::Pole("F_b = 0 (branch point)".into()));
        }
        let a = p.a + t;
        Ok(SpectralArg::Curve(polish(&self.spec, a, p.b - fa / fb * t)?))
    }

    fn base_point(&self) -> SpectralArg {
        SpectralArg::Curve(CurvePoint::new(ONE, ZERO))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SpectralArg {
        SpectralArg::Curve(sample_curve_random(&self.spec, rng))
    }

    /// 1/max(1, |db/da|): keeps the step in b near the nominal step.
    fn step_scale(&self, base: &SpectralArg) -> f64 {
        let Ok(p) = base.point() else { return 1.0 };
        let (fa, fb) = self.spec.partials(p.a, p.b);
        if fb.norm() == 0.0 {
            return 1.0;
        }
        1.0 / (fa / fb).norm().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{c, re};
    use rand::SeedableRng;

    #[test]
    fn unit_point_on_both_branches() {
        let p = CurvePoint::new(ONE, ZERO);
        assert_eq!(curve_residual(&p, &CurveSpec::sb(re(0.3))), 0.0);
        assert!(curve_residual(&p, &CurveSpec::mb(c(1.3, 0.2), re(-0.7))) < 1e-15);
        assert!(curve_residual(&CurvePoint::new(re(0.7), re(0.4)), &CurveSpec::sb(re(0.3))) > 0.0);
    }

    #[test]
    fn sb_coefficients_in_b() {
        // F = j b^6 + a^2(1+j) b^4 + jΛa b^3 + (a^4(1+j)+1) b^2 + Λa^3 b + a^6 - a^2
        let (a, l) = (c(0.8, 0.3), c(0.3, -0.1));
        let spec = CurveSpec::sb(l);
        let j = spec.j;
        let want = [
            a.powu(6) - a * a,
            l * a.powu(3),
            a.powu(4) * (ONE + j) + 1.0,
            j * l * a,
            a * a * (ONE + j),
            ZERO,
            j,
            ZERO,
            ZERO,
        ];
        for (got, w) in spec.b_coefficients(a).iter().zip(want) {
            assert!((got - w).norm() < 1e-14, "{got} vs {w}");
        }
    }

    #[test]
    fn sampling_finds_origin_root() {
        let spec = CurveSpec::sb(re(0.3));
        let pts = sample_curve(&spec, ONE).unwrap();
        assert!(pts.len() <= 6);
        assert!(pts.iter().flatten().any(|p| p.b.norm() < 1e-12));
        let spec = CurveSpec::mb(re(1.3), c(0.4, 0.2));
        let pts = sample_curve(&spec, c(0.9, 0.4)).unwrap();
        assert!(pts.len() <= 8);
        for p in pts {
            assert!(curve_residual(&p.unwrap(), &spec) <= CURVE_TOL);
        }
    }

    #[test]
    fn sb_diagonal_and_symmetries() {
        let spec = CurveSpec::sb(re(0.3));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = sample_curve_random(&spec, &mut rng);
        let y = sample_curve_random(&spec, &mut rng);
        let e = sb_entries(&x, &x, spec.j).unwrap();
        assert!((e.ra - ONE).norm() < 1e-14 && e.rb.norm() < 1e-14);
        let r = sb_r(&x, &y, spec.j).unwrap();
        assert_eq!(r[(4, 2)], spec.j * r[(2, 4)]);
        assert_eq!(r[(1, 3)], ONE);
        assert!(crate::model_catalog::ice_violation(&r, 0.0).is_none());
        // quotient form of r_g
        let (exy, eyx) = (sb_entries(&x, &y, spec.j).unwrap(), sb_entries(&y, &x, spec.j).unwrap());
        let rg = -exy.rd * (eyx.rf + eyx.ra) / eyx.rd;
        assert!((rg - r[(4, 4)]).norm() < 1e-10 * rg.norm().max(1.0));
    }

    #[test]
    fn shift_stays_on_curve() {
        let m = SbModel::new(re(0.3), j_sixth());
        let p = m.shift(&m.base_point(), re(1e-5)).unwrap().point().unwrap();
        assert!(curve_residual(&p, &m.spec) <= CURVE_TOL);
        // db/da = -F_a/F_b = -4/Λ₄ at (1, 0)
        assert!((p.b - re(-1e-5 * 4.0 / 0.3)).norm() < 1e-6, "{p:?}");
    }
}
