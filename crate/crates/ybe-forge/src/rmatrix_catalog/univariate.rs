//! Multiplicative models: Zamolodchikov–Fateev, Izergin–Korepin, 17V₂.

use super::{braid, Arity, RError, RMatrixModel, SpectralArg};
use crate::model_catalog::POLE_GUARD;
use crate::tensor_core::{ComplexMatrix, C64, ONE};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn pole(value: C64, what: &str) -> Result<(), RError> {
    if value.norm() < POLE_GUARD {
        Err(RError::Pole(what.to_string()))
    } else {
        Ok(())
    }
}

/// The common 19-vertex layout shared by the ZF and IK matrices.
#[allow(clippy::too_many_arguments)]
fn fill19(
    b: C64,
    cm: C64,
    cp: C64,
    f: C64,
    dm: C64,
    hm: C64,
    dp: C64,
    g: C64,
    hp: C64,
) -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(9);
    r[(0, 0)] = ONE;
    r[(8, 8)] = ONE;
    for (i, j) in [(1, 3), (5, 7)] {
        r[(i, i)] = b;
        r[(j, j)] = b;
        r[(i, j)] = cm;
        r[(j, i)] = cp;
    }
    r[(2, 2)] = f;
    r[(6, 6)] = f;
    r[(2, 4)] = dm;
    r[(4, 6)] = dm;
    r[(4, 2)] = dp;
    r[(6, 4)] = dp;
    r[(2, 6)] = hm;
    r[(6, 2)] = hp;
    r[(4, 4)] = g;
    r
}

/// Non-braided ZF matrix R(u; k).
pub fn zf_r(u: C64, k: C64) -> Result<ComplexMatrix, RError> {
    let (k2, u2) = (k * k, u * u);
    let k4 = k2 * k2;
    let d1 = k4 * u2 - 1.0;
    let d2 = k2 * u2 - 1.0;
    pole(d1, "k^4 u^2 = 1")?;
    pole(d2, "k^2 u^2 = 1")?;
    let d12 = d1 * d2;
    let b = -(u2 - 1.0) * k2 / d1;
    let c0 = u * (k4 - 1.0) / d1;
    let f = (u2 - k2) * (u2 - 1.0) * k2 / d12;
    let d0 = -u * k * (k4 - 1.0) * (u2 - 1.0) / d12;
    let h0 = u2 * (k4 - 1.0) * (k2 - 1.0) / d12;
    let g = (k4 * u2 * u2 + u2 * (k2 + 1.0) * (k2 + k - 1.0) * (k2 - k - 1.0) + k2) / d12;
    Ok(fill19(b, c0 / u, c0 * u, f, d0 / u, h0 / u2, d0 * u, g, h0 * u2))
}

/// Non-braided IK matrix R(u; k). The h₊ entry carries the extra factor u
/// needed for the Yang–Baxter equation (the printed form omits it).
pub fn ik_r(u: C64, k: C64) -> Result<ComplexMatrix, RError> {
    let k2 = k * k;
    let k3 = k2 * k;
    let up = u + k3;
    let um = u - k2;
    pole(up, "u = -k^3")?;
    pole(um, "u = k^2")?;
    let den = up * um;
    let d = k.sqrt() * (1.0 - k2) * (u - 1.0) / den;
    let b = k * (u - 1.0) / um;
    let cm = (1.0 - k2) / um;
    let f = k2 * (u + k) * (u - 1.0) / den;
    let g = (k * up * (u - 1.0) + u * (k3 + 1.0) * (1.0 - k2)) / den;
    let hm = (up + k2 * (u - 1.0)) * (1.0 - k2) / den;
    let hp = u * (up - k * (u - 1.0)) * (1.0 - k2) / den;
    Ok(fill19(b, cm, u * cm, f, k2 * d, hm, -u * d, g, hp))
}

/// The 17V₂ matrix as displayed (not braided, not normalized).
pub fn v17_2_r(z: C64, theta0: C64) -> Result<ComplexMatrix, RError> {
    pole(z, "z = 0")?;
    let zi = ONE / z;
    let corner = z - theta0 * zi;
    let zz = z - zi;
    let lo = (1.0 - theta0) * zi;
    let hi = z * (1.0 - theta0);
    let mut r = ComplexMatrix::zeros(9);
    for i in [0, 4, 8] {
        r[(i, i)] = corner;
    }
    for i in [1, 2, 5] {
        r[(i, i)] = zz * theta0;
    }
    for (i, j) in [(1, 3), (2, 6), (5, 7)] {
        r[(i, j)] = lo;
        r[(j, i)] = hi;
    }
    for pos in [(3, 3), (6, 4), (6, 6), (7, 7)] {
        r[pos] = zz;
    }
    r[(2, 4)] = -zz;
    Ok(r)
}

fn sample_annulus(rng: &mut ChaCha8Rng) -> C64 {
    let r: f64 = rng.gen_range(0.6..1.7);
    let phi: f64 = rng.gen_range(-1.2..1.2);
    C64::from_polar(r, phi)
}

fn ratio(x: &SpectralArg, y: &SpectralArg) -> Result<C64, RError> {
    let y = y.scalar()?;
    pole(y, "y = 0")?;
    Ok(x.scalar()? / y)
}

macro_rules! multiplicative_model {
    ($ty:ident, $name:expr) => {
        impl RMatrixModel for $ty {
            fn name(&self) -> String {
                $name(self)
            }
            fn arity(&self) -> Arity {
                Arity::Multiplicative
            }
            fn rcheck(&self, x: &SpectralArg, y: &SpectralArg) -> Result<ComplexMatrix, RError> {
                self.rcheck_u(ratio(x, y)?)
            }
            fn shift(&self, base: &SpectralArg, t: C64) -> Result<SpectralArg, RError> {
                Ok(SpectralArg::Scalar(base.scalar()? + t))
            }
            fn base_point(&self) -> SpectralArg {
                SpectralArg::Scalar(ONE)
            }
            fn sample(&self, rng: &mut ChaCha8Rng) -> SpectralArg {
                loop {
                    let u = sample_annulus(rng);
                    if let Ok(m) = self.rcheck_u(u) {
                        if m.sup_norm() < 1e3 {
                            return SpectralArg::Scalar(u);
                        }
                    }
                }
            }
        }
    };
}

#[derive(Clone, Copy, Debug)]
pub struct ZfModel {
    pub k: C64,
}

impl ZfModel {
    pub fn rcheck_u(&self, u: C64) -> Result<ComplexMatrix, RError> {
        Ok(braid(&zf_r(u, self.k)?))
    }
}
multiplicative_model!(ZfModel, |m: &ZfModel| format!("zf(k={})", m.k));

#[derive(Clone, Copy, Debug)]
pub struct IkModel {
    pub k: C64,
}

impl IkModel {
    pub fn rcheck_u(&self, u: C64) -> Result<ComplexMatrix, RError> {
        Ok(braid(&ik_r(u, self.k)?))
    }
}
multiplicative_model!(IkModel, |m: &IkModel| format!("ik(k={})", m.k));

/// 17V₂ model; `normalized` divides Ř by its (|00⟩,|00⟩) entry z − θ₀/z.
#[derive(Clone, Copy, Debug)]
pub struct V17_2Model {
    pub theta0: C64,
    pub normalized: bool,
}

impl V17_2Model {
    pub fn rcheck_u(&self, z: C64) -> Result<ComplexMatrix, RError> {
        let rc = braid(&v17_2_r(z, self.theta0)?);
        if !self.normalized {
            return Ok(rc);
        }
        let n = rc[(0, 0)];
        pole(n, "z - theta0/z = 0")?;
        Ok(rc.scale(ONE / n))
    }
}
multiplicative_model!(V17_2Model, |m: &V17_2Model| format!(
    "v17_2(theta0={}{})",
    m.theta0,
    if m.normalized { ", normalized" } else { "" }
));

type UFn = dyn Fn(C64) -> Result<ComplexMatrix, RError> + Send + Sync;

/// Multiplicative model backed by a closure returning Ř(u).
#[derive(Clone)]
pub struct FnModel {
    pub label: String,
    pub f: Arc<UFn>,
}

impl FnModel {
    pub fn new(label: impl Into<String>, f: impl Fn(C64) -> Result<ComplexMatrix, RError> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f) }
    }

    pub fn rcheck_u(&self, u: C64) -> Result<ComplexMatrix, RError> {
        (self.f)(u)
    }
}
multiplicative_model!(FnModel, |m: &FnModel| m.label.clone());
