//! Closed-form R-matrices and the spectral-curve machinery.
//!
//! Every model is exposed in braided form Ř = P·R through [`RMatrixModel`].
//! Univariate (multiplicative) models are seen as bivariate through
//! Ř(x, y) := Ř(x/y).

mod curve;
mod named;
mod twisted;
mod univariate;

pub use curve::{
    curve_residual, sample_curve, sample_curve_random, sb_entries, sb_r, CurveBranch, CurvePoint,
    CurveSpec, SbEntries, SbModel,
};
pub use named::{analytic_hamiltonian, rmatrix_model};
pub use twisted::TwistedModel;
pub use univariate::{ik_r, v17_2_r, zf_r, FnModel, IkModel, V17_2Model, ZfModel};

use crate::model_catalog::ModelError;
use crate::tensor_core::{permutation_operator, rel, ComplexMatrix, C64};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RError {
    #[error("spectral point too close to a pole: {0}")]
    Pole(String),
    #[error("point is off the curve (residual {0:.3e})")]
    OffCurve(f64),
    #[error("model is not regular at the base point (residual {0:.3e})")]
    NotRegular(f64),
    #[error("argument kind does not match the model arity")]
    WrongArgument,
    #[error("curve root b = {b} did not polish (residual {residual:.3e})")]
    RootPolish { b: C64, residual: f64 },
    #[error("curve polynomial in b is degenerate at a = {0}")]
    DegenerateCurve(C64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Arity {
    Multiplicative,
    Bivariate,
    Curve,
}

/// A spectral argument: a complex number, or a point (a, b) on a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SpectralArg {
    Scalar(C64),
    Curve(CurvePoint),
}

impl SpectralArg {
    pub fn scalar(self) -> Result<C64, RError> {
        match self {
            SpectralArg::Scalar(z) => Ok(z),
            SpectralArg::Curve(_) => Err(RError::WrongArgument),
        }
    }

    pub fn point(self) -> Result<CurvePoint, RError> {
        match self {
            SpectralArg::Curve(p) => Ok(p),
            SpectralArg::Scalar(_) => Err(RError::WrongArgument),
        }
    }

    /// Flat list of coordinates, for reports.
    pub fn coords(&self) -> Vec<C64> {
        match self {
            SpectralArg::Scalar(z) => vec![*z],
            SpectralArg::Curve(p) => vec![p.a, p.b],
        }
    }
}

pub trait RMatrixModel: Send + Sync {
    fn name(&self) -> String;
    fn arity(&self) -> Arity;
    /// Braided matrix Ř(x, y).
    fn rcheck(&self, x: &SpectralArg, y: &SpectralArg) -> Result<ComplexMatrix, RError>;
    /// Point at local coordinate `t` from `base` (x + t, or a + t along the curve).
    fn shift(&self, base: &SpectralArg, t: C64) -> Result<SpectralArg, RError>;
    /// Point where the Hamiltonian is extracted by default.
    fn base_point(&self) -> SpectralArg;
    /// Random admissible spectral argument.
    fn sample(&self, rng: &mut ChaCha8Rng) -> SpectralArg;
    /// Factor applied to finite-difference steps at `base`; curve models
    /// shrink it where the branch is steep.
    fn step_scale(&self, _base: &SpectralArg) -> f64 {
        1.0
    }
}

/// Ř = P·R.
pub fn braid(r: &ComplexMatrix) -> ComplexMatrix {
    permutation_operator().matmul(r)
}

/// R = P·Ř.
pub fn unbraid(rc: &ComplexMatrix) -> ComplexMatrix {
    permutation_operator().matmul(rc)
}

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct DerivativeHamiltonian {
    pub h: ComplexMatrix,
    /// Distance to the same extrapolation on steps (h/2, h/4), relative to
    /// max(1, ‖H‖∞).
    pub error_estimate: f64,
}

fn central<F>(f: F, h: f64) -> Result<ComplexMatrix, RError>
where
    F: Fn(C64) -> Result<ComplexMatrix, RError>,
{
    let p = f(C64::new(h, 0.0))?;
    let m = f(C64::new(-h, 0.0))?;
    Ok((&p - &m).scale(C64::new(0.5 / h, 0.0)))
}

fn richardson<F>(f: F, h: f64) -> Result<DerivativeHamiltonian, RError>
where
    F: Fn(C64) -> Result<ComplexMatrix, RError>,
{
    let d: Vec<ComplexMatrix> = [h, h / 2.0, h / 4.0].iter().map(|&s| central(&f, s)).collect::<Result<_, _>>()?;
    let extrapolate = |coarse: &ComplexMatrix, fine: &ComplexMatrix| {
        (&fine.scale(C64::new(4.0, 0.0)) - coarse).scale(C64::new(1.0 / 3.0, 0.0))
    };
    let rich = extrapolate(&d[0], &d[1]);
    let error_estimate = rel(rich.dist(&extrapolate(&d[1], &d[2])), rich.sup_norm());
    Ok(DerivativeHamiltonian { h: rich, error_estimate })
}

fn check_regular(model: &dyn RMatrixModel, base: &SpectralArg) -> Result<(), RError> {
    let r0 = model.rcheck(base, base)?;
    let res = r0.dist(&ComplexMatrix::identity(9));
    if res > 1e-10 {
        return Err(RError::NotRegular(res));
    }
    Ok(())
}

/// H = ∂ₓ Ř(x, y)|ₓ₌ᵧ₌base by two-level Richardson central differences.
pub fn derivative_hamiltonian(
    model: &dyn RMatrixModel,
    base: &SpectralArg,
    h: f64,
) -> Result<DerivativeHamiltonian, RError> {
    check_regular(model, base)?;
    richardson(|t| model.rcheck(&model.shift(base, t)?, base), h * model.step_scale(base))
}

/// H̃ = ∂ᵧ Ř(x, y)|ₓ₌ᵧ₌base.
pub fn derivative_hamiltonian_y(
    model: &dyn RMatrixModel,
    base: &SpectralArg,
    h: f64,
) -> Result<DerivativeHamiltonian, RError> {
    check_regular(model, base)?;
    richardson(|t| model.rcheck(base, &model.shift(base, t)?), h * model.step_scale(base))
}

/// Taylor coefficients c₀..c_order of a matrix function analytic on the disk
/// |t − center| ≤ radius, by the trapezoidal rule on that circle
/// (n_points > order; error ∝ (radius/ρ)^n_points with ρ the distance to the
/// nearest singularity).
pub fn taylor_coefficients<F>(
    f: F,
    center: C64,
    radius: f64,
    n_points: usize,
    order: usize,
) -> Result<Vec<ComplexMatrix>, RError>
where
    F: Fn(C64) -> Result<ComplexMatrix, RError>,
{
    assert!(n_points > order, "need more nodes than coefficients");
    let samples: Vec<(C64, ComplexMatrix)> = (0..n_points)
        .map(|k| {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n_points as f64);
            f(center + w * radius).map(|m| (w, m))
        })
        .collect::<Result<_, _>>()?;
    let dim = samples[0].1.dim();
    Ok((0..=order)
        .map(|m| {
            let mut acc = ComplexMatrix::zeros(dim);
            for (w, s) in &samples {
                acc = &acc + &s.scale(w.powi(-(m as i32)));
            }
            acc.scale(C64::new(1.0 / (n_points as f64 * radius.powi(m as i32)), 0.0))
        })
        .collect())
}
