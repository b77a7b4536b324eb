//! R-matrix models and exact Hamiltonians for the named catalogue entries.

use super::{
    derivative_hamiltonian, taylor_coefficients, IkModel, RError, RMatrixModel, SbModel, V17_2Model, ZfModel,
    FD_STEP,
};
use crate::model_catalog::NamedModel;
use crate::tensor_core::{ComplexMatrix, C64, ONE};
use std::sync::Arc;

/// The R-matrix model behind a catalogue entry, when the catalogue has one.
/// 17V₂ is returned normalized so that it is regular.
pub fn rmatrix_model(m: &NamedModel) -> Option<Arc<dyn RMatrixModel>> {
    match *m {
        NamedModel::Zf { k } => Some(Arc::new(ZfModel { k })),
        NamedModel::Ik { k } => Some(Arc::new(IkModel { k })),
        NamedModel::V17_2 { theta0 } => Some(Arc::new(V17_2Model { theta0, normalized: true })),
        NamedModel::Sb { lambda4, j } => Some(Arc::new(SbModel::new(lambda4, j))),
        _ => None,
    }
}

/// Ř′(1) by a Cauchy integral on a circle of half the distance to the
/// nearest singularity.
fn cauchy_derivative<F>(f: F, singular: &[C64]) -> Result<ComplexMatrix, RError>
where
    F: Fn(C64) -> Result<ComplexMatrix, RError>,
{
    let dist = singular.iter().map(|p| (p - ONE).norm()).fold(1.0, f64::min);
    if dist < 1e-3 {
        return Err(RError::Pole("singularity within 1e-3 of the regular point".into()));
    }
    let cs = taylor_coefficients(f, ONE, 0.5 * dist, 96, 1)?;
    Ok(cs[1].clone())
}

/// Hamiltonian H = ∂ₓŘ(x, y)|ₓ₌ᵧ for catalogue entries defined by an
/// R-matrix. Multiplicative models use a contour integral (accurate to
/// rounding); the curve model falls back to Richardson differences.
pub fn analytic_hamiltonian(m: &NamedModel) -> Result<ComplexMatrix, RError> {
    match *m {
        NamedModel::Zf { k } => {
            let (a, b) = (ONE / (k * k), ONE / k);
            cauchy_derivative(|u| ZfModel { k }.rcheck_u(u), &[a, -a, b, -b])
        }
        NamedModel::Ik { k } => cauchy_derivative(|u| IkModel { k }.rcheck_u(u), &[k * k, -k * k * k]),
        NamedModel::V17_2 { theta0 } => {
            let s = theta0.sqrt();
            let model = V17_2Model { theta0, normalized: true };
            cauchy_derivative(|u| model.rcheck_u(u), &[C64::new(0.0, 0.0), s, -s])
        }
        NamedModel::Sb { .. } => {
            let model = rmatrix_model(m).expect("SB has an R-matrix");
            Ok(derivative_hamiltonian(model.as_ref(), &model.base_point(), FD_STEP)?.h)
        }
        _ => Err(RError::WrongArgument),
    }
}
