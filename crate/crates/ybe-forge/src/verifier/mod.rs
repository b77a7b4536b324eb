//! Numerical certificates for R-matrix models: Yang–Baxter (braided,
//! multiplicative, RLL), unitarity, regularity, ice rule, Hamiltonian
//! extraction and commutation of transfer matrices.

mod report;

pub use report::{verify_model, CheckResult, MutatedModel, VerificationReport, VerifyConfig};

use crate::rmatrix_catalog::{derivative_hamiltonian, unbraid, DerivativeHamiltonian, RError, RMatrixModel, SpectralArg};
use crate::tensor_core::{embed12, embed23, embed_pair, pow3, rel, site_sum, ComplexMatrix, C64, ONE};

/// Structural checks (ice rule, regularity).
pub const TOL_STRUCTURAL: f64 = 1e-12;
/// Algebraic identities (YBE, unitarity, commutation).
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Anything obtained by numerical differentiation.
pub const TOL_DIFFERENTIATION: f64 = 1e-8;

fn rel_diff(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> f64 {
    rel(lhs.dist(rhs), lhs.sup_norm().max(rhs.sup_norm()))
}

/// Ř₁₂(y,z)Ř₂₃(x,z)Ř₁₂(x,y) − Ř₂₃(x,y)Ř₁₂(x,z)Ř₂₃(y,z), relative sup norm.
pub fn ybe_residual_braided(
    model: &dyn RMatrixModel,
    x: &SpectralArg,
    y: &SpectralArg,
    z: &SpectralArg,
) -> Result<f64, RError> {
    let rxy = model.rcheck(x, y)?;
    let rxz = model.rcheck(x, z)?;
    let ryz = model.rcheck(y, z)?;
    let lhs = embed12(&ryz).matmul(&embed23(&rxz)).matmul(&embed12(&rxy));
    let rhs = embed23(&rxy).matmul(&embed12(&rxz)).matmul(&embed23(&ryz));
    Ok(rel_diff(&lhs, &rhs))
}

/// Ř(u) := Ř(u, 1), the multiplicative view of any model with scalar arguments.
pub fn multiplicative_shim(model: &dyn RMatrixModel) -> impl Fn(C64) -> Result<ComplexMatrix, RError> + '_ {
    move |u| model.rcheck(&SpectralArg::Scalar(u), &SpectralArg::Scalar(ONE))
}

/// Ř₁₂(u)Ř₂₃(uv)Ř₁₂(v) − Ř₂₃(v)Ř₁₂(uv)Ř₂₃(u), relative sup norm.
pub fn ybe_residual_multiplicative<F>(rc: F, u: C64, v: C64) -> Result<f64, RError>
where
    F: Fn(C64) -> Result<ComplexMatrix, RError>,
{
    let (ru, rv, ruv) = (rc(u)?, rc(v)?, rc(u * v)?);
    let lhs = embed12(&ru).matmul(&embed23(&ruv)).matmul(&embed12(&rv));
    let rhs = embed23(&rv).matmul(&embed12(&ruv)).matmul(&embed23(&ru));
    Ok(rel_diff(&lhs, &rhs))
}

/// R(x,y) L₁(x) L₂(y) − L₂(y) L₁(x) R(x,y) on three legs laid out as
/// (auxiliary 1, auxiliary 2, quantum): R acts on legs (0,1), L₁ on (0,2),
/// L₂ on (1,2). All matrices are non-braided. With `l = None` the Lax
/// operator is L(x) = R(x, w), which turns the check into the non-braided
/// Yang–Baxter equation at (x, y, w).
pub fn ybe_residual_rll(
    model: &dyn RMatrixModel,
    l: Option<&dyn Fn(&SpectralArg) -> Result<ComplexMatrix, RError>>,
    x: &SpectralArg,
    y: &SpectralArg,
    w: &SpectralArg,
) -> Result<f64, RError> {
    let r = unbraid(&model.rcheck(x, y)?);
    let (lx, ly) = match l {
        Some(f) => (f(x)?, f(y)?),
        None => (unbraid(&model.rcheck(x, w)?), unbraid(&model.rcheck(y, w)?)),
    };
    let r12 = embed_pair(&r, 3, 0, 1);
    let l13 = embed_pair(&lx, 3, 0, 2);
    let l23 = embed_pair(&ly, 3, 1, 2);
    let lhs = r12.matmul(&l13).matmul(&l23);
    let rhs = l23.matmul(&l13).matmul(&r12);
    Ok(rel_diff(&lhs, &rhs))
}

/// λ = mean diagonal of Ř(x,y)Ř(y,x); residual ‖product − λI‖∞ / max(1, |λ|).
pub fn unitarity_check(model: &dyn RMatrixModel, x: &SpectralArg, y: &SpectralArg) -> Result<(C64, f64), RError> {
    let p = model.rcheck(x, y)?.matmul(&model.rcheck(y, x)?);
    let lambda = p.trace() / 9.0;
    let res = p.dist(&ComplexMatrix::identity(9).scale(lambda));
    Ok((lambda, rel(res, lambda.norm())))
}

/// ‖Ř(x,x) − I‖∞.
pub fn regularity_check(model: &dyn RMatrixModel, x: &SpectralArg) -> Result<f64, RError> {
    Ok(model.rcheck(x, x)?.dist(&ComplexMatrix::identity(9)))
}

/// Largest |entry| at positions violating the ice rule (0 for compliant input).
pub fn ice_rule_check(m: &ComplexMatrix) -> f64 {
    let l = (m.dim() as f64).log(3.0).round() as usize;
    let mut worst: f64 = 0.0;
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            if site_sum(r, l) != site_sum(c, l) {
                worst = worst.max(m[(r, c)].norm());
            }
        }
    }
    worst
}

/// H = ∂ₓŘ(x,y)|ₓ₌ᵧ₌base, with the ice rule checked on the result.
pub fn extract_hamiltonian(model: &dyn RMatrixModel, base: &SpectralArg) -> Result<DerivativeHamiltonian, RError> {
    let d = derivative_hamiltonian(model, base, crate::rmatrix_catalog::FD_STEP)?;
    if let Some((row, col, value)) = crate::model_catalog::ice_violation(&d.h, TOL_DIFFERENTIATION) {
        return Err(RError::Model(crate::model_catalog::ModelError::NotIceRule { row, col, value }));
    }
    Ok(d)
}

/// t(x) = Tr₀ R₀₁(x,y)…R₀L(x,y) on L quantum sites (auxiliary leg first).
pub fn transfer_matrix(model: &dyn RMatrixModel, x: &SpectralArg, y: &SpectralArg, l: usize) -> Result<ComplexMatrix, RError> {
    let r = unbraid(&model.rcheck(x, y)?);
    let mut mono = ComplexMatrix::identity(pow3(l + 1));
    for site in 1..=l {
        mono = mono.matmul(&embed_pair(&r, l + 1, 0, site));
    }
    let n = pow3(l);
    Ok(ComplexMatrix::from_fn(n, |row, col| (0..3).map(|a| mono[(a * n + row, a * n + col)]).sum()))
}

/// ‖[t(x₁), t(x₂)]‖∞ / (‖t(x₁)‖∞‖t(x₂)‖∞) with inhomogeneities all equal to y.
pub fn transfer_commutation(
    model: &dyn RMatrixModel,
    x1: &SpectralArg,
    x2: &SpectralArg,
    y: &SpectralArg,
    l: usize,
) -> Result<f64, RError> {
    assert!((1..=4).contains(&l), "transfer matrices are limited to 1 <= L <= 4");
    let t1 = transfer_matrix(model, x1, y, l)?;
    let t2 = transfer_matrix(model, x2, y, l)?;
    let scale = (t1.sup_norm() * t2.sup_norm()).max(f64::MIN_POSITIVE);
    Ok(t1.commutator(&t2).sup_norm() / scale)
}
