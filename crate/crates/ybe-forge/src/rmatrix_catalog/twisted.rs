//! R-level counterparts of the Hamiltonian twists.
//!
//! With G = g⊗g (gauge), Γ = e^{αs}⊗e^{−αs} (grading), T(x, y) = t(x)⊗t(y),
//! t(x) = exp(−(x − x₀)A) (telescope) and f = exp(γ(x − y)) (identity shift):
//!
//!   Ř'(x, y) = f · T(y, x) Γ G Ř(x, y) G⁻¹ Γ⁻¹ T(x, y)⁻¹.
//!
//! The telescope factor carries its arguments in the order (y, x) on the left;
//! this is the order compatible with Ř₁₂(y,z)Ř₂₃(x,z)Ř₁₂(x,y) = …, and it
//! yields H + A⊗I − I⊗A. Shifting by x₀ (the base coordinate) removes a
//! constant conjugation from the extracted Hamiltonian. The S^z shift has no
//! R-level form and is rejected.

use super::{Arity, RError, RMatrixModel, SpectralArg};
use crate::model_catalog::{grading_factor, ModelError, TwistSpec};
use crate::tensor_core::{inverse, kron, ComplexMatrix, C64, ZERO};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Clone)]
pub struct TwistedModel {
    pub inner: Arc<dyn RMatrixModel>,
    pub twist: TwistSpec,
    conj: ComplexMatrix,
    conj_inv: ComplexMatrix,
    x0: C64,
}

/// Local scalar coordinate of a spectral argument: z itself, or a on a curve.
fn coordinate(x: &SpectralArg) -> C64 {
    match x {
        SpectralArg::Scalar(z) => *z,
        SpectralArg::Curve(p) => p.a,
    }
}

impl TwistedModel {
    pub fn new(inner: Arc<dyn RMatrixModel>, twist: TwistSpec) -> Result<Self, ModelError> {
        if twist.sz_shift != ZERO {
            return Err(ModelError::BadParams("the S^z shift has no R-matrix counterpart".into()));
        }
        let mut conj = ComplexMatrix::identity(9);
        let mut conj_inv = ComplexMatrix::identity(9);
        if let Some(g) = &twist.gauge_g {
            let g = g.to_matrix();
            let gi = inverse(&g).map_err(|_| ModelError::SingularGauge)?;
            conj = kron(&g, &g);
            conj_inv = kron(&gi, &gi);
        }
        if let Some(alpha) = twist.grading_alpha {
            let f = kron(&grading_factor(alpha), &grading_factor(-alpha));
            let fi = kron(&grading_factor(-alpha), &grading_factor(alpha));
            conj = f.matmul(&conj);
            conj_inv = conj_inv.matmul(&fi);
        }
        let x0 = coordinate(&inner.base_point());
        Ok(Self { inner, twist, conj, conj_inv, x0 })
    }

    fn tel(&self, a: &[C64; 3], x: C64, y: C64, sign: f64) -> ComplexMatrix {
        let t = |z: C64| -> ComplexMatrix {
            let d: Vec<C64> = a.iter().map(|ai| (-(z - self.x0) * ai * sign).exp()).collect();
            ComplexMatrix::diag(&d)
        };
        kron(&t(x), &t(y))
    }
}

impl RMatrixModel for TwistedModel {
    fn name(&self) -> String {
        format!("twisted({})", self.inner.name())
    }

    fn arity(&self) -> Arity {
        let spectral = self.twist.telescope_a.is_some() || self.twist.identity_shift != ZERO;
        match self.inner.arity() {
            Arity::Multiplicative if spectral => Arity::Bivariate,
            a => a,
        }
    }

    fn rcheck(&self, x: &SpectralArg, y: &SpectralArg) -> Result<ComplexMatrix, RError> {
        let r = self.inner.rcheck(x, y)?;
        let mut out = self.conj.matmul(&r).matmul(&self.conj_inv);
        let (cx, cy) = (coordinate(x), coordinate(y));
        if let Some(a) = &self.twist.telescope_a {
            // T(x, y)⁻¹ is T(x, y) with A → −A
            out = self.tel(a, cy, cx, 1.0).matmul(&out).matmul(&self.tel(a, cx, cy, -1.0));
        }
        if self.twist.identity_shift != ZERO {
            out = out.scale((self.twist.identity_shift * (cx - cy)).exp());
        }
        Ok(out)
    }

    fn shift(&self, base: &SpectralArg, t: C64) -> Result<SpectralArg, RError> {
        self.inner.shift(base, t)
    }

    fn base_point(&self) -> SpectralArg {
        self.inner.base_point()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SpectralArg {
        self.inner.sample(rng)
    }

    fn step_scale(&self, base: &SpectralArg) -> f64 {
        self.inner.step_scale(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_catalog::{apply_twist_h, ComplexMatrix3};
    use crate::rmatrix_catalog::{derivative_hamiltonian, ZfModel, FD_STEP};
    use crate::tensor_core::{c, re, ONE};

    #[test]
    fn hamiltonian_transforms_like_the_display() {
        let zf: Arc<dyn RMatrixModel> = Arc::new(ZfModel { k: c(1.7, 0.2) });
        let t = TwistSpec {
            gauge_g: Some(ComplexMatrix3::diag([ONE, c(0.6, 0.2), re(1.3)])),
            grading_alpha: Some(c(0.3, 0.4)),
            telescope_a: Some([re(0.2), c(-0.7, 0.1), re(0.5)]),
            identity_shift: c(0.25, -0.1),
            sz_shift: ZERO,
        };
        let tw = TwistedModel::new(zf.clone(), t.clone()).unwrap();
        let base = tw.base_point();
        let h = derivative_hamiltonian(zf.as_ref(), &base, FD_STEP).unwrap().h;
        let h2 = derivative_hamiltonian(&tw, &base, FD_STEP).unwrap().h;
        assert!(h2.dist(&apply_twist_h(&h, &t).unwrap()) < 1e-9);
        assert_eq!(tw.arity(), Arity::Bivariate);
    }

    #[test]
    fn sz_shift_rejected() {
        let zf: Arc<dyn RMatrixModel> = Arc::new(ZfModel { k: re(2.0) });
        let t = TwistSpec { sz_shift: ONE, ..Default::default() };
        assert!(TwistedModel::new(zf, t).is_err());
    }
}
