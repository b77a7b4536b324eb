use super::{
    extract_hamiltonian, ice_rule_check, multiplicative_shim, regularity_check, transfer_commutation,
    unitarity_check, ybe_residual_braided, ybe_residual_multiplicative, ybe_residual_rll, TOL_ALGEBRAIC,
    TOL_DIFFERENTIATION, TOL_STRUCTURAL,
};
use crate::rmatrix_catalog::{Arity, RError, RMatrixModel, SpectralArg};
use crate::tensor_core::{ComplexMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub sample_count: usize,
    /// Samples abandoned because every redraw hit a pole.
    pub skipped: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Coordinates of the spectral arguments at the worst sample.
    pub worst_point: Option<Vec<Vec<C64>>>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub model: String,
    pub arity: Arity,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// Chain length for the transfer-matrix check.
    pub chain_length: usize,
    /// Overrides the algebraic tolerance (YBE, unitarity, commutation).
    pub tol: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { samples: 100, seed: 0, chain_length: 3, tol: None }
    }
}

const REDRAWS: usize = 20;

/// Independent stream per (check, sample) so results do not depend on the
/// thread schedule.
fn sample_rng(seed: u64, check: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((check << 32) | index as u64);
    rng
}

/// Runs `eval` on `n` seeded samples of `arity` spectral points each.
#[allow(clippy::too_many_arguments)]
fn run_check<F>(
    name: &str,
    model: &dyn RMatrixModel,
    cfg: &VerifyConfig,
    check_id: u64,
    n: usize,
    arity: usize,
    tolerance: f64,
    eval: F,
) -> CheckResult
where
    F: Fn(&[SpectralArg]) -> Result<f64, RError> + Sync,
{
    let results: Vec<Option<(f64, Vec<SpectralArg>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, check_id, i);
            for _ in 0..REDRAWS {
                let pts: Vec<SpectralArg> = (0..arity).map(|_| model.sample(&mut rng)).collect();
                if let Ok(r) = eval(&pts) {
                    return Some((r, pts));
                }
            }
            None
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let mut max_residual: f64 = 0.0;
    let mut worst_point = None;
    for (r, pts) in results.into_iter().flatten() {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if worst_point.is_none() || r > max_residual {
            max_residual = r;
            worst_point = Some(pts.iter().map(|p| p.coords()).collect());
        }
    }
    CheckResult {
        name: name.to_string(),
        sample_count: n - skipped,
        skipped,
        max_residual,
        tolerance,
        worst_point,
        pass: max_residual <= tolerance && skipped < n.max(1),
    }
}

/// Every applicable check on seeded random admissible points.
pub fn verify_model(model: &dyn RMatrixModel, cfg: &VerifyConfig) -> VerificationReport {
    let n = cfg.samples.max(1);
    let alg = cfg.tol.unwrap_or(TOL_ALGEBRAIC);
    let mut checks = vec![
        run_check("ice_rule", model, cfg, 0, n, 2, TOL_STRUCTURAL, |p| {
            Ok(ice_rule_check(&model.rcheck(&p[0], &p[1])?))
        }),
        run_check("regularity", model, cfg, 1, n, 1, TOL_STRUCTURAL, |p| regularity_check(model, &p[0])),
        run_check("ybe_braided", model, cfg, 2, n, 3, alg, |p| ybe_residual_braided(model, &p[0], &p[1], &p[2])),
    ];
    if model.arity() == Arity::Multiplicative {
        let shim = multiplicative_shim(model);
        checks.push(run_check("ybe_multiplicative", model, cfg, 3, n, 2, alg, |p| {
            ybe_residual_multiplicative(&shim, p[0].scalar()?, p[1].scalar()?)
        }));
    }
    checks.push(run_check("ybe_rll", model, cfg, 4, n, 3, alg, |p| {
        ybe_residual_rll(model, None, &p[0], &p[1], &p[2])
    }));
    checks.push(run_check("unitarity", model, cfg, 5, n, 2, alg, |p| Ok(unitarity_check(model, &p[0], &p[1])?.1)));
    checks.push(run_check("unitarity_symmetry", model, cfg, 6, n, 2, alg, |p| {
        let (l1, _) = unitarity_check(model, &p[0], &p[1])?;
        let (l2, _) = unitarity_check(model, &p[1], &p[0])?;
        Ok((l1 - l2).norm() / l1.norm().max(1.0))
    }));
    let base = model.base_point();
    checks.push(run_check("hamiltonian_extraction", model, cfg, 7, 1, 0, TOL_DIFFERENTIATION, |_| {
        Ok(extract_hamiltonian(model, &base)?.error_estimate)
    }));
    let l = cfg.chain_length.clamp(1, 4);
    checks.push(run_check(
        &format!("transfer_commutation_L{l}"),
        model,
        cfg,
        8,
        n.div_ceil(10),
        3,
        alg,
        |p| transfer_commutation(model, &p[0], &p[1], &p[2], l),
    ));
    let pass = checks.iter().all(|c| c.pass);
    VerificationReport { model: model.name(), arity: model.arity(), seed: cfg.seed, checks, pass }
}

/// Test hook: multiplies one entry of Ř by a constant factor.
#[derive(Clone)]
pub struct MutatedModel {
    pub inner: Arc<dyn RMatrixModel>,
    pub entry: (usize, usize),
    pub factor: C64,
}

impl RMatrixModel for MutatedModel {
    fn name(&self) -> String {
        format!("mutated({}, entry {:?} x {})", self.inner.name(), self.entry, self.factor)
    }
    fn arity(&self) -> Arity {
        self.inner.arity()
    }
    fn rcheck(&self, x: &SpectralArg, y: &SpectralArg) -> Result<ComplexMatrix, RError> {
        let mut m = self.inner.rcheck(x, y)?;
        m[self.entry] *= self.factor;
        Ok(m)
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
