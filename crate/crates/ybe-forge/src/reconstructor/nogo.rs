use super::{series_from_hamiltonian, UniSeries, EXISTENCE_THRESHOLD, OBSTRUCTION_THRESHOLD};
use crate::model_catalog::{grading_factor, telescope_term, two_site_sz, TwistSpec};
use crate::tensor_core::{kron, ComplexMatrix, C64, ZERO};
use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SeriesExistsToOrderN,
    Obstructed,
}

/// Real twist parameters explored by the search. The identity shift is not
/// a free parameter: normalization fixes it (see `normalization_shift`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwistParams {
    pub beta: f64,
    pub identity_shift: C64,
    /// Diagonal telescope A = diag(0, A₁, A₂).
    pub telescope_a: [f64; 3],
    pub grading_alpha: f64,
}

impl TwistParams {
    fn from_vec(x: &[f64]) -> Self {
        Self { beta: x[0], identity_shift: ZERO, telescope_a: [0.0, x[1], x[2]], grading_alpha: x[3] }
    }

    pub fn to_twist(&self) -> TwistSpec {
        let r = |v: f64| C64::new(v, 0.0);
        TwistSpec {
            gauge_g: None,
            grading_alpha: Some(r(self.grading_alpha)),
            telescope_a: Some(self.telescope_a.map(r)),
            identity_shift: self.identity_shift,
            sz_shift: r(self.beta),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StartOutcome {
    pub start: [f64; 4],
    pub residual: f64,
    pub params: TwistParams,
    pub iterations: u64,
    pub converged: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub model: String,
    pub truncation_order: usize,
    /// Index into `residual_by_order` of the first residual above 1e-6.
    pub order_failed: Option<usize>,
    pub residual_by_order: Vec<f64>,
    pub twist_params_at_optimum: Option<TwistParams>,
    /// Residual with no twist beyond normalization.
    pub trivial_twist_residual: Option<f64>,
    pub verdict: Verdict,
    /// Best residual is below the existence threshold (1e-10), not merely
    /// below the obstruction threshold.
    pub meets_existence_threshold: bool,
    pub scope: String,
    pub starts: Vec<StartOutcome>,
}

impl ObstructionReport {
    pub(super) fn single(series: &UniSeries, failed: usize, n: usize) -> Self {
        Self {
            model: String::new(),
            truncation_order: n,
            order_failed: Some(failed),
            residual_by_order: series.residual_by_order.clone(),
            twist_params_at_optimum: None,
            trivial_twist_residual: None,
            verdict: Verdict::Obstructed,
            meets_existence_threshold: false,
            scope: format!("univariate series to order {n} at the given twist"),
            starts: Vec::new(),
        }
    }
}

/// Box and multistart grid of the twist search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchSpace {
    /// Grid values used for each of β, A₁, A₂ (α starts at 0).
    pub grid: Vec<f64>,
    /// |β|, |A₁|, |A₂| bound.
    pub bound: f64,
    pub alpha_bound: f64,
    pub initial_step: f64,
    pub max_iters: u64,
    /// Deterministic jitter of the start points.
    pub seed: u64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self { grid: vec![-0.5, 0.0, 0.5], bound: 3.0, alpha_bound: 2.0, initial_step: 0.3, max_iters: 1500, seed: 0 }
    }
}

/// H twisted by real parameters (grading, telescope, S^z shift).
fn twisted(h: &ComplexMatrix, p: &TwistParams) -> ComplexMatrix {
    let r = |v: f64| C64::new(v, 0.0);
    let f = kron(&grading_factor(r(p.grading_alpha)), &grading_factor(r(-p.grading_alpha)));
    let fi = kron(&grading_factor(r(-p.grading_alpha)), &grading_factor(r(p.grading_alpha)));
    let mut out = f.matmul(h).matmul(&fi);
    out = &out + &telescope_term(p.telescope_a.map(r));
    &out + &two_site_sz().scale(r(p.beta))
}

/// Residuals of orders 2..=n; an obstructed order is padded forward so that
/// every profile has the same length.
fn residual_profile(h: &ComplexMatrix, n: usize) -> (Vec<f64>, C64) {
    let s = series_from_hamiltonian(h, n);
    let mut r: Vec<f64> = s.residual_by_order[2.min(s.residual_by_order.len())..].to_vec();
    let fill = r.last().copied().unwrap_or(0.0);
    r.resize(n.saturating_sub(1), fill);
    (r, s.normalization_shift)
}

fn worst(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, &x| if x.is_nan() { f64::INFINITY } else { m.max(x) })
}

struct Objective<'a> {
    h: &'a ComplexMatrix,
    n: usize,
    space: &'a SearchSpace,
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, argmin::core::Error> {
        let excess = x[..3].iter().map(|v| (v.abs() - self.space.bound).max(0.0)).sum::<f64>()
            + (x[3].abs() - self.space.alpha_bound).max(0.0);
        if excess > 0.0 {
            return Ok(1e6 * (1.0 + excess));
        }
        let (r, _) = residual_profile(&twisted(self.h, &TwistParams::from_vec(x)), self.n);
        let s: f64 = r.iter().map(|v| v * v).sum();
        Ok(if s.is_finite() { s.min(1e6) } else { 1e6 })
    }
}

fn run_start(h: &ComplexMatrix, n: usize, space: &SearchSpace, start: [f64; 4]) -> StartOutcome {
    let obj = Objective { h, n, space };
    let mut simplex = vec![start.to_vec()];
    for i in 0..4 {
        let mut p = start.to_vec();
        p[i] += space.initial_step;
        simplex.push(p);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-30);
    let outcome = solver.and_then(|s| {
        Executor::new(obj, s).configure(|st| st.max_iters(space.max_iters)).run()
    });
    let (best, iterations, converged, note) = match outcome {
        Ok(res) => {
            let st = res.state();
            let best = st.get_best_param().cloned().unwrap_or_else(|| start.to_vec());
            let status = st.get_termination_status();
            let converged = !matches!(status, TerminationStatus::Terminated(TerminationReason::MaxItersReached));
            let note = (!converged).then(|| format!("{status}"));
            (best, st.get_iter(), converged, note)
        }
        Err(e) => (start.to_vec(), 0, false, Some(e.to_string())),
    };
    let mut params = TwistParams::from_vec(&best);
    let (r, shift) = residual_profile(&twisted(h, &params), n);
    params.identity_shift = shift;
    StartOutcome { start, residual: worst(&r), params, iterations, converged, note }
}

/// Minimizes the consistency residuals over S^z shift, telescope and grading
/// from a multistart grid. Obstructed iff the optimized residual exceeds
/// 1e-6 at every start.
pub fn certify_no_go(model: &str, h: &ComplexMatrix, n: usize, space: &SearchSpace) -> ObstructionReport {
    let n = n.max(2);
    let mut starts = Vec::new();
    for (i, &b) in space.grid.iter().enumerate() {
        for (j, &a1) in space.grid.iter().enumerate() {
            for (k, &a2) in space.grid.iter().enumerate() {
                let jitter = |slot: usize| {
                    if space.seed == 0 {
                        return 0.0;
                    }
                    // splitmix-style hash, deterministic per (seed, start, slot)
                    let mut z = space.seed ^ ((i * 100 + j * 10 + k) as u64) << 8 ^ slot as u64;
                    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                    ((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.1
                };
                starts.push([b + jitter(0), a1 + jitter(1), a2 + jitter(2), jitter(3)]);
            }
        }
    }
    let outcomes: Vec<StartOutcome> = starts.par_iter().map(|s| run_start(h, n, space, *s)).collect();
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.residual.total_cmp(&b.residual).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one start");
    let params = outcomes[best].params;
    let (profile, _) = residual_profile(&twisted(h, &params), n);
    let (trivial, _) = residual_profile(h, n);
    let best_residual = outcomes[best].residual;
    let obstructed = !(best_residual <= OBSTRUCTION_THRESHOLD);
    // profile[i] is the residual of coefficient i + 2
    let mut residual_by_order = vec![0.0, 0.0];
    residual_by_order.extend(profile);
    let order_failed = residual_by_order.iter().position(|r| !(*r <= OBSTRUCTION_THRESHOLD));
    ObstructionReport {
        model: model.to_string(),
        truncation_order: n,
        order_failed: if obstructed { order_failed } else { None },
        residual_by_order,
        twist_params_at_optimum: Some(params),
        trivial_twist_residual: Some(worst(&trivial)),
        verdict: if obstructed { Verdict::Obstructed } else { Verdict::SeriesExistsToOrderN },
        meets_existence_threshold: best_residual < EXISTENCE_THRESHOLD,
        scope: format!(
            "finite-order check: no multiplicative series to order {n} under S^z shift, telescope and grading \
             twists (telescoped solutions are bivariate)"
        ),
        starts: outcomes,
    }
}
