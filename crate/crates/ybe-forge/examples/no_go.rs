//! Certifies that the 14-vertex Hamiltonian has no multiplicative R-matrix
//! except at xi = 2.
use ybe_forge::model_catalog::h14;
use ybe_forge::reconstructor::{certify_no_go, SearchSpace};
use ybe_forge::tensor_core::re;

fn main() {
    // a smaller start grid keeps the demo short
    let space = SearchSpace { grid: vec![-0.5, 0.5], ..Default::default() };
    for xi in [1.0, 2.0] {
        let r = certify_no_go("h14", &h14(re(xi)), 5, &space);
        let best = r.starts.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
        println!("xi = {xi}: {:?}, best residual {best:.2e}, first failing order {:?}", r.verdict, r.order_failed);
        if let Some(p) = r.twist_params_at_optimum {
            println!("  twist at optimum: beta {:.3}, A {:?}, alpha {:.3}", p.beta, p.telescope_a, p.grading_alpha);
        }
    }
}
