//! Rebuilds the Izergin-Korepin R-matrix as a series from its Hamiltonian.
use ybe_forge::model_catalog::{NamedModel, TwistSpec};
use ybe_forge::reconstructor::{reconstruct_univariate, series_eval, UniOutcome};
use ybe_forge::rmatrix_catalog::IkModel;
use ybe_forge::tensor_core::{re, ONE};

fn main() {
    let h = NamedModel::Ik { k: re(2.0) }.hamiltonian().unwrap();
    let UniOutcome::Series(s) = reconstruct_univariate(&h, 10, &TwistSpec::default()).unwrap() else {
        panic!("IK Hamiltonian should reconstruct");
    };
    for (k, r) in s.residual_by_order.iter().enumerate() {
        println!("order {k:>2}: |R_k| = {:.3e}, consistency {r:.1e}", s.coeffs[k].sup_norm());
    }
    let u = re(1.05);
    let v = series_eval(&s, u);
    let exact = IkModel { k: re(2.0) }.rcheck_u(u).unwrap();
    let exact = exact.scale(ONE / exact[(4 * s.norm_index, 4 * s.norm_index)]);
    println!("at u = 1.05: distance to closed form {:.2e}, tail estimate {:.1e}", v.value.dist(&exact), v.tail_estimate);
}
