//! Maps the main-branch Hamiltonian at the special point onto the
//! generalized Bariev one by a diagonal gauge and grading.
use ybe_forge::model_catalog::{find_diagonal_gauge, gb_hamiltonian, mb0_hamiltonian, J_DEFAULT};
use ybe_forge::tensor_core::{c, re, ONE};

fn main() {
    let (phi, psi) = (c(0.4, 0.1), re(-1.2));
    // upsilon = -1 fixes xi
    let xi = (phi * phi - phi * psi + psi * psi) / 4.0;
    let gb = gb_hamiltonian(phi, psi, xi, J_DEFAULT).unwrap();
    let (mb, _) = mb0_hamiltonian(psi / xi, phi / xi, (-ONE / J_DEFAULT).sqrt()).unwrap();
    let fit = find_diagonal_gauge(&mb, &gb).unwrap();
    println!("kappa {:.4}, grading e^(2 alpha) {:.4}, residual {:.1e}", fit.kappa, fit.grading_c, fit.residual);
    println!("{}", serde_json::to_string_pretty(&fit.twist).unwrap());
}
