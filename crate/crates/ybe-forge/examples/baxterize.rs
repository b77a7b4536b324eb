//! Detects the algebra behind a braid operator and Baxterizes it.
use ybe_forge::baxterizer::{detect_families, hecke_baxterize, hecke_fit};
use ybe_forge::model_catalog::NamedModel;
use ybe_forge::rmatrix_catalog::V17_2Model;
use ybe_forge::tensor_core::{c, re};

fn main() {
    let h = NamedModel::V17_2 { theta0: re(0.3) }.hamiltonian().unwrap();
    for fit in detect_families(&h) {
        println!("{:?}: worst relation residual {:.1e}", fit.family, fit.max_residual());
    }
    let fit = hecke_fit(&h).unwrap();
    let z = c(1.2, 0.3);
    let r = hecke_baxterize(&fit, z).unwrap();
    let closed = V17_2Model { theta0: re(0.3), normalized: false }.rcheck_u(z).unwrap();
    // equal up to a scalar
    let s = closed[(0, 0)] / r[(0, 0)];
    println!("Hecke R(z) vs closed form at z = {z}: {:.1e}", r.scale(s).dist(&closed));
}
