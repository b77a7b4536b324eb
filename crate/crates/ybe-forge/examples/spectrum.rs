//! Compares one-magnon Bethe energies with exact diagonalization.
use ybe_forge::cba_engine::{chain_spectra, energy_vacuum, solve_free_momenta, spectral_set_compare, Reference};
use ybe_forge::model_catalog::{HamiltonianParams, NamedModel};
use ybe_forge::tensor_core::re;

fn main() {
    let h = NamedModel::Zf { k: re(2.0) }.hamiltonian().unwrap();
    let params = HamiltonianParams::from_matrix(&h).unwrap();
    let l = 4;
    let spectra = chain_spectra(&h, l).unwrap();
    for (m, levels) in spectra.iter().enumerate() {
        println!("M = {m}: {} levels", levels.len());
    }
    let bethe: Vec<_> = solve_free_momenta(l, Reference::Vacuum).iter().map(|k| energy_vacuum(&params, l, k).unwrap()).collect();
    let m = spectral_set_compare(&bethe, &spectra[1], 1e-10).unwrap();
    println!("M = 1 Bethe vs exact: max distance {:.1e}, pass {}", m.max_distance, m.pass);
}
