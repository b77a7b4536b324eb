//! Runs every verifier check on the Zamolodchikov-Fateev model.
use ybe_forge::rmatrix_catalog::ZfModel;
use ybe_forge::tensor_core::re;
use ybe_forge::verifier::{verify_model, VerifyConfig};

fn main() {
    let model = ZfModel { k: re(2.0) };
    let report = verify_model(&model, &VerifyConfig { samples: 100, seed: 7, ..Default::default() });
    for ch in &report.checks {
        println!("{:<28} {:>9.2e} (tol {:.0e}) {}", ch.name, ch.max_residual, ch.tolerance, if ch.pass { "ok" } else { "FAIL" });
    }
    println!("{}: {}", report.model, if report.pass { "pass" } else { "fail" });
}
