//! Samples the special-branch spectral curve and checks the YBE there.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ybe_forge::model_catalog::j_sixth;
use ybe_forge::rmatrix_catalog::{curve_residual, sample_curve, RMatrixModel, SbModel};
use ybe_forge::tensor_core::re;
use ybe_forge::verifier::ybe_residual_braided;

fn main() {
    let model = SbModel::new(re(0.3), j_sixth());
    for p in sample_curve(&model.spec, re(1.5)).unwrap().into_iter().flatten() {
        println!("a = {:.4}, b = {:.4}, curve residual {:.1e}", p.a, p.b, curve_residual(&p, &model.spec));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<_> = (0..3).map(|_| model.sample(&mut rng)).collect();
    let r = ybe_residual_braided(&model, &pts[0], &pts[1], &pts[2]).unwrap();
    println!("braided YBE on three random curve points: {r:.1e}");
}
