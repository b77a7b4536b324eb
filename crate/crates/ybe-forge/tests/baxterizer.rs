use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ybe_forge::baxterizer::*;
use ybe_forge::model_catalog::NamedModel;
use ybe_forge::rmatrix_catalog::{V17_2Model, ZfModel};
use ybe_forge::tensor_core::{c, embed12, embed23, kron, re, ComplexMatrix, C64, ONE};
use ybe_forge::verifier::ybe_residual_multiplicative;

fn random_z(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.6..1.6), rng.gen_range(-3.0..3.0))
}

fn ratio_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let (ia, _) = a.data().iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).unwrap();
    let s = b.data()[ia] / a.data()[ia];
    a.scale(s).dist(b) / b.sup_norm()
}

/// e = |B⟩⟨B⁻¹| with B anti-diagonal: e² = tr(e)e and e₁e₂e₁ = e₁.
fn tl_generator() -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(3);
    b[(0, 2)] = ONE;
    b[(1, 1)] = c(0.7, 0.2);
    b[(2, 0)] = re(1.3);
    let bi = ybe_forge::tensor_core::inverse(&b).unwrap();
    ComplexMatrix::from_fn(9, |r, s| b[(r / 3, r % 3)] * bi[(s % 3, s / 3)])
}

fn zf_braid_limit() -> ComplexMatrix {
    let m = ZfModel { k: re(2.0) };
    let r1 = m.rcheck_u(re(1e6)).unwrap();
    let r2 = m.rcheck_u(re(2e6)).unwrap();
    &r2.scale(re(2.0)) - &r1
}

fn tl_operator() -> ComplexMatrix {
    &tl_generator().scale(re(0.7)) - &ComplexMatrix::identity(9).scale(re(0.3))
}

fn v17_hamiltonian() -> ComplexMatrix {
    NamedModel::V17_2 { theta0: re(0.3) }.hamiltonian().unwrap()
}

/// Worst multiplicative YBE residual over `n` seeded samples, skipping poles.
fn ybe_worst(rc: impl Fn(C64) -> Result<ComplexMatrix, BaxterError>, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < n {
        let (u, v) = (random_z(&mut rng), random_z(&mut rng));
        let f = |z: C64| rc(z).map_err(|_| ybe_forge::rmatrix_catalog::RError::Pole("baxterized".into()));
        if let Ok(r) = ybe_residual_multiplicative(f, u, v) {
            worst = worst.max(r);
            done += 1;
        }
    }
    worst
}

#[test]
fn tl_generator_oracle() {
    let e = tl_generator();
    assert!(e.matmul(&e).dist(&e.scale(e.trace())) < 1e-14);
    let (e1, e2) = (embed12(&e), embed23(&e));
    assert!(e1.matmul(&e2).matmul(&e1).dist(&e1) < 1e-14);
}

#[test]
fn braid_residual_examples() {
    assert!(braid_relation_residual(&ybe_forge::tensor_core::permutation_operator()) < 1e-15);
    assert_eq!(braid_relation_residual(&ComplexMatrix::identity(9)), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = ComplexMatrix::from_fn(9, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    assert!(braid_relation_residual(&g) > 1e-2);
}

#[test]
fn v17_hamiltonian_is_hecke() {
    let fit = hecke_fit(&v17_hamiltonian()).unwrap();
    assert_eq!(fit.family, Family::Hecke);
    assert!(fit.max_residual() <= 1e-10, "{:?}", fit.residuals);
    let xi = fit.xi.unwrap();
    let r1 = hecke_baxterize(&fit, ONE).unwrap();
    assert!(r1.dist(&ComplexMatrix::identity(9).scale(xi)) < 1e-12);
}

#[test]
fn zf_hamiltonian_is_not_hecke() {
    let h = NamedModel::Zf { k: re(2.0) }.hamiltonian().unwrap();
    assert!(matches!(hecke_fit(&h), Err(BaxterError::Degree(d, 2)) if d > 2));
    assert!(tl_fit(&h).is_err());
}

#[test]
fn hecke_reproduces_v17_2() {
    let fit = hecke_fit(&v17_hamiltonian()).unwrap();
    let m = V17_2Model { theta0: re(0.3), normalized: false };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let z = random_z(&mut rng);
        let d = ratio_dist(&hecke_baxterize(&fit, z).unwrap(), &m.rcheck_u(z).unwrap());
        assert!(d <= 1e-10, "z = {z}: {d:e}");
    }
}

#[test]
fn hecke_derivative_matches_affine_map() {
    let h = v17_hamiltonian();
    let fit = hecke_fit(&h).unwrap();
    let xi = fit.xi.unwrap();
    // Cauchy rule on |z − 1| = 0.1; aliasing error is of order 0.1¹⁶
    let nodes = 16;
    let mut d = ComplexMatrix::zeros(9);
    for k in 0..nodes {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
        let r = hecke_baxterize(&fit, ONE + w * 0.1).unwrap();
        d = &d + &r.scale(ONE / (w * 0.1 * nodes as f64));
    }
    let normalized = d.scale(ONE / xi);
    let expect = &h.scale(2.0 * fit.alpha_scale / xi) + &ComplexMatrix::identity(9).scale((2.0 * fit.beta_shift - xi) / xi);
    assert!(normalized.dist(&expect) <= 1e-10);
}

#[test]
fn hecke_unitarity_and_ybe() {
    let fit = hecke_fit(&v17_hamiltonian()).unwrap();
    assert!(ybe_worst(|z| hecke_baxterize(&fit, z), 50, 1) <= 1e-10);
    let z = c(1.3, 0.4);
    let p = hecke_baxterize(&fit, z).unwrap().matmul(&hecke_baxterize(&fit, ONE / z).unwrap());
    assert!(p.dist(&ComplexMatrix::identity(9).scale(p[(0, 0)])) < 1e-12);
    assert!(matches!(hecke_baxterize(&fit, re(0.0)), Err(BaxterError::Pole(_))));
}

#[test]
fn tl_fit_and_baxterize() {
    let e = tl_generator();
    let fit = tl_fit(&tl_operator()).unwrap();
    assert!(fit.max_residual() <= 1e-11, "{:?}", fit.residuals);
    let a = fit.a.unwrap();
    let tt = &fit.t + &ComplexMatrix::identity(9);
    assert!(tt.matmul(&tt).dist(&tt.scale(2.0 * a)) <= 1e-11 * tt.sup_norm().powi(2));
    // e₁e₂e₁ = e₁ forces 𝔱 = ±e, hence 2a = ±tr(e)
    assert!((2.0 * a - e.trace()).norm().min((2.0 * a + e.trace()).norm()) < 1e-12);
    assert!(ybe_worst(|z| tl_baxterize(&fit, z), 50, 2) <= 1e-10);
    let z = c(0.4, 1.1);
    let p = tl_baxterize(&fit, z).unwrap().matmul(&tl_baxterize(&fit, ONE / z).unwrap());
    assert!(p.dist(&ComplexMatrix::identity(9).scale(p[(0, 0)])) < 1e-12);
}

#[test]
fn tl_operator_families_are_consistent() {
    let fams: Vec<Family> = detect_families(&tl_operator()).iter().map(|f| f.family).collect();
    assert!(fams.contains(&Family::TemperleyLieb) && fams.contains(&Family::Bmw), "{fams:?}");
    let bmw = bmw_fit(&tl_operator()).unwrap();
    assert!(ybe_worst(|z| bmw_baxterize(&bmw, z, BmwSign::Plus), 20, 3) <= 1e-10);
}

#[test]
fn bmw_on_zf_braid_limit() {
    let t = zf_braid_limit();
    let fit = bmw_fit(&t).unwrap();
    assert_eq!(fit.family, Family::Bmw);
    assert!(fit.max_residual() <= 1e-10, "{:?}", fit.residuals);
    let (a, z) = (fit.a.unwrap(), fit.z.clone().unwrap());
    assert!(z.sup_norm() > 1e-3);
    assert!(z.matmul(&fit.t).dist(&z.scale(-a)) <= 1e-11 * z.sup_norm() * fit.t.sup_norm());
    for (sign, seed) in [(BmwSign::Plus, 4), (BmwSign::Minus, 5)] {
        assert!(ybe_worst(|u| bmw_baxterize(&fit, u, sign), 20, seed) <= 1e-10, "{sign:?}");
    }
    assert!(ybe_worst(|u| bmw_baxterize(&fit, u, BmwSign::Plus), 50, 6) <= 1e-10);
}

#[test]
fn bmw_with_vanishing_z_is_hecke() {
    let h = v17_hamiltonian();
    let (hk, bmw) = (hecke_fit(&h).unwrap(), bmw_fit(&h).unwrap());
    assert!(bmw.a.is_none() && bmw.z.as_ref().unwrap().sup_norm() == 0.0);
    for z in [c(1.4, 0.2), c(0.5, -0.8)] {
        let d = ratio_dist(&bmw_baxterize(&bmw, z, BmwSign::Minus).unwrap(), &hecke_baxterize(&hk, ONE / z).unwrap());
        assert!(d < 1e-12);
    }
}

#[test]
fn generic_operator_fits_nothing() {
    let h = kron(&ComplexMatrix::diag(&[re(1.0), re(2.0), re(4.0)]), &ComplexMatrix::diag(&[re(0.5), re(3.0), re(-1.0)]));
    assert!(detect_families(&h).is_empty());
}

#[test]
fn fit_serializes() {
    let v = serde_json::to_value(hecke_fit(&v17_hamiltonian()).unwrap()).unwrap();
    assert_eq!(v["family"], "Hecke");
    assert!(v["xi"].is_array());
}
#[test]
fn flipped_identity_sign_breaks_ybe() {
    let fit = bmw_fit(&zf_braid_limit()).unwrap();
    let xi = fit.xi.unwrap();
    let r = |z: C64| bmw_baxterize(&fit, z, BmwSign::Plus).map(|m| &m + &ComplexMatrix::identity(9).scale(2.0 * xi * z * z / (z * z - 1.0)));
    assert!(ybe_worst(r, 20, 4) > 1e-3);
}
