use proptest::prelude::*;
use std::sync::Arc;
use ybe_forge::baxterizer::*;
use ybe_forge::cba_engine::*;
use ybe_forge::model_catalog::*;
use ybe_forge::reconstructor::{certify_no_go, series_from_hamiltonian, SearchSpace, Verdict};
use ybe_forge::rmatrix_catalog::{RError, RMatrixModel, SpectralArg, TwistedModel, ZfModel};
use ybe_forge::tensor_core::*;
use ybe_forge::verifier::{ice_rule_check, ybe_residual_braided, ybe_residual_multiplicative};

fn cx(v: (f64, f64)) -> C64 {
    c(v.0, v.1)
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(cx)
}

fn matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| ComplexMatrix::from_row_major(dim, v).unwrap())
}

fn params() -> impl Strategy<Value = HamiltonianParams> {
    prop::collection::vec(complex(), 19).prop_map(|x| {
        let mut v = [[ZERO; 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            row.copy_from_slice(&x[10 + 3 * i..13 + 3 * i]);
        }
        HamiltonianParams {
            p: x[0], q: x[1], t1: x[2], t2: x[3], t3: x[4], s1: x[5], s2: x[6], s3: x[7], tp: x[8], sp: x[9], v,
        }
    })
}

/// Points on an annulus around 1, away from 0.
fn spectral() -> impl Strategy<Value = C64> {
    (0.6..1.6f64, -3.0..3.0f64).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn sorted_spectra_match(a: &[Vec<C64>], b: &[Vec<C64>], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| spectral_set_compare(x, y, tol).map(|m| m.pass).unwrap_or(false))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in matrix(3), b in matrix(3), d in matrix(3)) {
        let l = kron(&kron(&a, &b), &d);
        let r = kron(&a, &kron(&b, &d));
        prop_assert!(l.dist(&r) <= 1e-15);
    }

    #[test]
    fn embed_agrees_with_index_contraction(m in matrix(9), l in 3usize..=4, first in 1usize..=3) {
        prop_assume!(first < l);
        let a = embed(&m, LegEmbedding::new(l, first).unwrap()).unwrap();
        let b = embed_pair(&m, l, first - 1, first);
        prop_assert!(a.dist(&b) <= 1e-13);
    }

    #[test]
    fn permutation_swaps_factors(a in matrix(3), b in matrix(3)) {
        let p = permutation_operator();
        prop_assert_eq!(p.matmul(&p), ComplexMatrix::identity(9));
        prop_assert_eq!(p.transpose(), p.clone());
        let swapped = p.matmul(&kron(&a, &b)).matmul(&p);
        prop_assert!(swapped.dist(&kron(&b, &a)) <= 1e-15);
    }

    #[test]
    fn two_site_hamiltonian_conserves_sz(p in params()) {
        let h = build_two_site(&p);
        prop_assert_eq!(ice_rule_check(&h), 0.0);
        prop_assert!(h.commutator(&two_site_sz()).sup_norm() <= 1e-14);
        let back = HamiltonianParams::from_matrix(&h).unwrap();
        prop_assert_eq!(build_two_site(&back), h);
    }

    #[test]
    fn charge_conjugation_is_an_involution(p in params()) {
        let h = build_two_site(&p);
        prop_assert_eq!(charge_conjugate(&charge_conjugate(&h)), h.clone());
        prop_assert_eq!(build_two_site(&p.charge_conjugated()), charge_conjugate(&h));
    }

    #[test]
    fn plump_energy_is_vacuum_energy_of_the_conjugate(p in params(), k in prop::collection::vec(complex(), 0..4), l in 2usize..6) {
        let e = energy_plump(&p, l, &BetheRoots { k: k.clone(), reference: Reference::Plump }).unwrap();
        let d = energy_vacuum(&p.charge_conjugated(), l, &BetheRoots { k, reference: Reference::Vacuum }).unwrap();
        prop_assert!((e - d).norm() <= 1e-13 * e.norm().max(1.0));
    }

    #[test]
    fn spectral_compare_ignores_order(v in prop::collection::vec(complex(), 1..12), seed in any::<u64>()) {
        let mut w = v.clone();
        // Fisher-Yates driven by the seed
        let mut s = seed;
        for i in (1..w.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            w.swap(i, (s >> 33) as usize % (i + 1));
        }
        let m = spectral_set_compare(&v, &w, 1e-12).unwrap();
        prop_assert!(m.pass);
        prop_assert_eq!(m.max_distance, 0.0);
    }

    #[test]
    fn reconstructed_coefficients_keep_the_ice_rule(p in params()) {
        // orders past an obstruction are still built; each must conserve S^z
        for m in &series_from_hamiltonian(&build_two_site(&p), 4).coeffs {
            prop_assert_eq!(ice_rule_check(m), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_twists_keep_chain_spectra(
        p in params(),
        g in prop::collection::vec((0.5..1.5f64, -1.0..1.0f64), 3),
        a in prop::collection::vec(complex(), 3),
        shift in complex(),
    ) {
        let h = build_two_site(&p);
        let twist = TwistSpec {
            gauge_g: Some(ComplexMatrix3::diag([C64::from_polar(g[0].0, g[0].1), C64::from_polar(g[1].0, g[1].1), C64::from_polar(g[2].0, g[2].1)])),
            telescope_a: Some([a[0], a[1], a[2]]),
            identity_shift: shift,
            ..Default::default()
        };
        let ht = apply_twist_h(&h, &twist).unwrap();
        let l = 3;
        // the shift moves every level by L·shift
        let shifted: Vec<Vec<C64>> =
            chain_spectra(&h, l).unwrap().into_iter().map(|s| s.into_iter().map(|e| e + shift * l as f64).collect()).collect();
        prop_assert!(sorted_spectra_match(&shifted, &chain_spectra(&ht, l).unwrap(), 1e-9));
    }

    #[test]
    fn charge_conjugation_mirrors_sectors(p in params()) {
        let h = build_two_site(&p);
        let l = 3;
        let a = chain_spectra(&h, l).unwrap();
        let mut b = chain_spectra(&charge_conjugate(&h), l).unwrap();
        b.reverse();
        prop_assert!(sorted_spectra_match(&a, &b, 1e-9));
    }

    #[test]
    fn twisted_zf_solves_ybe(
        k in (1.2..3.0f64, -0.5..0.5f64),
        g in prop::collection::vec(complex(), 3),
        alpha in complex(),
        a in prop::collection::vec(complex(), 3),
        shift in complex(),
        x in spectral(), y in spectral(), z in spectral(),
    ) {
        let zf: Arc<dyn RMatrixModel> = Arc::new(ZfModel { k: cx(k) });
        let twist = TwistSpec {
            gauge_g: Some(ComplexMatrix3::diag([ONE + g[0] * 0.3, ONE + g[1] * 0.3, ONE + g[2] * 0.3])),
            grading_alpha: Some(alpha * 0.5),
            telescope_a: Some([a[0] * 0.5, a[1] * 0.5, a[2] * 0.5]),
            identity_shift: shift * 0.5,
            sz_shift: ZERO,
        };
        let tw = TwistedModel::new(zf, twist).unwrap();
        let r = ybe_residual_braided(&tw, &SpectralArg::Scalar(x), &SpectralArg::Scalar(y), &SpectralArg::Scalar(z));
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-10);
    }

    #[test]
    fn hecke_operators_baxterize(c1 in complex(), c2 in (0.3..1.5f64, -3.0..3.0f64), u in spectral(), v in spectral()) {
        // c1 + c2·P has two eigenvalues and satisfies the braid relation
        let h = &ComplexMatrix::identity(9).scale(c1) + &permutation_operator().scale(C64::from_polar(c2.0, c2.1));
        let fit = hecke_fit(&h).unwrap();
        prop_assert!(fit.max_residual() <= 1e-10);
        let rc = |w: C64| hecke_baxterize(&fit, w).map_err(|_| RError::Pole("hecke".into()));
        let r = ybe_residual_multiplicative(rc, u, v);
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-10);
    }

    #[test]
    fn tl_operators_baxterize(
        b in prop::collection::vec((0.5..1.5f64, -3.0..3.0f64), 3),
        s in (0.3..1.5f64, -3.0..3.0f64),
        shift in complex(),
        u in spectral(), v in spectral(),
    ) {
        // e = |B⟩⟨B⁻¹| with B anti-diagonal generates a Temperley-Lieb algebra
        let mut bm = ComplexMatrix::zeros(3);
        for (i, &(r, t)) in b.iter().enumerate() {
            bm[(i, 2 - i)] = C64::from_polar(r, t);
        }
        let bi = inverse(&bm).unwrap();
        let e = ComplexMatrix::from_fn(9, |r, col| bm[(r / 3, r % 3)] * bi[(col % 3, col / 3)]);
        let h = &e.scale(C64::from_polar(s.0, s.1)) + &ComplexMatrix::identity(9).scale(shift);
        let fit = tl_fit(&h).unwrap();
        prop_assert!(fit.max_residual() <= 1e-9);
        let rc = |w: C64| tl_baxterize(&fit, w).map_err(|_| RError::Pole("tl".into()));
        let r = ybe_residual_multiplicative(rc, u, v);
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-10);
    }
}

proptest! {
    // each case runs a multistart search
    #![proptest_config(ProptestConfig::with_cases(2))]

    #[test]
    fn no_go_verdict_survives_small_real_twists(
        xi in prop::sample::select(vec![1.0, 2.0]),
        alpha in -0.2..0.2f64,
        a in prop::collection::vec(-0.2..0.2f64, 3),
        beta in -0.2..0.2f64,
    ) {
        let twist = TwistSpec {
            grading_alpha: Some(re(alpha)),
            telescope_a: Some([re(a[0]), re(a[1]), re(a[2])]),
            sz_shift: re(beta),
            ..Default::default()
        };
        let h = apply_twist_h(&h14(re(xi)), &twist).unwrap();
        let space = SearchSpace { grid: vec![-0.5, 0.5], ..Default::default() };
        let want = if xi == 2.0 { Verdict::SeriesExistsToOrderN } else { Verdict::Obstructed };
        prop_assert_eq!(certify_no_go("h14", &h, 4, &space).verdict, want);
    }
}
