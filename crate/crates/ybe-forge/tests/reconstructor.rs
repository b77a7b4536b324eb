use std::f64::consts::PI;
use ybe_forge::model_catalog::{h14, NamedModel, TwistSpec};
use ybe_forge::reconstructor::*;
use ybe_forge::rmatrix_catalog::{
    braid, derivative_hamiltonian, CurvePoint, IkModel, RError, RMatrixModel, SbModel, SpectralArg, V17_2Model,
    ZfModel, FD_STEP,
};
use ybe_forge::tensor_core::{c, re, ComplexMatrix, C64, ONE, ZERO};
use ybe_forge::verifier::{ice_rule_check, ybe_residual_multiplicative};

/// Taylor coefficients around `center` by the trapezoidal Cauchy rule (oracle).
fn cauchy(f: impl Fn(C64) -> ComplexMatrix, center: C64, r: f64, order: usize) -> Vec<ComplexMatrix> {
    let m = 256;
    let vals: Vec<(C64, ComplexMatrix)> = (0..m)
        .map(|k| {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
            (w, f(center + w * r))
        })
        .collect();
    (0..=order)
        .map(|n| {
            ComplexMatrix::from_fn(9, |i, j| {
                vals.iter().map(|(w, v)| v[(i, j)] * w.powi(-(n as i32))).sum::<C64>() / (m as f64 * r.powi(n as i32))
            })
        })
        .collect()
}

fn normalized(m: ComplexMatrix, a: usize) -> ComplexMatrix {
    let s = m[(4 * a, 4 * a)];
    m.scale(ONE / s)
}

fn series_of(h: &ComplexMatrix, n: usize) -> UniSeries {
    match reconstruct_univariate(h, n, &TwistSpec::default()).unwrap() {
        UniOutcome::Series(s) => s,
        UniOutcome::Obstructed(r) => panic!("unexpected obstruction {:?}", r.residual_by_order),
    }
}

type Closed = Box<dyn Fn(C64) -> Result<ComplexMatrix, RError>>;

fn closed_forms() -> Vec<(&'static str, Box<dyn RMatrixModel>, Closed, f64)> {
    vec![
        ("zf k=2", Box::new(ZfModel { k: re(2.0) }), Box::new(|u| ZfModel { k: re(2.0) }.rcheck_u(u)), 0.2),
        (
            "zf k=1.3+0.4i",
            Box::new(ZfModel { k: c(1.3, 0.4) }),
            Box::new(|u| ZfModel { k: c(1.3, 0.4) }.rcheck_u(u)),
            0.2,
        ),
        ("ik k=2", Box::new(IkModel { k: re(2.0) }), Box::new(|u| IkModel { k: re(2.0) }.rcheck_u(u)), 0.2),
        (
            "17v2 theta0=0.3",
            Box::new(V17_2Model { theta0: re(0.3), normalized: true }),
            Box::new(|u| V17_2Model { theta0: re(0.3), normalized: true }.rcheck_u(u)),
            0.15,
        ),
    ]
}

fn named_hamiltonians() -> Vec<ComplexMatrix> {
    [
        NamedModel::Zf { k: re(2.0) },
        NamedModel::Zf { k: c(1.3, 0.4) },
        NamedModel::Ik { k: re(2.0) },
        NamedModel::V17_2 { theta0: re(0.3) },
    ]
    .iter()
    .map(|m| m.hamiltonian().unwrap())
    .collect()
}

#[test]
fn round_trip_reproduces_closed_form_taylor_coefficients() {
    for ((name, _, f, radius), h) in closed_forms().into_iter().zip(named_hamiltonians()) {
        let s = series_of(&h, 8);
        let a = s.norm_index;
        let oracle = cauchy(|u| normalized(f(u).unwrap(), a), ONE, radius, 8);
        for k in 0..=8 {
            let err = s.coeffs[k].dist(&oracle[k]);
            println!("{name} order {k}: {err:.2e} (|coeff| {:.2e})", oracle[k].sup_norm());
            assert!(err <= 1e-8, "{name} order {k}: {err:e}");
        }
    }
}

#[test]
fn round_trip_from_finite_difference_hamiltonian() {
    // differentiation error (~1e-11) is amplified with the order; compare relatively
    for (name, model, f, radius) in closed_forms() {
        let h = derivative_hamiltonian(model.as_ref(), &SpectralArg::Scalar(ONE), FD_STEP).unwrap().h;
        let s = series_of(&h, 8);
        let oracle = cauchy(|u| normalized(f(u).unwrap(), s.norm_index), ONE, radius, 8);
        for k in 0..=8 {
            let err = s.coeffs[k].dist(&oracle[k]) / oracle[k].sup_norm().max(1.0);
            assert!(err <= 1e-8, "{name} order {k}: {err:e}");
        }
    }
}

#[test]
fn reconstructed_coefficients_obey_the_ice_rule_exactly() {
    for (_, model, _, _) in closed_forms() {
        let h = derivative_hamiltonian(model.as_ref(), &SpectralArg::Scalar(ONE), FD_STEP).unwrap().h;
        // finite differences leave ~1e-17 off-sector noise; project it out
        let h = ComplexMatrix::from_fn(9, |r, c| if r / 3 + r % 3 == c / 3 + c % 3 { h[(r, c)] } else { ZERO });
        for m in &series_of(&h, 8).coeffs {
            assert_eq!(ice_rule_check(m), 0.0);
        }
    }
}

#[test]
fn truncated_series_solves_ybe_to_the_truncation_order() {
    let h = derivative_hamiltonian(&ZfModel { k: re(2.0) }, &SpectralArg::Scalar(ONE), FD_STEP).unwrap().h;
    let n = 4;
    let s = series_of(&h, n);
    let rc = |u: C64| Ok::<_, RError>(series_eval(&s, u).value);
    let r1 = ybe_residual_multiplicative(rc, re(1.01), c(1.0, 0.01)).unwrap();
    let r2 = ybe_residual_multiplicative(rc, re(1.02), c(1.0, 0.02)).unwrap();
    // leading error is of total degree n + 1
    let slope = (r2 / r1).log2();
    println!("residuals {r1:.3e} {r2:.3e} slope {slope:.2}");
    assert!((slope - (n + 1) as f64).abs() < 0.5);
}

#[test]
fn series_eval_matches_closed_form_and_warns_outside_radius() {
    let m = ZfModel { k: re(2.0) };
    let h = derivative_hamiltonian(&m, &SpectralArg::Scalar(ONE), FD_STEP).unwrap().h;
    let s = series_of(&h, 14);
    let v = series_eval(&s, re(1.05));
    let exact = normalized(m.rcheck_u(re(1.05)).unwrap(), s.norm_index);
    println!("tail {:.2e} err {:.2e}", v.tail_estimate, v.value.dist(&exact));
    assert!(v.within_tolerance());
    assert!(v.value.dist(&exact) <= 1e-9);
    assert!(series_eval(&s, re(2.0)).diverging);
}

#[test]
fn fourteen_vertex_xi_one_is_obstructed_for_tested_twists() {
    let twists = [
        TwistSpec::default(),
        TwistSpec { sz_shift: re(-0.5), telescope_a: Some([ZERO, re(-0.5), re(-0.5)]), ..Default::default() },
        TwistSpec { sz_shift: re(-0.25), ..Default::default() },
        TwistSpec { grading_alpha: Some(re(0.4)), identity_shift: re(0.3), ..Default::default() },
    ];
    for t in &twists {
        match reconstruct_univariate(&h14(re(1.0)), 6, t).unwrap() {
            UniOutcome::Obstructed(r) => assert!(r.order_failed.unwrap() <= 6),
            UniOutcome::Series(_) => panic!("h14(1) reconstructed under {t:?}"),
        }
    }
}

#[test]
fn no_go_verdicts() {
    let space = SearchSpace::default();
    let zf = NamedModel::Zf { k: re(2.0) }.hamiltonian().unwrap();
    let r = certify_no_go("zf", &zf, 6, &space);
    assert_eq!(r.verdict, Verdict::SeriesExistsToOrderN);
    assert!(r.trivial_twist_residual.unwrap() < 1e-10);
    assert!(r.starts.len() >= 27);
    for xi in [0.0, 1.0, 3.0] {
        let r = certify_no_go("h14", &h14(re(xi)), 6, &space);
        println!("xi={xi}: best {:?}", r.residual_by_order);
        assert_eq!(r.verdict, Verdict::Obstructed, "xi={xi}");
        assert!(r.starts.iter().all(|s| s.residual > 1e-6));
        let k = r.order_failed.unwrap();
        assert!(r.residual_by_order[k] > 1e-6);
    }
}

#[test]
fn fourteen_vertex_xi_two_matches_seventeen_vertex_at_theta_zero() {
    let r = certify_no_go("h14", &h14(re(2.0)), 6, &SearchSpace::default());
    assert_eq!(r.verdict, Verdict::SeriesExistsToOrderN);
    assert!(r.meets_existence_threshold);
    // the paper's twist: β = −1/2, A = diag(0, −1/2, −1/2)
    let t = TwistSpec { sz_shift: re(-0.5), telescope_a: Some([ZERO, re(-0.5), re(-0.5)]), ..Default::default() };
    let UniOutcome::Series(s) = reconstruct_univariate(&h14(re(2.0)), 6, &t).unwrap() else { panic!("obstructed") };
    assert_eq!(s.norm_index, 0);
    // Ř₁₇(z) with θ₀ = 0 is the reconstructed series at u = z²
    let v = V17_2Model { theta0: ZERO, normalized: true };
    let oracle = cauchy(|u| v.rcheck_u(u.sqrt()).unwrap(), ONE, 0.2, 6);
    for k in 0..=6 {
        let err = s.coeffs[k].dist(&oracle[k]);
        assert!(err < 1e-9, "order {k}: {err:e}");
    }
    // zeros outside the propagated mask are exact
    let mask = sparsity_mask(&h14(re(2.0)));
    assert_eq!(mask_count(&mask), 15);
    for m in &s.coeffs {
        for (r, row) in mask.iter().enumerate() {
            for (c, allowed) in row.iter().enumerate() {
                if !allowed {
                    assert_eq!(m[(r, c)], ZERO, "({r},{c})");
                }
            }
        }
    }
}

#[test]
fn nineteen_vertex_mask_is_the_ice_rule() {
    let h = derivative_hamiltonian(&IkModel { k: re(2.0) }, &SpectralArg::Scalar(ONE), FD_STEP).unwrap().h;
    let h = ComplexMatrix::from_fn(9, |r, c| if r / 3 + r % 3 == c / 3 + c % 3 { h[(r, c)] } else { ZERO });
    let mask = sparsity_mask(&h);
    assert_eq!(mask_count(&mask), 19);
}

fn sb_chart() -> CurveChart {
    CurveChart::new(SbModel::new(re(0.3), ybe_forge::model_catalog::j_sixth()), CurvePoint::new(ONE, ZERO)).unwrap()
}

#[test]
fn bivariate_reconstruction_of_the_special_branch() {
    let chart = sb_chart();
    let order = 6;
    let boundary = curve_boundary_series(&chart, order, 0.05).unwrap();
    let s = reconstruct_bivariate(&boundary, order, DEFAULT_PIN).unwrap();
    // mixed derivative by central differences (oracle)
    let f = |x: f64, y: f64| chart.rcheck(re(x), re(y)).unwrap();
    let mixed = |h: f64| (&(&f(h, h) - &f(h, -h)) - &(&f(-h, h) - &f(-h, -h))).scale(re(1.0 / (4.0 * h * h)));
    let (d1, d2) = (mixed(2e-3), mixed(1e-3));
    let fd = (&d2.scale(re(4.0)) - &d1).scale(re(1.0 / 3.0));
    let err = s.coeff(1, 1).dist(&fd);
    println!("R(1,1) vs finite differences: {err:.2e}");
    assert!(err <= 1e-6);
    for (d, r) in s.diagonal_sum_residual.iter().enumerate() {
        assert!(*r <= 1e-8, "degree {d}: {r:e}");
    }
    assert!(s.unitarity_residual() <= 1e-8);
    // the series agrees with the model away from the axes
    let v = s.eval(c(0.01, 0.004), c(-0.008, 0.002));
    let exact = chart.rcheck(c(0.01, 0.004), c(-0.008, 0.002)).unwrap();
    assert!(v.value.dist(&exact) < 1e-8);
}

#[test]
fn braided_identity_boundary_stays_identity() {
    let mut b = vec![braid(&braid(&ComplexMatrix::identity(9)))];
    b.extend((0..5).map(|_| ComplexMatrix::zeros(9)));
    let s = reconstruct_bivariate(&b, 5, DEFAULT_PIN).unwrap();
    assert!(s.coeffs.iter().flatten().skip(1).all(|m| m.sup_norm() == 0.0));
}
