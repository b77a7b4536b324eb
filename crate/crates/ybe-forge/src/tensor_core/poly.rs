use super::{eigenvalues, ComplexMatrix, TensorError, C64, ONE, ZERO};

/// Horner evaluation; `coeffs[i]` multiplies x^i.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &a| acc * x + a)
}

pub fn poly_deriv(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect()
}

/// Roots of a polynomial (ascending coefficients) via companion-matrix
/// eigenvalues, each polished by a few Newton steps.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>, TensorError> {
    let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(TensorError::DegeneratePolynomial("zero polynomial"));
    }
    let mut deg = coeffs.len() - 1;
    while coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[deg];
    let mut comp = ComplexMatrix::zeros(deg);
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let p = &coeffs[..=deg];
    let dp = poly_deriv(p);
    let mut roots = eigenvalues(&comp)?;
    for r in roots.iter_mut() {
        for _ in 0..6 {
            let d = poly_eval(&dp, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = poly_eval(p, *r) / d;
            *r -= step;
            if step.norm() <= 1e-16 * r.norm().max(1.0) {
                break;
            }
        }
    }
    Ok(roots)
}
