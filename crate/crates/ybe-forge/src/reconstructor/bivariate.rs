//! Bivariate reconstruction Ř(x, y) = Σ Ř⁽ᵐ'ⁿ⁾ xᵐ yⁿ from the slice Ř(x, 0).
//!
//! The recursion fixes each Ř⁽ᵐ'ⁿ⁾ (m, n ≥ 1) up to a multiple of the
//! identity. That freedom is removed by pinning one diagonal entry,
//! Ř_pp^{pp}(x, y) ≡ 1, which the boundary must already satisfy. Ř(0, x) then
//! follows from Ř(x,0)Ř(0,x) = λ(x) I as Ř(x,0)⁻¹ / (Ř(x,0)⁻¹)_pp.

use super::{extract, geometric_tail, SeriesValue, OBSTRUCTION_THRESHOLD};
use crate::rmatrix_catalog::{taylor_coefficients, CurvePoint, RError, SbModel, SpectralArg};
use crate::tensor_core::{embed12, embed23, poly_deriv, poly_eval, ComplexMatrix, C64, ONE, ZERO};
use serde::Serialize;

/// |10⟩: the special-branch Ř carries a constant 1 there.
pub const DEFAULT_PIN: usize = 3;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BivariateError {
    #[error("boundary is not regular: |Ř(0,0) − I| = {0:.3e}")]
    NotRegular(f64),
    #[error("boundary has {got} coefficients, order {order} needs {}", order + 1)]
    TooShort { got: usize, order: usize },
    #[error("pinned entry {pin} of boundary coefficient {order} is {value:.3e}, expected constant 1")]
    PinMismatch { pin: usize, order: usize, value: f64 },
    #[error("inconsistent recursion at (m, n) = ({m}, {n}): residual {residual:.3e}")]
    Inconsistent { m: usize, n: usize, residual: f64 },
    #[error("diagonal sum identity fails at total degree {degree}: residual {residual:.3e}")]
    DiagonalSum { degree: usize, residual: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BiSeries {
    /// coeffs[m][n] for m + n ≤ order.
    pub coeffs: Vec<Vec<ComplexMatrix>>,
    pub order: usize,
    pub pin: usize,
    /// Consistency residual of each interior coefficient, keyed by (m, n).
    pub residuals: Vec<((usize, usize), f64)>,
    /// ‖Σᵢ Ř⁽ⁱ'ᵈ⁻ⁱ⁾ − δ_{d,0} I‖∞ per total degree d.
    pub diagonal_sum_residual: Vec<f64>,
}

impl BiSeries {
    pub fn coeff(&self, m: usize, n: usize) -> &ComplexMatrix {
        &self.coeffs[m][n]
    }

    /// Largest deviation of Ř(x,y)Ř(y,x) from a multiple of the identity,
    /// coefficient by coefficient up to the series order.
    pub fn unitarity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..=self.order {
            for n in 0..=self.order - m {
                // [xᵐyⁿ] Ř(y,x) = coeffs[n][m]
                let mut p = ComplexMatrix::zeros(9);
                for i in 0..=m {
                    for j in 0..=n {
                        p = &p + &self.coeffs[i][j].matmul(&self.coeffs[n - j][m - i]);
                    }
                }
                let lambda = p.trace() / 9.0;
                worst = worst.max(p.dist(&ComplexMatrix::identity(9).scale(lambda)));
            }
        }
        worst
    }

    /// Partial sum at (x, y) with a geometric tail bound over total degrees.
    pub fn eval(&self, x: C64, y: C64) -> SeriesValue {
        let mut value = ComplexMatrix::zeros(9);
        let mut block = vec![0.0; self.order + 1];
        for m in 0..=self.order {
            for n in 0..=self.order - m {
                value = &value + &self.coeffs[m][n].scale(x.powu(m as u32) * y.powu(n as u32));
                block[m + n] = f64::max(block[m + n], self.coeffs[m][n].sup_norm());
            }
        }
        let t = x.norm().max(y.norm());
        let d = self.order;
        let (tail_estimate, diverging) =
            if d >= 2 { geometric_tail(block[d], block[d - 1], t, d) } else { (0.0, false) };
        SeriesValue { value, tail_estimate, diverging }
    }
}

fn series_inverse(b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut c = vec![ComplexMatrix::identity(9)];
    for k in 1..b.len() {
        let mut acc = ComplexMatrix::zeros(9);
        for i in 1..=k {
            acc = &acc - &b[i].matmul(&c[k - i]);
        }
        c.push(acc);
    }
    c
}

fn scalar_inverse(s: &[C64]) -> Vec<C64> {
    let mut inv = vec![ONE / s[0]];
    for k in 1..s.len() {
        let acc: C64 = (1..=k).map(|i| s[i] * inv[k - i]).sum();
        inv.push(-acc / s[0]);
    }
    inv
}

/// Fills Ř⁽ᵐ'ⁿ⁾ for m + n ≤ `order` from the boundary coefficients Ř⁽ᵐ'⁰⁾.
pub fn reconstruct_bivariate(boundary: &[ComplexMatrix], order: usize, pin: usize) -> Result<BiSeries, BivariateError> {
    if boundary.len() < order + 1 {
        return Err(BivariateError::TooShort { got: boundary.len(), order });
    }
    let b = &boundary[..=order];
    let reg = b[0].dist(&ComplexMatrix::identity(9));
    if reg > 1e-10 {
        return Err(BivariateError::NotRegular(reg));
    }
    for (k, m) in b.iter().enumerate().skip(1) {
        let v = m[(pin, pin)].norm();
        if v > 1e-8 {
            return Err(BivariateError::PinMismatch { pin, order: k, value: v });
        }
    }
    let c = series_inverse(b);
    let s: Vec<C64> = c.iter().map(|m| m[(pin, pin)]).collect();
    let inv = scalar_inverse(&s);
    let left: Vec<ComplexMatrix> = (0..=order)
        .map(|k| (0..=k).fold(ComplexMatrix::zeros(9), |acc, i| &acc + &c[i].scale(inv[k - i])))
        .collect();

    let mut coeffs: Vec<Vec<ComplexMatrix>> =
        (0..=order).map(|m| vec![ComplexMatrix::zeros(9); order + 1 - m]).collect();
    for k in 0..=order {
        coeffs[k][0] = b[k].clone();
        if k > 0 {
            coeffs[0][k] = left[k].clone();
        }
    }
    let mut residuals = Vec::new();
    for d in 2..=order {
        for m in 1..d {
            let n = d - m;
            let q = bivariate_q(&Emb::of(&coeffs), m, n);
            let (mut x, spread) = extract(&q, 0);
            let shift = -x[(pin, pin)];
            x = &x + &ComplexMatrix::identity(9).scale(shift);
            let r = spread + (&(&embed12(&x) - &embed23(&x)) - &q).sup_norm();
            residuals.push(((m, n), r));
            if !(r <= OBSTRUCTION_THRESHOLD) {
                return Err(BivariateError::Inconsistent { m, n, residual: r });
            }
            coeffs[m][n] = x;
        }
    }
    let mut diagonal_sum_residual = Vec::new();
    for d in 0..=order {
        let mut sum = if d == 0 { ComplexMatrix::identity(9).scale(-ONE) } else { ComplexMatrix::zeros(9) };
        for m in 0..=d {
            sum = &sum + &coeffs[m][d - m];
        }
        let r = sum.sup_norm();
        diagonal_sum_residual.push(r);
        if !(r <= OBSTRUCTION_THRESHOLD) {
            return Err(BivariateError::DiagonalSum { degree: d, residual: r });
        }
    }
    Ok(BiSeries { coeffs, order, pin, residuals, diagonal_sum_residual })
}

/// Three-site embeddings of every coefficient filled so far.
struct Emb {
    e12: Vec<Vec<ComplexMatrix>>,
    e23: Vec<Vec<ComplexMatrix>>,
}

impl Emb {
    fn of(coeffs: &[Vec<ComplexMatrix>]) -> Self {
        Self {
            e12: coeffs.iter().map(|r| r.iter().map(embed12).collect()).collect(),
            e23: coeffs.iter().map(|r| r.iter().map(embed23).collect()).collect(),
        }
    }
}

/// Q⁽ᵐ'ⁿ⁾ of the bivariate recursion Ř₁₂⁽ᵐ'ⁿ⁾ − Ř₂₃⁽ᵐ'ⁿ⁾ = Q⁽ᵐ'ⁿ⁾.
fn bivariate_q(e: &Emb, m: usize, n: usize) -> ComplexMatrix {
    let (a, b) = (&e.e12, &e.e23);
    let mut q = ComplexMatrix::zeros(27);
    for i in 1..=m {
        for j in 1..=n {
            q = &q + &a[0][j].matmul(&b[m - i][n - j]).matmul(&a[i][0]);
            q = &q - &b[i][0].matmul(&a[m - i][n - j]).matmul(&b[0][j]);
        }
        q = &q + &b[m - i][n].matmul(&a[i][0]);
        q = &q - &b[i][0].matmul(&a[m - i][n]);
    }
    for j in 1..=n {
        q = &q + &a[0][j].matmul(&b[m][n - j]);
        q = &q - &a[m][n - j].matmul(&b[0][j]);
    }
    q
}

/// Local coordinate s ↦ (a(s), s) on a curve branch through a base point
/// with b = 0, solved by Newton in a.
#[derive(Clone, Copy, Debug)]
pub struct CurveChart {
    pub model: SbModel,
    pub base: CurvePoint,
    slope: C64,
}

impl CurveChart {
    pub fn new(model: SbModel, base: CurvePoint) -> Result<Self, RError> {
        let (fa, fb) = model.spec.partials(base.a, base.b);
        if fa.norm() < 1e-12 {
            return Err(RError::Pole("F_a = 0: b is not a local coordinate".into()));
        }
        Ok(Self { model, base, slope: -fb / fa })
    }

    pub fn point(&self, s: C64) -> Result<CurvePoint, RError> {
        let b = self.base.b + s;
        let p = self.model.spec.a_coefficients(b);
        let dp = poly_deriv(&p);
        let mut a = self.base.a + self.slope * s;
        for _ in 0..40 {
            let d = poly_eval(&dp, a);
            if d == ZERO {
                break;
            }
            let step = poly_eval(&p, a) / d;
            a -= step;
            if step.norm() <= 1e-16 * a.norm().max(1.0) {
                break;
            }
        }
        let pt = CurvePoint::new(a, b);
        let residual = crate::rmatrix_catalog::curve_residual(&pt, &self.model.spec);
        if residual > 1e-10 {
            return Err(RError::RootPolish { b, residual });
        }
        Ok(pt)
    }

    /// Ř in chart coordinates.
    pub fn rcheck(&self, s: C64, t: C64) -> Result<ComplexMatrix, RError> {
        use crate::rmatrix_catalog::RMatrixModel;
        self.model.rcheck(&SpectralArg::Curve(self.point(s)?), &SpectralArg::Curve(self.point(t)?))
    }
}

/// Taylor coefficients of s ↦ Ř(P(s), P(0)) by a Cauchy integral.
pub fn curve_boundary_series(chart: &CurveChart, order: usize, radius: f64) -> Result<Vec<ComplexMatrix>, RError> {
    taylor_coefficients(|s| chart.rcheck(s, ZERO), ZERO, radius, 8 * (order + 1), order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_boundary() {
        let b = vec![ComplexMatrix::identity(9)].into_iter().chain((0..4).map(|_| ComplexMatrix::zeros(9))).collect::<Vec<_>>();
        let s = reconstruct_bivariate(&b, 4, DEFAULT_PIN).unwrap();
        for m in 0..=4 {
            for n in 0..=4 - m {
                let expect = if m + n == 0 { ComplexMatrix::identity(9) } else { ComplexMatrix::zeros(9) };
                assert!(s.coeff(m, n).dist(&expect) < 1e-15);
            }
        }
    }

    #[test]
    fn short_boundary_rejected() {
        let b = vec![ComplexMatrix::identity(9)];
        assert!(matches!(reconstruct_bivariate(&b, 2, 3), Err(BivariateError::TooShort { .. })));
    }
}
