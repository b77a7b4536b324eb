use super::{guard, ModelError};
use crate::tensor_core::{c, re, ComplexMatrix, C64, ONE};
use std::f64::consts::PI;

/// Default cube root of unity used for J in the generalized Bariev family.
pub const J_DEFAULT: C64 = C64::new(-0.5, 0.866_025_403_784_438_6);

/// Builder over explicit (row, col, value) lists.
fn from_entries(entries: &[((usize, usize), C64)]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(9);
    for &(pos, v) in entries {
        h[pos] += v;
    }
    h
}

/// υ from −4ξυ = φ² − φψ + ψ².
pub fn gb_upsilon(phi: C64, psi: C64, xi: C64) -> Result<C64, ModelError> {
    guard(xi, "xi = 0 in -4 xi upsilon = ...")?;
    Ok(-(phi * phi - phi * psi + psi * psi) / (xi * 4.0))
}

/// Generalized Bariev Hamiltonian with υ fixed by (φ, ψ, ξ).
pub fn gb_hamiltonian(phi: C64, psi: C64, xi: C64, j: C64) -> Result<ComplexMatrix, ModelError> {
    let ups = gb_upsilon(phi, psi, xi)?;
    gb_hamiltonian_with_upsilon(phi, psi, xi, ups, j)
}

/// Same matrix with υ supplied directly (needed for the ξ → 0 limit).
pub fn gb_hamiltonian_with_upsilon(
    phi: C64,
    psi: C64,
    xi: C64,
    ups: C64,
    j: C64,
) -> Result<ComplexMatrix, ModelError> {
    guard(phi, "phi = 0")?;
    let j2 = j * j;
    let w = psi - xi * xi / phi;
    Ok(from_entries(&[
        ((0, 0), -ups),
        ((1, 3), phi),
        ((2, 2), -ups - j2 * xi),
        ((2, 4), phi),
        ((2, 6), xi),
        ((3, 1), psi),
        ((4, 2), -j2 * w),
        ((4, 4), ups - xi),
        ((4, 6), w),
        ((5, 7), psi),
        ((6, 2), xi),
        ((6, 4), -j * phi),
        ((6, 6), -ups - j * xi),
        ((7, 5), phi),
        ((8, 8), -ups),
    ]))
}

/// Auxiliary constants of the main-branch Hamiltonian at the special point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mb0Aux {
    pub rho: C64,
    pub eta: C64,
}

pub fn mb0_aux(alpha: C64, beta: C64, j0: C64) -> Result<Mb0Aux, ModelError> {
    let d = alpha * alpha - alpha * beta + beta * beta;
    guard(d, "alpha^2 - alpha beta + beta^2 = 0")?;
    guard(j0, "J0 = 0")?;
    // principal square root, cut on the negative real axis
    let eta = -(alpha * beta - 1.0).sqrt() / j0;
    Ok(Mb0Aux { rho: re(4.0) / d, eta })
}

pub fn mb0_hamiltonian(alpha: C64, beta: C64, j0: C64) -> Result<(ComplexMatrix, Mb0Aux), ModelError> {
    let aux = mb0_aux(alpha, beta, j0)?;
    let (rho, eta) = (aux.rho, aux.eta);
    let j02 = j0 * j0;
    let h = from_entries(&[
        ((0, 0), ONE),
        ((1, 3), -beta * rho),
        ((2, 2), ONE + j02 * rho),
        ((2, 4), -j02 * eta * rho),
        ((2, 6), rho),
        ((3, 1), -alpha * rho),
        ((4, 2), -j02 * eta * rho),
        ((4, 4), -ONE - rho),
        ((4, 6), -eta * rho),
        ((5, 7), -alpha * rho),
        ((6, 2), rho),
        ((6, 4), -eta * rho),
        ((6, 6), ONE + rho / j02),
        ((7, 5), -beta * rho),
        ((8, 8), ONE),
    ]);
    Ok((h, aux))
}

fn h17_common(lambda: C64, j: C64) -> Vec<((usize, usize), C64)> {
    vec![
        ((0, 0), -lambda),
        ((2, 2), -lambda),
        ((4, 4), lambda),
        ((6, 6), -lambda),
        ((8, 8), -lambda),
        ((1, 3), -j),
        ((2, 4), -j),
        ((4, 2), -j),
        ((3, 1), ONE),
        ((4, 6), ONE),
        ((5, 7), ONE),
        ((6, 4), ONE),
    ]
}

/// 17-vertex special-branch Hamiltonian. The fourth J-term is E21⊗E12; the
/// printed E21⊗E21 breaks the ice rule (see `h17_as_printed`).
pub fn h17(lambda: C64, j: C64) -> ComplexMatrix {
    let mut e = h17_common(lambda, j);
    e.push(((7, 5), -j));
    from_entries(&e)
}

/// Verbatim transcription including the E21⊗E21 term at (|22⟩, |11⟩).
pub fn h17_as_printed(lambda: C64, j: C64) -> ComplexMatrix {
    let mut e = h17_common(lambda, j);
    e.push(((8, 4), -j));
    from_entries(&e)
}

/// 14-vertex Hamiltonian.
pub fn h14(xi: C64) -> ComplexMatrix {
    let half = re(0.5);
    from_entries(&[
        ((1, 3), ONE),
        ((2, 4), ONE),
        ((6, 4), -ONE),
        ((5, 7), ONE),
        ((2, 6), ONE),
        ((2, 2), half),
        ((6, 6), half),
        ((4, 4), ONE),
        ((5, 5), re(1.5)),
        ((7, 7), xi - 1.5),
        ((8, 8), xi),
    ])
}

/// exp(iπ/3), the default root of j² − j + 1 = 0 for the special branch.
pub fn j_sixth() -> C64 {
    c((PI / 3.0).cos(), (PI / 3.0).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_catalog::ice_violation;

    #[test]
    fn j_default_is_primitive_cube_root() {
        assert!((J_DEFAULT.powu(3) - ONE).norm() < 1e-15);
        assert!((J_DEFAULT - j_sixth() * j_sixth()).norm() < 1e-15);
    }

    #[test]
    fn upsilon_at_phi_equals_psi() {
        let phi = c(0.7, 0.2);
        let xi = re(1.3);
        let ups = gb_upsilon(phi, phi, xi).unwrap();
        assert!((ups + phi * phi / (xi * 4.0)).norm() < 1e-15);
    }

    #[test]
    fn gb_entry_02_02() {
        let (phi, psi, xi) = (c(0.4, 0.1), re(-1.2), re(0.9));
        let h = gb_hamiltonian(phi, psi, xi, J_DEFAULT).unwrap();
        let ups = gb_upsilon(phi, psi, xi).unwrap();
        assert_eq!(h[(2, 2)], -ups - J_DEFAULT * J_DEFAULT * xi);
        assert!(ice_violation(&h, 0.0).is_none());
        assert!(gb_hamiltonian(re(0.0), psi, xi, J_DEFAULT).is_err());
    }

    #[test]
    fn gb_xi_to_zero_is_h17_with_j_squared() {
        let lambda = c(0.37, -0.4);
        let j = J_DEFAULT;
        let gb = gb_hamiltonian_with_upsilon(-j * j, ONE, re(0.0), lambda, j).unwrap();
        assert!(gb.dist(&h17(lambda, j * j)) <= 1e-13);
    }

    #[test]
    fn mb0_entries() {
        let (al, be, j0) = (re(1.7), c(0.4, 0.3), c(0.2, 1.1));
        let (h, aux) = mb0_hamiltonian(al, be, j0).unwrap();
        assert_eq!(h[(0, 0)], ONE);
        assert!((aux.eta * aux.eta * j0 * j0 - (al * be - 1.0)).norm() < 1e-14);
        assert!(ice_violation(&h, 0.0).is_none());
    }

    #[test]
    fn h17_and_h14_entries() {
        let lambda = re(0.8);
        let h = h17(lambda, J_DEFAULT);
        assert_eq!(h[(4, 4)], lambda);
        assert!(ice_violation(&h, 0.0).is_none());
        let (row, col, _) = ice_violation(&h17_as_printed(lambda, J_DEFAULT), 0.0).unwrap();
        assert_eq!((row, col), (8, 4));
        let h = h14(re(2.0));
        assert_eq!(h[(7, 7)], re(0.5));
        assert_eq!(h[(2, 6)], ONE);
    }
}
