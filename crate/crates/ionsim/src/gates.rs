//! Closed forms for the machine's native gate set.
//!
//! Three operations are supported by the hardware model: an equatorial-axis
//! rotation `R_phi(theta)`, a virtual `R_z(theta)`, and the Mølmer–Sørensen
//! two-qubit interaction `XX(chi)`. All constructors return the exact
//! analytic matrix, global phase included; numerical matrix exponentials are
//! kept out of the production path and live in the test suite as an
//! independent oracle.

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math::{c64, unitarity_deviation};

/// A labeled gate matrix. Unitary to within 1e-12 by construction.
#[derive(Debug, Clone)]
pub struct GateMatrix {
    pub label: GateLabel,
    pub matrix: Array2<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateLabel {
    RPhi { theta: f64, phi: f64 },
    RZ { theta: f64 },
    MsXX { chi: f64 },
}

impl std::fmt::Display for GateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GateLabel::RPhi { theta, phi } => write!(f, "RPHI(theta={theta}, phi={phi})"),
            GateLabel::RZ { theta } => write!(f, "RZ(theta={theta})"),
            GateLabel::MsXX { chi } => write!(f, "MSXX(chi={chi})"),
        }
    }
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn check_finite(params: &[f64]) -> Result<()> {
    for &p in params {
        if !p.is_finite() {
            return Err(Error::NonFinite(p));
        }
    }
    Ok(())
}

/// Rotation about the equatorial Bloch axis at azimuth `phi`:
/// `exp(-i sigma_phi theta / 2)` with `sigma_phi = sigma_x cos(phi) + sigma_y sin(phi)`.
pub fn r_phi(theta: f64, phi: f64) -> Result<GateMatrix> {
    check_finite(&[theta, phi])?;
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m_i = c64(0.0, -1.0);
    let matrix = array![
        [c64(c, 0.0), m_i * c64(0.0, -phi).exp() * s],
        [m_i * c64(0.0, phi).exp() * s, c64(c, 0.0)],
    ];
    let gate = GateMatrix {
        label: GateLabel::RPhi { theta, phi },
        matrix,
    };
    debug_assert!(unitarity_deviation(&gate.matrix) < 1e-12);
    Ok(gate)
}

/// `R_x(theta) := R_{phi=0}(theta)`.
pub fn r_x(theta: f64) -> Result<GateMatrix> {
    r_phi(theta, 0.0)
}

/// `R_y(theta) := R_{phi=pi/2}(theta)`.
pub fn r_y(theta: f64) -> Result<GateMatrix> {
    r_phi(theta, std::f64::consts::FRAC_PI_2)
}

/// Virtual rotation about the vertical axis: `exp(-i sigma_z theta / 2)`.
pub fn r_z(theta: f64) -> Result<GateMatrix> {
    check_finite(&[theta])?;
    let matrix = array![
        [c64(0.0, -theta / 2.0).exp(), c64(0.0, 0.0)],
        [c64(0.0, 0.0), c64(0.0, theta / 2.0).exp()],
    ];
    Ok(GateMatrix {
        label: GateLabel::RZ { theta },
        matrix,
    })
}

/// Mølmer–Sørensen interaction
/// `XX(chi) = exp(-i chi/2 (sigma_x ⊗ I + I ⊗ sigma_x)^2)`.
///
/// The squared collective operator equals `2I + 2 sigma_x ⊗ sigma_x`, so the
/// exact closed form is `e^{-i chi} (cos(chi) I - i sin(chi) sigma_x ⊗ sigma_x)`,
/// global phase included. Fully entangling at `chi = pi/4`.
pub fn ms_xx(chi: f64) -> Result<GateMatrix> {
    check_finite(&[chi])?;
    let g = c64(0.0, -chi).exp();
    let d = g * chi.cos(); // diagonal
    let a = g * c64(0.0, -chi.sin()); // anti-diagonal via sigma_x ⊗ sigma_x
    let z = c64(0.0, 0.0);
    let matrix = array![
        [d, z, z, a],
        [z, d, a, z],
        [z, a, d, z],
        [a, z, z, d],
    ];
    let gate = GateMatrix {
        label: GateLabel::MsXX { chi },
        matrix,
    };
    debug_assert!(unitarity_deviation(&gate.matrix) < 1e-12);
    Ok(gate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{identity, max_abs_diff, pauli, PAULI_X};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn r_phi_zero_angle_is_identity() {
        for phi in [0.0, 0.7, -2.0, PI] {
            let g = r_phi(0.0, phi).unwrap();
            assert!(max_abs_diff(&g.matrix, &identity(2)) < 1e-15);
        }
    }

    #[test]
    fn r_phi_pi_about_x_is_minus_i_sigma_x() {
        let g = r_phi(PI, 0.0).unwrap();
        let expected = pauli(PAULI_X).mapv(|z| z * c64(0.0, -1.0));
        assert!(max_abs_diff(&g.matrix, &expected) < 1e-15);
    }

    #[test]
    fn r_phi_half_pi_about_y_matches_closed_form() {
        let g = r_phi(FRAC_PI_2, FRAC_PI_2).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        let expected = array![
            [c64(s, 0.0), c64(-s, 0.0)],
            [c64(s, 0.0), c64(s, 0.0)],
        ];
        assert!(max_abs_diff(&g.matrix, &expected) < 1e-15);
    }

    #[test]
    fn r_z_closed_forms() {
        assert!(max_abs_diff(&r_z(0.0).unwrap().matrix, &identity(2)) < 1e-15);
        // spinor periodicity: a full turn is -identity
        let full_turn = r_z(2.0 * PI).unwrap();
        let minus_identity = identity(2).mapv(|z| -z);
        assert!(max_abs_diff(&full_turn.matrix, &minus_identity) < 1e-15);
    }

    #[test]
    fn r_z_pi_is_diag_minus_i_plus_i() {
        let g = r_z(PI).unwrap();
        assert!((g.matrix[(0, 0)] - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((g.matrix[(1, 1)] - c64(0.0, 1.0)).norm() < 1e-15);
        assert!(g.matrix[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn ms_xx_zero_is_identity() {
        let g = ms_xx(0.0).unwrap();
        assert!(max_abs_diff(&g.matrix, &identity(4)) < 1e-15);
    }

    #[test]
    fn ms_xx_is_a_one_parameter_group() {
        let a = ms_xx(0.37).unwrap().matrix;
        let b = ms_xx(0.91).unwrap().matrix;
        let ab = a.dot(&b);
        let sum = ms_xx(0.37 + 0.91).unwrap().matrix;
        assert!(max_abs_diff(&ab, &sum) < 1e-12);
    }

    #[test]
    fn ms_xx_quarter_pi_entangles_ground_state() {
        let g = ms_xx(std::f64::consts::FRAC_PI_4).unwrap();
        // column 0 = action on |00>: e^{-i pi/4} (|00> - i |11>)/sqrt(2)
        let phase = c64(0.0, -std::f64::consts::FRAC_PI_4).exp();
        let amp = phase / 2.0_f64.sqrt();
        assert!((g.matrix[(0, 0)] - amp).norm() < 1e-15);
        assert!((g.matrix[(3, 0)] - amp * c64(0.0, -1.0)).norm() < 1e-15);
        assert!(g.matrix[(1, 0)].norm() < 1e-15);
        assert!(g.matrix[(2, 0)].norm() < 1e-15);
    }

    #[test]
    fn non_finite_parameters_are_rejected() {
        assert!(r_phi(f64::NAN, 0.0).is_err());
        assert!(r_z(f64::INFINITY).is_err());
        assert!(ms_xx(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn axis_rotation_identity() {
        // r_phi(theta, phi) = r_z(phi) r_x(theta) r_z(-phi)
        for &(theta, phi) in &[(0.3, 1.1), (2.0, -0.4), (PI, 2.9)] {
            let lhs = r_phi(theta, phi).unwrap().matrix;
            let rhs = r_z(phi)
                .unwrap()
                .matrix
                .dot(&r_x(theta).unwrap().matrix)
                .dot(&r_z(-phi).unwrap().matrix);
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
    }
}
