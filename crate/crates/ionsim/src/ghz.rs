//! GHZ preparation circuits and the ideal target state
//! `(|0...0> + (-1)^floor((N-1)/2) |1...1>)/sqrt(2)`.
//!
//! The builder follows the hardware recipe: one Hadamard on the first qubit,
//! a ladder of `N-1` CX gates, and, between consecutive CX gates,
//! dynamical-decoupling layers of alternating `R_y(pi)` / `R_y(-pi)` pulses
//! on every qubit already entangled. The decoupling layers flip the relative
//! sign of the two GHZ branches depending on layer size, so the builder
//! tracks the accumulated sign analytically and, when it disagrees with the
//! target convention, restores it with one trailing virtual `R_z(pi)` on
//! qubit 0 (zero duration, zero cost on hardware).

use std::f64::consts::PI;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::math::c64;
use crate::state::StateVector;

/// Qubit counts follow the demonstrated range 2..=8 but the builder accepts
/// up to 10.
pub const MAX_GHZ_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzSpec {
    pub n: usize,
    pub include_dd: bool,
}

impl GhzSpec {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_GHZ_QUBITS).contains(&n) {
            return Err(Error::QubitCount {
                n,
                min: 2,
                max: MAX_GHZ_QUBITS,
            });
        }
        Ok(Self {
            n,
            include_dd: true,
        })
    }

    pub fn without_dd(mut self) -> Self {
        self.include_dd = false;
        self
    }
}

/// Relative sign of the `|1...1>` branch in the target state:
/// `(-1)^floor((N-1)/2)`.
pub fn ghz_sign(n: usize) -> f64 {
    if ((n - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The ideal N-qubit GHZ state.
pub fn ideal_ghz_state(n: usize) -> Result<StateVector> {
    if !(2..=MAX_GHZ_QUBITS).contains(&n) {
        return Err(Error::QubitCount {
            n,
            min: 2,
            max: MAX_GHZ_QUBITS,
        });
    }
    let dim = 1usize << n;
    let amp = 1.0 / 2.0_f64.sqrt();
    let mut amplitudes = vec![c64(0.0, 0.0); dim];
    amplitudes[0] = c64(amp, 0.0);
    amplitudes[dim - 1] = c64(ghz_sign(n) * amp, 0.0);
    StateVector::from_amplitudes(n, amplitudes)
}

/// Relative sign the bare circuit produces before any correction: each
/// decoupling layer on `k+1` qubits multiplies the `|1...1>` branch by
/// `(-1)^(k+1)` relative to the `|0...0>` branch.
fn natural_sign(spec: &GhzSpec) -> f64 {
    if !spec.include_dd || spec.n < 3 {
        return 1.0;
    }
    let flips: usize = (1..=spec.n - 2).map(|k| k + 1).sum();
    if flips.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Build the preparation circuit. Noiseless simulation of the result always
/// reproduces [`ideal_ghz_state`] exactly (up to global phase).
pub fn build_ghz_circuit(spec: &GhzSpec) -> Result<Circuit> {
    let n = spec.n;
    if !(2..=MAX_GHZ_QUBITS).contains(&n) {
        return Err(Error::QubitCount {
            n,
            min: 2,
            max: MAX_GHZ_QUBITS,
        });
    }
    let mut circuit = Circuit::new(n);
    circuit.push(Instruction::h(0))?;
    for k in 1..n {
        circuit.push(Instruction::cx(k - 1, k))?;
        // decoupling layers run between CX gates, not after the last one
        if spec.include_dd && k <= n - 2 {
            let angle = if k % 2 == 1 { PI } else { -PI };
            for q in 0..=k {
                circuit.push(Instruction::r_y(q, angle))?;
            }
        }
    }
    if natural_sign(spec) != ghz_sign(n) {
        circuit.push(Instruction::r_z(0, PI))?;
    }
    Ok(circuit)
}
