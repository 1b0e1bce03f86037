//! Circuit execution engines.
//!
//! Two paths: a pure state-vector path for noiseless runs and equivalence
//! checks, and a density-matrix path implementing the noise insertion
//! policy:
//!
//! - depolarizing after each native gate on its targets (`p1` / `p2`);
//! - amplitude damping on every qubit for each wall-clock slice (virtual RZ
//!   and barriers take no time);
//! - one collective-dephasing application at the end of the circuit with an
//!   effective kick `sigma_collective * sqrt(total duration)`.
//!
//! Non-native H and CX instructions are expanded to native gates first, so
//! gate noise is always charged per physical pulse.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, GateTimings, InstructionKind};
use crate::error::Result;
use crate::math::c64;
use crate::noise::{self, NoiseSpec};
use crate::state::{qubit_shift, DensityMatrix, StateVector};
use crate::transpile::{instruction_matrix, transpile_to_native};

/// Noiseless pure-state simulation of any circuit (native or not).
pub fn simulate_statevector(circuit: &Circuit) -> Result<StateVector> {
    let mut psi = StateVector::ground_state(circuit.n_qubits)?;
    for ins in &circuit.instructions {
        if ins.kind == InstructionKind::Barrier {
            continue;
        }
        psi.apply_unitary(&instruction_matrix(&ins.kind), &ins.targets)?;
    }
    Ok(psi)
}

/// Result of a noisy run: the final mixed state and the wall-clock length
/// of the executed native circuit.
#[derive(Debug, Clone)]
pub struct NoisyRun {
    pub rho: DensityMatrix,
    pub total_duration: f64,
}

/// Density-matrix simulation under `spec`. The input circuit is transpiled
/// to native gates, so H counts as one pulse and CX as one MS gate plus four
/// pulses.
pub fn simulate_noisy(circuit: &Circuit, spec: &NoiseSpec) -> Result<NoisyRun> {
    spec.validate()?;
    let native = transpile_to_native(circuit)?;
    let rho = DensityMatrix::ground_state(native.n_qubits)?;
    let mut run = NoisyRun {
        rho,
        total_duration: 0.0,
    };
    apply_segment(&mut run, &native, spec)?;
    noise::apply_collective_dephasing(
        &mut run.rho,
        spec.sigma_collective * run.total_duration.sqrt(),
    )?;
    Ok(run)
}

/// Execute a native-gate segment on an existing state, applying gate
/// depolarizing and per-slice damping but no collective dephasing. Used for
/// the preparation circuit and again for analysis pulses.
pub fn apply_segment(run: &mut NoisyRun, native: &Circuit, spec: &NoiseSpec) -> Result<()> {
    let timings = GateTimings::from(spec);
    for ins in &native.instructions {
        if ins.kind == InstructionKind::Barrier {
            continue;
        }
        run.rho
            .apply_unitary(&instruction_matrix(&ins.kind), &ins.targets)?;
        match ins.kind {
            InstructionKind::RPhi { .. } => {
                depolarize_in_place(&mut run.rho, spec.p1, &ins.targets);
            }
            InstructionKind::MsXX { .. } => {
                depolarize_in_place(&mut run.rho, spec.p2, &ins.targets);
            }
            _ => {}
        }
        let dur = ins.duration(&timings);
        if dur > 0.0 {
            damp_all_qubits(&mut run.rho, dur, spec.t1_seconds);
            run.total_duration += dur;
        }
    }
    Ok(())
}

/// Mixture-form depolarizing `rho -> (1-p) rho + p I/d ⊗ tr_targets(rho)`,
/// applied in place. Equals the Kraus set from [`noise::depolarizing`]; the
/// property tests pin the two paths together.
pub(crate) fn depolarize_in_place(rho: &mut DensityMatrix, p: f64, targets: &[usize]) {
    if p == 0.0 {
        return;
    }
    let n = rho.n_qubits();
    let dim = rho.dim();
    let gate_mask: usize = targets
        .iter()
        .map(|&t| 1usize << qubit_shift(n, t))
        .sum();
    let d = 1usize << targets.len();
    // enumerate the gate-subspace diagonal offsets (subsets of gate_mask)
    let mut offsets = Vec::with_capacity(d);
    let mut g = 0usize;
    loop {
        offsets.push(g);
        if g == gate_mask {
            break;
        }
        g = g.wrapping_sub(gate_mask) & gate_mask;
    }
    let rest: Vec<usize> = (0..dim).filter(|i| i & gate_mask == 0).collect();
    let share = p / d as f64;
    let elements = rho.elements_mut();
    for &ri in &rest {
        for &rj in &rest {
            let mut tr = c64(0.0, 0.0);
            for &g0 in &offsets {
                tr += elements[(ri | g0, rj | g0)];
            }
            let add = tr * share;
            for &g0 in &offsets {
                let e = &mut elements[(ri | g0, rj | g0)];
                *e = *e * (1.0 - p) + add;
            }
        }
    }
    // off-diagonal gate blocks just scale by (1-p)
    for i in 0..dim {
        let gi = i & gate_mask;
        for j in 0..dim {
            if (j & gate_mask) != gi {
                elements[(i, j)] *= 1.0 - p;
            }
        }
    }
    debug_assert!((rho.trace() - 1.0).abs() < 1e-9);
}

/// Amplitude damping with the same `duration` on every qubit, applied in
/// place one qubit at a time. Matches the Kraus channel from
/// [`noise::amplitude_damping`]; the property tests pin the two paths.
pub(crate) fn damp_all_qubits(rho: &mut DensityMatrix, duration: f64, t1: f64) {
    let gamma = noise::damping_gamma(duration, t1);
    if gamma == 0.0 {
        return;
    }
    let n = rho.n_qubits();
    let dim = rho.dim();
    let s = (1.0 - gamma).sqrt();
    let elements = rho.elements_mut();
    for q in 0..n {
        let mask = 1usize << qubit_shift(n, q);
        let low = mask - 1;
        for gi in 0..dim / 2 {
            let i0 = ((gi & !low) << 1) | (gi & low);
            let i1 = i0 | mask;
            for gj in 0..dim / 2 {
                let j0 = ((gj & !low) << 1) | (gj & low);
                let j1 = j0 | mask;
                let e11 = elements[(i1, j1)];
                elements[(i0, j0)] += e11 * gamma;
                elements[(i0, j1)] *= s;
                elements[(i1, j0)] *= s;
                elements[(i1, j1)] = e11 * (1.0 - gamma);
            }
        }
    }
    debug_assert!((rho.trace() - 1.0).abs() < 1e-9);
}

/// Dense unitary of a gate matrix embedded on targets; test support for the
/// engines.
pub fn embedded_matrix(u: &Array2<C64>, targets: &[usize], n: usize) -> Result<Array2<C64>> {
    crate::transpile::embed(u, targets, n)
}
