//! Transpilation of {H, CX} into the native set, virtual-Z phase folding,
//! and dense unitary reconstruction for equivalence checks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Instruction, InstructionKind};
use crate::error::{Error, Result};
use crate::gates;
use crate::math::{c64, identity, unitarity_deviation};
use crate::state::qubit_shift;

/// Hadamard as the hardware runs it: `R_y(-pi/2)` then a virtual `R_z(pi)`,
/// equal to H up to a global phase of `-i`.
pub fn decompose_h(target: usize) -> Vec<Instruction> {
    vec![
        Instruction::r_y(target, -FRAC_PI_2),
        Instruction::r_z(target, PI),
    ]
}

/// CX via a single fully entangling `XX(pi/4)` dressed with single-qubit
/// rotations: `R_y(pi/2)` on the control, the MS gate, `R_x(-pi/2)` on both,
/// and `R_y(-pi/2)` on the control. Verified against the canonical CX by
/// [`verify_native_decompositions`] and the test suite.
pub fn decompose_cx(control: usize, target: usize) -> Result<Vec<Instruction>> {
    if control == target {
        return Err(Error::DuplicateTarget(control));
    }
    Ok(vec![
        Instruction::r_y(control, FRAC_PI_2),
        Instruction::ms_xx(control, target, FRAC_PI_4),
        Instruction::r_x(control, -FRAC_PI_2),
        Instruction::r_x(target, -FRAC_PI_2),
        Instruction::r_y(control, -FRAC_PI_2),
    ])
}

/// Expand every H and CX into native instructions; native instructions and
/// barriers pass through untouched.
pub fn transpile_to_native(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits);
    for ins in &circuit.instructions {
        match ins.kind {
            InstructionKind::H => out.extend(decompose_h(ins.targets[0]))?,
            InstructionKind::CX => {
                out.extend(decompose_cx(ins.targets[0], ins.targets[1])?)?
            }
            _ => out.push(ins.clone())?,
        }
    }
    Ok(out)
}

/// Output of [`fold_virtual_rz`]: the folded circuit plus the leftover
/// per-qubit Z-frame angles that were never materialized. Reapplying the
/// frames as trailing RZ reproduces the input unitary up to global phase;
/// measured computational-basis probabilities are identical either way.
#[derive(Debug, Clone)]
pub struct FoldedCircuit {
    pub circuit: Circuit,
    pub frames: Vec<f64>,
}

fn wrapped_is_zero(angle: f64) -> bool {
    let r = angle.rem_euclid(TAU);
    r.abs() < 1e-12 || (TAU - r).abs() < 1e-12
}

/// Remove RZ instructions by shifting the phase of all later RPHI pulses on
/// the same qubit. An XX interaction does not commute with a Z frame, so a
/// pending non-trivial frame on either MSXX target is materialized as a real
/// RZ immediately before the gate and folding restarts behind it.
pub fn fold_virtual_rz(circuit: &Circuit) -> Result<FoldedCircuit> {
    let mut frames = vec![0.0_f64; circuit.n_qubits];
    let mut out = Circuit::new(circuit.n_qubits);
    for ins in &circuit.instructions {
        match ins.kind {
            InstructionKind::RZ { theta } => {
                frames[ins.targets[0]] += theta;
            }
            InstructionKind::RPhi { theta, phi } => {
                let q = ins.targets[0];
                out.push(Instruction::r_phi(q, theta, phi - frames[q]))?;
            }
            InstructionKind::MsXX { .. } => {
                let (a, b) = (ins.targets[0], ins.targets[1]);
                if !(wrapped_is_zero(frames[a]) && wrapped_is_zero(frames[b])) {
                    for q in [a, b] {
                        if frames[q] != 0.0 {
                            out.push(Instruction::r_z(q, frames[q]))?;
                            frames[q] = 0.0;
                        }
                    }
                }
                out.push(ins.clone())?;
            }
            InstructionKind::Barrier => out.push(ins.clone())?,
            InstructionKind::H | InstructionKind::CX => {
                return Err(Error::UnsupportedInstruction {
                    kind: ins.kind.name().to_string(),
                });
            }
        }
    }
    Ok(FoldedCircuit {
        circuit: out,
        frames,
    })
}

/// Dense matrix of a single instruction in its own gate space.
pub fn instruction_matrix(kind: &InstructionKind) -> Array2<C64> {
    match *kind {
        InstructionKind::RPhi { theta, phi } => {
            gates::r_phi(theta, phi).expect("finite params").matrix
        }
        InstructionKind::RZ { theta } => gates::r_z(theta).expect("finite params").matrix,
        InstructionKind::MsXX { chi } => gates::ms_xx(chi).expect("finite params").matrix,
        InstructionKind::H => {
            let s = 1.0 / 2.0_f64.sqrt();
            ndarray::array![
                [c64(s, 0.0), c64(s, 0.0)],
                [c64(s, 0.0), c64(-s, 0.0)],
            ]
        }
        InstructionKind::CX => ndarray::array![
            [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
            [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
        ],
        InstructionKind::Barrier => identity(2),
    }
}

/// Embed a 1- or 2-qubit matrix into the full `2^n` space with qubit 0 as
/// the most significant index bit.
pub fn embed(u: &Array2<C64>, targets: &[usize], n: usize) -> Result<Array2<C64>> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::QubitIndex {
                index: t,
                n_qubits: n,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    let k = targets.len();
    if 1 << k != u.nrows() {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: 1 << k,
        });
    }
    let dim = 1usize << n;
    let shifts: Vec<usize> = targets.iter().map(|&t| qubit_shift(n, t)).collect();
    let gate_bits = |idx: usize| -> usize {
        shifts
            .iter()
            .fold(0usize, |acc, &sh| (acc << 1) | ((idx >> sh) & 1))
    };
    let rest_bits = |idx: usize| -> usize {
        let mut masked = idx;
        for &sh in &shifts {
            masked &= !(1usize << sh);
        }
        masked
    };
    let mut full = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            if rest_bits(i) == rest_bits(j) {
                full[(i, j)] = u[(gate_bits(i), gate_bits(j))];
            }
        }
    }
    Ok(full)
}

/// Ordered product of the embedded instruction unitaries. Intended for
/// equivalence checking, so the register is capped at 10 qubits.
pub fn unitary_of_circuit(circuit: &Circuit) -> Result<Array2<C64>> {
    if circuit.n_qubits > 10 {
        return Err(Error::QubitCount {
            n: circuit.n_qubits,
            min: 1,
            max: 10,
        });
    }
    let dim = 1usize << circuit.n_qubits;
    let mut total = identity(dim);
    for ins in &circuit.instructions {
        if ins.kind == InstructionKind::Barrier {
            continue;
        }
        let u = embed(&instruction_matrix(&ins.kind), &ins.targets, circuit.n_qubits)?;
        total = u.dot(&total);
    }
    debug_assert!(unitarity_deviation(&total) < 1e-9);
    Ok(total)
}

/// Max-abs entry difference minimized over a global phase, taken at the
/// stationary phase `alpha = arg tr(v† u)`. Zero iff the matrices agree up
/// to a global phase.
pub fn phase_insensitive_distance(u: &Array2<C64>, v: &Array2<C64>) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: v.nrows(),
        });
    }
    let tr: C64 = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| b.conj() * a)
        .sum();
    let alpha = if tr.norm() > 1e-14 { tr.arg() } else { 0.0 };
    let phase = c64(0.0, alpha).exp();
    Ok(u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - phase * b).norm())
        .fold(0.0, f64::max))
}

/// Check the shipped H and CX decompositions against their canonical
/// matrices. Used by the CLI before emitting transpiled circuits.
pub fn verify_native_decompositions() -> Result<()> {
    let mut h = Circuit::new(1);
    h.extend(decompose_h(0))?;
    let dh = phase_insensitive_distance(
        &unitary_of_circuit(&h)?,
        &instruction_matrix(&InstructionKind::H),
    )?;
    if dh > 1e-10 {
        return Err(Error::EquivalenceBroken(dh));
    }
    let mut cx = Circuit::new(2);
    cx.extend(decompose_cx(0, 1)?)?;
    let dcx = phase_insensitive_distance(
        &unitary_of_circuit(&cx)?,
        &instruction_matrix(&InstructionKind::CX),
    )?;
    if dcx > 1e-10 {
        return Err(Error::EquivalenceBroken(dcx));
    }
    Ok(())
}
