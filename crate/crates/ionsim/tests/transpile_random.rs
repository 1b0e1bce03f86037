//! Randomized transpiler equivalence: {H, CX} circuits on two qubits
//! round-trip through decomposition and virtual-Z folding within a
//! phase-insensitive distance of 1e-8.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ionsim::circuit::{Circuit, Instruction};
use ionsim::ghz::{build_ghz_circuit, ideal_ghz_state, GhzSpec};
use ionsim::sim::simulate_statevector;
use ionsim::transpile::{
    fold_virtual_rz, phase_insensitive_distance, transpile_to_native, unitary_of_circuit,
};

fn random_hcx_circuit(rng: &mut ChaCha8Rng, n_qubits: usize, max_depth: usize) -> Circuit {
    let depth = rng.gen_range(1..=max_depth);
    let mut c = Circuit::new(n_qubits);
    for _ in 0..depth {
        if rng.gen::<bool>() {
            c.push(Instruction::h(rng.gen_range(0..n_qubits))).unwrap();
        } else {
            let control = rng.gen_range(0..n_qubits);
            let mut target = rng.gen_range(0..n_qubits);
            while target == control {
                target = rng.gen_range(0..n_qubits);
            }
            c.push(Instruction::cx(control, target)).unwrap();
        }
    }
    c
}

#[test]
fn thousand_random_circuits_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let original = random_hcx_circuit(&mut rng, 2, 8);
        let native = transpile_to_native(&original).unwrap();
        assert!(native.is_native(), "trial {trial}");
        let d = phase_insensitive_distance(
            &unitary_of_circuit(&native).unwrap(),
            &unitary_of_circuit(&original).unwrap(),
        )
        .unwrap();
        worst = worst.max(d);
        assert!(d < 1e-8, "trial {trial}: distance {d}");
    }
    println!("worst transpile distance over 1000 trials: {worst:.3e}");
}

#[test]
fn folding_after_transpile_preserves_the_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..200 {
        let original = random_hcx_circuit(&mut rng, 2, 6);
        let native = transpile_to_native(&original).unwrap();
        let folded = fold_virtual_rz(&native).unwrap();
        let mut with_frames = folded.circuit.clone();
        for (q, &angle) in folded.frames.iter().enumerate() {
            if angle != 0.0 {
                with_frames.push(Instruction::r_z(q, angle)).unwrap();
            }
        }
        let d = phase_insensitive_distance(
            &unitary_of_circuit(&with_frames).unwrap(),
            &unitary_of_circuit(&original).unwrap(),
        )
        .unwrap();
        assert!(d < 1e-8, "trial {trial}: distance {d}");
    }
}

#[test]
fn ghz3_folded_and_unfolded_states_agree() {
    // transpile the GHZ-3 builder output, fold it, and compare final states
    let circuit = build_ghz_circuit(&GhzSpec::new(3).unwrap()).unwrap();
    let native = transpile_to_native(&circuit).unwrap();
    let folded = fold_virtual_rz(&native).unwrap();

    let psi_native = simulate_statevector(&native).unwrap();
    let mut with_frames = folded.circuit.clone();
    for (q, &angle) in folded.frames.iter().enumerate() {
        if angle != 0.0 {
            with_frames.push(Instruction::r_z(q, angle)).unwrap();
        }
    }
    let psi_folded = simulate_statevector(&with_frames).unwrap();
    let overlap = psi_native.inner(&psi_folded).unwrap().norm_sqr();
    assert!((overlap - 1.0).abs() < 1e-10, "fidelity {overlap}");

    // probabilities agree even without reapplying the frames
    let psi_no_frames = simulate_statevector(&folded.circuit).unwrap();
    for (a, b) in psi_native
        .probabilities()
        .iter()
        .zip(psi_no_frames.probabilities())
    {
        assert!((a - b).abs() < 1e-10);
    }

    // and the folded circuit still prepares the ideal GHZ-3 state
    let target = ideal_ghz_state(3).unwrap();
    let fidelity = target.inner(&psi_folded).unwrap().norm_sqr();
    assert!((fidelity - 1.0).abs() < 1e-9);
}

#[test]
fn transpiled_ghz_circuits_have_one_ms_gate_per_cx() {
    for n in [2usize, 5, 8] {
        let circuit = build_ghz_circuit(&GhzSpec::new(n).unwrap()).unwrap();
        let native = transpile_to_native(&circuit).unwrap();
        assert_eq!(native.count_kind("MSXX"), n - 1);
        assert_eq!(native.count_kind("CX"), 0);
        assert_eq!(native.count_kind("H"), 0);
    }
}
