//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured runtime. A shared lock serializes the criteria so the
//! stated runtime budgets are measured without contention.

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ionsim::calibrate::{calibrate_noise, fidelity_curve, TABLE1_TARGETS};
use ionsim::circuit::{Circuit, Instruction};
use ionsim::experiments::{fidelity_and_witness, parity_scan};
use ionsim::fit::{phase_grid, select_frequency};
use ionsim::gates::ms_xx;
use ionsim::ghz::{build_ghz_circuit, ideal_ghz_state, GhzSpec};
use ionsim::noise::{
    amplitude_damping, apply_collective_dephasing, apply_spam, depolarizing, invert_spam,
    ConfusionMatrix, NoiseSpec,
};
use ionsim::state::StateVector;
use ionsim::transpile::{
    decompose_cx, decompose_h, instruction_matrix, phase_insensitive_distance,
    transpile_to_native, unitary_of_circuit,
};

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn pass(criterion: usize, what: &str, started: Instant) {
    println!(
        "ACCEPTANCE {criterion}: PASS ({what}) in {:.2} s",
        started.elapsed().as_secs_f64()
    );
}

fn ionsim_bin(args: &[&str], dir: &std::path::Path) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_ionsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn report_value(report: &str, key: &str) -> f64 {
    let pattern = format!("\"{key}\":");
    let start = report
        .find(&pattern)
        .unwrap_or_else(|| panic!("missing {key}"))
        + pattern.len();
    let rest = &report[start..];
    let end = rest.find([',', '\n', '}']).unwrap();
    rest[..end].trim().parse().unwrap()
}

#[test]
fn criterion_1_noiseless_correctness() {
    let _guard = serial();
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    for n in 2..=8usize {
        let out = ionsim_bin(
            &["ghz-run", "--exact", "--n", &n.to_string(), "--out", "o"],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let report = std::fs::read_to_string(tmp.path().join("o/report.json")).unwrap();
        let f = report_value(&report, "fidelity");
        let a = report_value(&report, "a_value");
        let b = report_value(&report, "b_value");
        assert!((f - 1.0).abs() < 1e-9, "n={n}: F = {f}");
        assert!((a - 1.0).abs() < 1e-9, "n={n}: A = {a}");
        assert!((b - 1.0).abs() < 1e-9, "n={n}: B = {b}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "noiseless runs took {elapsed:?}, budget 1 s"
    );
    pass(1, "ghz-run --exact reports F = A = B = 1 for N = 2..8", started);
}

#[test]
fn criterion_2_parity_frequency_selection() {
    let _guard = serial();
    let started = Instant::now();
    for n in 2..=8usize {
        let circuit = build_ghz_circuit(&GhzSpec::new(n).unwrap()).unwrap();
        let phases = phase_grid(4 * n + 1);
        let scan =
            parity_scan(&circuit, n, &NoiseSpec::noiseless(), &phases, 0, 1, true).unwrap();
        assert!(
            (scan.fitted_b - 1.0).abs() < 1e-9,
            "n={n}: fitted B = {}",
            scan.fitted_b
        );
        let candidates: Vec<usize> = (1..=n + 2).collect();
        let picked = select_frequency(&phases, &scan.parities, &candidates).unwrap();
        assert_eq!(picked, n, "free-frequency scan must select {n}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    pass(2, "residual scan selects frequency N, B = 1 noiselessly", started);
}

/// exp(-i G) by scaling-and-squaring Taylor; independent of the closed forms.
fn exp_minus_i(generator: &Array2<C64>) -> Array2<C64> {
    let dim = generator.nrows();
    let norm: f64 = generator.iter().map(|z| z.norm()).sum();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scale = 1.0 / f64::from(1u32 << squarings.min(40));
    let a = generator.mapv(|z| z * C64::new(0.0, -scale));
    let mut term: Array2<C64> = Array2::eye(dim);
    let mut sum: Array2<C64> = Array2::eye(dim);
    for k in 1..30 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        sum = &sum + &term;
    }
    let mut result = sum;
    for _ in 0..squarings.min(40) {
        result = result.dot(&result);
    }
    result
}

#[test]
fn criterion_3_ms_gate_algebra() {
    let _guard = serial();
    let started = Instant::now();
    let chi = std::f64::consts::FRAC_PI_4;
    let gate = ms_xx(chi).unwrap().matrix;

    // independent oracle: exponentiate (chi/2)(sx⊗I + I⊗sx)^2 directly
    let sx = ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ];
    let id: Array2<C64> = Array2::eye(2);
    let collective = ndarray::linalg::kron(&sx, &id) + ndarray::linalg::kron(&id, &sx);
    let generator = collective.dot(&collective).mapv(|z| z * (chi / 2.0));
    let oracle = exp_minus_i(&generator);
    let mut dev: f64 = 0.0;
    for (a, b) in gate.iter().zip(oracle.iter()) {
        dev = dev.max((a - b).norm());
    }
    assert!(dev < 1e-12, "closed form vs exponential oracle: {dev:.3e}");

    // action on |00>: e^{-i pi/4} (|00> - i|11>)/sqrt(2)
    let mut psi = StateVector::ground_state(2).unwrap();
    psi.apply_unitary(&gate, &[0, 1]).unwrap();
    let phase = C64::new(0.0, -chi).exp();
    let expected = [
        phase / 2.0_f64.sqrt(),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        phase * C64::new(0.0, -1.0) / 2.0_f64.sqrt(),
    ];
    for (amp, want) in psi.amplitudes().iter().zip(&expected) {
        assert!((amp - want).norm() < 1e-12, "{amp} vs {want}");
    }
    pass(3, "XX(pi/4)|00> matches the analytic state and the exp oracle", started);
}

#[test]
fn criterion_4_transpiler_equivalence() {
    let _guard = serial();
    let started = Instant::now();

    let mut h = Circuit::new(1);
    h.extend(decompose_h(0)).unwrap();
    let dh = phase_insensitive_distance(
        &unitary_of_circuit(&h).unwrap(),
        &instruction_matrix(&ionsim::circuit::InstructionKind::H),
    )
    .unwrap();
    assert!(dh < 1e-10, "H distance {dh:.3e}");

    let mut cx = Circuit::new(2);
    cx.extend(decompose_cx(0, 1).unwrap()).unwrap();
    let dcx = phase_insensitive_distance(
        &unitary_of_circuit(&cx).unwrap(),
        &instruction_matrix(&ionsim::circuit::InstructionKind::CX),
    )
    .unwrap();
    assert!(dcx < 1e-10, "CX distance {dcx:.3e}");

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let depth = rng.gen_range(1..=8usize);
        let mut circuit = Circuit::new(2);
        for _ in 0..depth {
            if rng.gen::<bool>() {
                circuit.push(Instruction::h(rng.gen_range(0..2))).unwrap();
            } else {
                let control = rng.gen_range(0..2usize);
                circuit.push(Instruction::cx(control, 1 - control)).unwrap();
            }
        }
        let native = transpile_to_native(&circuit).unwrap();
        let d = phase_insensitive_distance(
            &unitary_of_circuit(&native).unwrap(),
            &unitary_of_circuit(&circuit).unwrap(),
        )
        .unwrap();
        worst = worst.max(d);
        assert!(d < 1e-8, "trial {trial}: distance {d:.3e}");
    }
    pass(
        4,
        &format!("decompositions exact; 1000 random circuits round-trip (worst {worst:.1e})"),
        started,
    );
}

#[test]
fn criterion_5_table_calibration() {
    let _guard = serial();
    let started = Instant::now();
    let result = calibrate_noise(&TABLE1_TARGETS, &NoiseSpec::measured_gates()).unwrap();
    assert!(
        result.rms <= 0.03,
        "calibration rms {} exceeds 0.03",
        result.rms
    );
    for pair in result.rows.windows(2) {
        assert!(
            pair[1].simulated < pair[0].simulated,
            "fitted F(N) not strictly decreasing: {:?}",
            result.rows
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "calibration took {elapsed:?}, budget 2 min"
    );
    pass(
        5,
        &format!(
            "fitted (p2 = {:.4}, sigma = {:.2}) reaches rms {:.4} <= 0.03, monotone",
            result.fitted.p2, result.fitted.sigma_collective, result.rms
        ),
        started,
    );
}

#[test]
fn criterion_6_witness_sign() {
    let _guard = serial();
    let started = Instant::now();
    let sizes: Vec<usize> = (2..=8).collect();
    let curve = fidelity_curve(&sizes, &NoiseSpec::calibrated()).unwrap();
    for (&n, &f) in sizes.iter().zip(&curve) {
        let witness = 1.0 - 2.0 * f;
        assert!(
            f > 0.5 && witness < 0.0,
            "n={n}: F = {f}, <W> = {witness}"
        );
    }
    // synthetic sub-threshold input flips the verdict
    let (f, w, entangled) = fidelity_and_witness(0.5, 0.4).unwrap();
    assert!((f - 0.45).abs() < 1e-12);
    assert!(w > 0.0);
    assert!(!entangled);
    pass(6, "calibrated <W> < 0 for all N; verdict flips at F = 0.45", started);
}

#[test]
fn criterion_7_channel_properties() {
    let _guard = serial();
    let started = Instant::now();

    // Kraus completeness within 1e-9
    for ch in [
        depolarizing(0.3, 1).unwrap(),
        depolarizing(0.7, 2).unwrap(),
        amplitude_damping(3e-3, 0.053).unwrap(),
    ] {
        let dim = 1 << ch.arity();
        let mut sum: Array2<C64> = Array2::zeros((dim, dim));
        for k in ch.operators() {
            sum = sum + k.t().mapv(|z| z.conj()).dot(k);
        }
        let mut dev: f64 = 0.0;
        let eye: Array2<C64> = Array2::eye(dim);
        for (a, b) in sum.iter().zip(eye.iter()) {
            dev = dev.max((a - b).norm());
        }
        assert!(dev < 1e-9, "completeness deviation {dev:.3e}");
    }

    // damping composition law within 1e-10
    let t1 = 0.053;
    let (d1, d2) = (0.8e-3, 2.3e-3);
    let one = StateVector::from_amplitudes(
        1,
        vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
    )
    .unwrap();
    let mut once = one.to_density_matrix();
    once.apply_kraus(&amplitude_damping(d1 + d2, t1).unwrap(), &[0]).unwrap();
    let mut twice = one.to_density_matrix();
    twice.apply_kraus(&amplitude_damping(d1, t1).unwrap(), &[0]).unwrap();
    twice.apply_kraus(&amplitude_damping(d2, t1).unwrap(), &[0]).unwrap();
    let mut dev: f64 = 0.0;
    for (a, b) in once.elements().iter().zip(twice.elements().iter()) {
        dev = dev.max((a - b).norm());
    }
    assert!(dev < 1e-10, "composition deviation {dev:.3e}");

    // collective dephasing damps GHZ_N coherence by exp(-sigma^2 N^2 / 2)
    for n in 2..=8usize {
        let sigma = 0.3;
        let mut rho = ideal_ghz_state(n).unwrap().to_density_matrix();
        apply_collective_dephasing(&mut rho, sigma).unwrap();
        let coherence = rho.element(0, rho.dim() - 1).norm();
        let expected = 0.5 * (-sigma * sigma * (n * n) as f64 / 2.0).exp();
        assert!(
            (coherence - expected).abs() < 1e-9,
            "n={n}: {coherence} vs {expected}"
        );
    }

    // SPAM apply ∘ invert round trip within 1e-10
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4usize);
        let mut v: Vec<f64> = (0..(1 << n)).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        let confusion: Vec<ConfusionMatrix> = (0..n)
            .map(|_| ConfusionMatrix::new(rng.gen::<f64>() * 0.3, rng.gen::<f64>() * 0.3).unwrap())
            .collect();
        let observed = apply_spam(&v, &confusion).unwrap();
        let back = invert_spam(&observed, &confusion).unwrap();
        for (a, b) in v.iter().zip(&back.corrected) {
            assert!((a - b).abs() < 1e-10, "round trip {a} vs {b}");
        }
    }
    pass(7, "completeness, composition, dephasing factor, SPAM round trip", started);
}

#[test]
fn criterion_8_shot_noise_scaling() {
    let _guard = serial();
    let started = Instant::now();
    let circuit = build_ghz_circuit(&GhzSpec::new(3).unwrap()).unwrap();
    let noise = NoiseSpec::calibrated();
    let phases = phase_grid(13);
    let shot_counts = [100u64, 1000, 10000];
    let mut spreads = Vec::new();
    for &shots in &shot_counts {
        let mut fitted: Vec<f64> = Vec::with_capacity(100);
        for seed in 0..100u64 {
            let scan = parity_scan(&circuit, 3, &noise, &phases, shots, seed, true).unwrap();
            fitted.push(scan.fitted_b);
        }
        let mean = fitted.iter().sum::<f64>() / fitted.len() as f64;
        let var = fitted.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>()
            / (fitted.len() - 1) as f64;
        spreads.push(var.sqrt());
    }
    let expected = 10.0_f64.sqrt();
    for (pair, label) in spreads.windows(2).zip(["100/1000", "1000/10000"]) {
        let ratio = pair[0] / pair[1];
        assert!(
            (ratio / expected - 1.0).abs() < 0.2,
            "stderr ratio {label} = {ratio:.3}, expected {expected:.3} within 20%"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 1 min");
    pass(
        8,
        &format!(
            "fitted-B spread scales as 1/sqrt(shots): sigmas {:.4}/{:.4}/{:.4}",
            spreads[0], spreads[1], spreads[2]
        ),
        started,
    );
}

#[test]
fn criterion_9_deterministic_artifacts() {
    let _guard = serial();
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("run.conf"),
        "ghz_n=4\nnoise_preset=calibrated\nshots=500\nseed=33\n",
    )
    .unwrap();
    for out in ["a", "b"] {
        let run = ionsim_bin(
            &["ghz-run", "--config", "run.conf", "--out", out],
            tmp.path(),
        );
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    for file in ["population.csv", "parity.csv", "report.json"] {
        let a = std::fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    pass(9, "identical config + seed give byte-identical artifacts", started);
}
