//! The two-experiment fidelity protocol: extreme-state population (A),
//! parity oscillations with a fixed-frequency cosine fit (B), the combined
//! estimate `F = A/2 + B/2`, and the entanglement witness
//! `<W> = 1 - 2F` (negative certifies genuine multipartite entanglement).
//!
//! Shot counts of zero select exact (infinite-shot) mode, where
//! probabilities come straight from the density matrix. Exact-mode parity
//! uses a Heisenberg-picture shortcut: the analysis layer is a tensor
//! product of single-qubit channels, so the parity observable is evolved
//! backward per qubit and contracted with the prepared state. The test suite
//! pins this shortcut to the plain simulate-then-measure path.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::fit::{self, ParityFit};
use crate::ghz::ghz_sign;
use crate::math::{c64, dagger, identity, kron};
use crate::noise::{self, NoiseSpec};
use crate::sim::{apply_segment, simulate_noisy};
use crate::state::{outcome_frequencies, sample_shots, DensityMatrix};

const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// Population experiment output. `a_value = p_all_zero + p_all_one`.
#[derive(Debug, Clone)]
pub struct PopulationResult {
    pub a_value: f64,
    pub p_all_zero: f64,
    pub p_all_one: f64,
    pub shots: u64,
    pub stderr: f64,
    /// A before SPAM correction; equals `a_value` when correction is off.
    pub raw_a_value: f64,
    /// Full measured distribution (post correction when enabled).
    pub distribution: Vec<f64>,
}

/// Parity scan samples plus the fixed-frequency fit.
#[derive(Debug, Clone)]
pub struct ParityScanResult {
    pub phases: Vec<f64>,
    pub parities: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub fitted_b: f64,
    pub fitted_phi0: f64,
    pub rms_residual: f64,
    /// Amplitude fitted to the uncorrected parities; equals `fitted_b`
    /// when correction is off.
    pub raw_fitted_b: f64,
}

/// Combined protocol report. `fidelity = (a_value + b_value)/2` holds
/// exactly for the values carried here: a and b are clipped into [0, 1]
/// before entering the estimate (finite-shot fits can overshoot slightly);
/// the unclipped experiment records stay in [`PopulationResult`] and
/// [`ParityScanResult`].
#[derive(Debug, Clone)]
pub struct FidelityReport {
    pub n: usize,
    pub a_value: f64,
    pub b_value: f64,
    pub fidelity: f64,
    pub witness: f64,
    pub genuinely_entangled: bool,
    pub spam_corrected: bool,
    pub shots: u64,
    pub seed: u64,
    pub fitted_phi0: f64,
    pub rms_residual: f64,
    /// A and B before SPAM correction.
    pub raw_a_value: f64,
    pub raw_b_value: f64,
    /// `<GHZ|rho|GHZ>` of the prepared state, available in exact mode as the
    /// oracle the A/B protocol is validated against.
    pub direct_fidelity: Option<f64>,
    pub total_duration_seconds: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-subtask seed derivation; stable regardless of thread
/// scheduling.
pub(crate) fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// Signed population difference between even and odd excitation numbers:
/// `sum_i (-1)^popcount(i) p_i`.
pub fn parity_of_distribution(probs: &[f64]) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, &p)| if (i as u64).count_ones().is_multiple_of(2) { p } else { -p })
        .sum()
}

/// Measurement pipeline output: the distribution after optional correction
/// plus the uncorrected (raw) one, retained for reporting.
struct MeasuredDistribution {
    corrected: Vec<f64>,
    raw: Vec<f64>,
}

/// Measurement pipeline: true distribution -> readout confusion -> optional
/// finite sampling -> optional inverse-confusion correction.
fn measured_distribution(
    rho: &DensityMatrix,
    noise: &NoiseSpec,
    shots: u64,
    seed: u64,
    spam_correct: bool,
) -> Result<MeasuredDistribution> {
    let n = rho.n_qubits();
    let confusion = vec![noise.confusion_matrix(); n];
    let trivial = confusion.iter().all(|c| c.is_trivial());
    let true_probs = rho.probabilities();
    let observed = if trivial {
        true_probs
    } else {
        noise::apply_spam(&true_probs, &confusion)?
    };
    let raw = if shots == 0 {
        observed
    } else {
        let outcomes = sample_shots(&observed, shots, seed)?;
        outcome_frequencies(&outcomes, 1 << n, shots)
    };
    let corrected = if spam_correct && !trivial {
        noise::invert_spam(&raw, &confusion)?.corrected
    } else {
        raw.clone()
    };
    Ok(MeasuredDistribution { corrected, raw })
}

/// Run the population experiment: simulate, measure, and report
/// `A = P(0...0) + P(1...1)` with its binomial standard error.
pub fn population_experiment(
    circuit: &Circuit,
    noise: &NoiseSpec,
    shots: u64,
    seed: u64,
    spam_correct: bool,
) -> Result<PopulationResult> {
    let run = simulate_noisy(circuit, noise)?;
    let dist = measured_distribution(&run.rho, noise, shots, seed, spam_correct)?;
    let p_all_zero = dist.corrected[0];
    let p_all_one = *dist.corrected.last().expect("non-empty distribution");
    let a_value = p_all_zero + p_all_one;
    let raw_a_value = dist.raw[0] + dist.raw.last().expect("non-empty distribution");
    let stderr = if shots == 0 {
        0.0
    } else {
        (a_value.clamp(0.0, 1.0) * (1.0 - a_value.clamp(0.0, 1.0)) / shots as f64).sqrt()
    };
    Ok(PopulationResult {
        a_value,
        p_all_zero,
        p_all_one,
        shots,
        stderr,
        raw_a_value,
        distribution: dist.corrected,
    })
}

/// Adjoint (Heisenberg) action of amplitude damping on a 2x2 observable.
fn damp_adjoint(m: &Array2<C64>, gamma: f64) -> Array2<C64> {
    let s = (1.0 - gamma).sqrt();
    ndarray::array![
        [m[(0, 0)], m[(0, 1)] * s],
        [m[(1, 0)] * s, m[(1, 1)] * (1.0 - gamma) + m[(0, 0)] * gamma],
    ]
}

/// Adjoint action of single-qubit depolarizing.
fn depolarizing_adjoint(m: &Array2<C64>, p: f64) -> Array2<C64> {
    let tr_half = (m[(0, 0)] + m[(1, 1)]) * (p / 2.0);
    let mut out = m.mapv(|z| z * (1.0 - p));
    out[(0, 0)] += tr_half;
    out[(1, 1)] += tr_half;
    out
}

/// Per-qubit parity observable after the analysis layer, evolved backward
/// through pulse, gate depolarizing, and the damping slices before and after
/// this qubit's pulse. `sz_eff` carries the readout confusion when the
/// distribution is left uncorrected.
fn analysis_observable(
    n: usize,
    q: usize,
    phi: f64,
    noise: &NoiseSpec,
    sz_eff: &Array2<C64>,
) -> Array2<C64> {
    let slice = noise.dur_1q_seconds / 2.0; // every analysis pulse is pi/2
    let after = noise::damping_gamma((n - q) as f64 * slice, noise.t1_seconds);
    let before = noise::damping_gamma(q as f64 * slice, noise.t1_seconds);
    let mut m = damp_adjoint(sz_eff, after);
    m = depolarizing_adjoint(&m, noise.p1);
    let u = crate::gates::r_phi(FRAC_PI_2, phi)
        .expect("finite analysis pulse")
        .matrix;
    m = dagger(&u).dot(&m).dot(&u);
    damp_adjoint(&m, before)
}

/// Exact parity of the prepared state after a noisy analysis layer at phase
/// `phi`, via the tensor-product Heisenberg observable.
fn exact_parity(rho: &DensityMatrix, phi: f64, noise: &NoiseSpec, spam_correct: bool) -> f64 {
    let n = rho.n_qubits();
    let sz_eff = if spam_correct || noise.confusion_matrix().is_trivial() {
        ndarray::array![
            [c64(1.0, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), c64(-1.0, 0.0)],
        ]
    } else {
        ndarray::array![
            [c64(1.0 - 2.0 * noise.eps_bright, 0.0), c64(0.0, 0.0)],
            [c64(0.0, 0.0), c64(-(1.0 - 2.0 * noise.eps_dark), 0.0)],
        ]
    };
    let mut full = identity(1);
    for q in 0..n {
        let m = analysis_observable(n, q, phi, noise, &sz_eff);
        full = kron(&full, &m);
    }
    let mut tr = c64(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            tr += full[(i, j)] * rho.element(j, i);
        }
    }
    tr.re
}

/// The native analysis layer: one `R_phi(pi/2)` pulse per qubit at the
/// scan phase.
fn analysis_segment(n: usize, phi: f64) -> Circuit {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Instruction::r_phi(q, FRAC_PI_2, phi))
            .expect("targets in range");
    }
    c
}

/// Run the parity experiment over the given phases and fit
/// `B cos(n phi + phi0)`.
pub fn parity_scan(
    ghz_circuit: &Circuit,
    n: usize,
    noise: &NoiseSpec,
    phases: &[f64],
    shots: u64,
    seed: u64,
    spam_correct: bool,
) -> Result<ParityScanResult> {
    if n != ghz_circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            left: n,
            right: ghz_circuit.n_qubits,
        });
    }
    if phases.is_empty() {
        return Err(Error::TooFewPoints { needed: 3, got: 0 });
    }
    let prep = simulate_noisy(ghz_circuit, noise)?;
    // (corrected parity, raw parity, stderr) per phase
    let samples: Vec<(f64, f64, f64)> = if shots == 0 {
        phases
            .par_iter()
            .map(|&phi| {
                let corrected = exact_parity(&prep.rho, phi, noise, spam_correct);
                let raw = if spam_correct {
                    exact_parity(&prep.rho, phi, noise, false)
                } else {
                    corrected
                };
                (corrected, raw, 0.0)
            })
            .collect()
    } else {
        phases
            .par_iter()
            .enumerate()
            .map(|(k, &phi)| -> Result<(f64, f64, f64)> {
                let mut run = prep.clone();
                apply_segment(&mut run, &analysis_segment(n, phi), noise)?;
                let dist = measured_distribution(
                    &run.rho,
                    noise,
                    shots,
                    derive_seed(seed, k as u64),
                    spam_correct,
                )?;
                let parity = parity_of_distribution(&dist.corrected);
                let raw = parity_of_distribution(&dist.raw);
                let stderr = ((1.0 - (parity * parity).min(1.0)) / shots as f64).sqrt();
                Ok((parity, raw, stderr))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let parities: Vec<f64> = samples.iter().map(|&(p, _, _)| p).collect();
    let raw_parities: Vec<f64> = samples.iter().map(|&(_, r, _)| r).collect();
    let stderrs: Vec<f64> = samples.iter().map(|&(_, _, e)| e).collect();
    let ParityFit {
        b,
        phi0,
        rms_residual,
    } = fit::fit_parity(phases, &parities, n)?;
    let raw_fitted_b = fit::fit_parity(phases, &raw_parities, n)?.b;
    Ok(ParityScanResult {
        phases: phases.to_vec(),
        parities,
        stderrs,
        fitted_b: b,
        fitted_phi0: phi0,
        rms_residual,
        raw_fitted_b,
    })
}

/// Combine the two experiment outputs: `F = (a+b)/2`, `<W> = 1 - 2F`,
/// genuine multipartite entanglement certified iff `F > 1/2`.
pub fn fidelity_and_witness(a: f64, b: f64) -> Result<(f64, f64, bool)> {
    for (name, v) in [("a", a), ("b", b)] {
        if !v.is_finite() || !(0.0..=1.0 + 1e-6).contains(&v) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    let fidelity = (a + b) / 2.0;
    let witness = 1.0 - 2.0 * fidelity;
    Ok((fidelity, witness, fidelity > 0.5))
}

/// Exact overlap `<GHZ_n|rho|GHZ_n>`: the oracle the A/B protocol is
/// validated against.
pub fn direct_fidelity(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if rho.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: n,
        });
    }
    let m = rho.dim() - 1;
    let s = ghz_sign(n);
    Ok((rho.element(0, 0).re + rho.element(m, m).re) / 2.0 + s * rho.element(0, m).re)
}

/// Everything needed to run the full protocol for one GHZ size.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub n: usize,
    pub include_dd: bool,
    pub noise: NoiseSpec,
    pub shots: u64,
    pub seed: u64,
    /// Number of scan phases; 0 picks the default `4n + 1` grid.
    pub grid_size: usize,
    pub spam_correct: bool,
}

impl ProtocolConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            include_dd: true,
            noise: NoiseSpec::noiseless(),
            shots: 0,
            seed: 1,
            grid_size: 0,
            spam_correct: true,
        }
    }
}

/// Full protocol output: the report plus both raw experiment records.
#[derive(Debug, Clone)]
pub struct ProtocolOutput {
    pub report: FidelityReport,
    pub population: PopulationResult,
    pub scan: ParityScanResult,
}

/// Prepare the GHZ circuit, run both experiments, and assemble the report.
pub fn run_ghz_protocol(cfg: &ProtocolConfig) -> Result<ProtocolOutput> {
    let mut spec = crate::ghz::GhzSpec::new(cfg.n)?;
    if !cfg.include_dd {
        spec = spec.without_dd();
    }
    let circuit = crate::ghz::build_ghz_circuit(&spec)?;
    run_protocol_on_circuit(&circuit, cfg)
}

/// Run the protocol on an arbitrary preparation circuit.
pub fn run_protocol_on_circuit(
    circuit: &Circuit,
    cfg: &ProtocolConfig,
) -> Result<ProtocolOutput> {
    let n = circuit.n_qubits;
    let grid = if cfg.grid_size == 0 {
        fit::default_grid_size(n)
    } else {
        cfg.grid_size
    };
    let phases = fit::phase_grid(grid);
    let population = population_experiment(
        circuit,
        &cfg.noise,
        cfg.shots,
        derive_seed(cfg.seed, 0xA),
        cfg.spam_correct,
    )?;
    let scan = parity_scan(
        circuit,
        n,
        &cfg.noise,
        &phases,
        cfg.shots,
        derive_seed(cfg.seed, 0xB),
        cfg.spam_correct,
    )?;
    let a_value = population.a_value.clamp(0.0, 1.0);
    let b_value = scan.fitted_b.clamp(0.0, 1.0);
    let (fidelity, witness, genuine) = fidelity_and_witness(a_value, b_value)?;
    let (direct, duration) = {
        let run = simulate_noisy(circuit, &cfg.noise)?;
        let direct = if cfg.shots == 0 {
            Some(direct_fidelity(&run.rho, n)?)
        } else {
            None
        };
        (direct, run.total_duration)
    };
    Ok(ProtocolOutput {
        report: FidelityReport {
            n,
            a_value,
            b_value,
            fidelity,
            witness,
            genuinely_entangled: genuine,
            spam_corrected: cfg.spam_correct,
            shots: cfg.shots,
            seed: cfg.seed,
            fitted_phi0: scan.fitted_phi0,
            rms_residual: scan.rms_residual,
            raw_a_value: population.raw_a_value,
            raw_b_value: scan.raw_fitted_b,
            direct_fidelity: direct,
            total_duration_seconds: duration,
        },
        population,
        scan,
    })
}
