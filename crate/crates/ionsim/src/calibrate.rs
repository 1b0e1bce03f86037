//! Calibration of the free noise parameters (p2, sigma_collective) against a
//! table of measured GHZ fidelities.
//!
//! p1 and T1 stay pinned to the independently measured single-qubit figures;
//! only the two-qubit depolarizing probability and the collective-dephasing
//! rate are fitted, by a coarse grid followed by Nelder–Mead on the RMS
//! deviation of the simulated exact-mode F(N) from the targets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{run_ghz_protocol, ProtocolConfig};
use crate::noise::NoiseSpec;

/// Measured GHZ fidelities for N = 2..8, the shipped default target table.
pub const TABLE1_TARGETS: [(usize, f64); 7] = [
    (2, 0.968),
    (3, 0.904),
    (4, 0.862),
    (5, 0.785),
    (6, 0.738),
    (7, 0.655),
    (8, 0.579),
];

#[derive(Debug, Clone, Copy)]
pub struct CalibrationRow {
    pub n: usize,
    pub target: f64,
    pub simulated: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub fitted: NoiseSpec,
    pub rows: Vec<CalibrationRow>,
    pub rms: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Exact-mode protocol fidelity for one GHZ size under the given noise.
pub fn simulated_fidelity(n: usize, noise: &NoiseSpec) -> Result<f64> {
    let cfg = ProtocolConfig {
        noise: *noise,
        ..ProtocolConfig::new(n)
    };
    Ok(run_ghz_protocol(&cfg)?.report.fidelity)
}

/// Exact-mode F(N) for each requested size.
pub fn fidelity_curve(sizes: &[usize], noise: &NoiseSpec) -> Result<Vec<f64>> {
    sizes
        .par_iter()
        .map(|&n| simulated_fidelity(n, noise))
        .collect()
}

fn with_free_params(base: &NoiseSpec, p2: f64, sigma: f64) -> NoiseSpec {
    NoiseSpec {
        p2,
        sigma_collective: sigma,
        ..*base
    }
}

struct Objective<'a> {
    targets: &'a [(usize, f64)],
    base: &'a NoiseSpec,
    evaluations: std::cell::Cell<usize>,
}

const P2_MAX: f64 = 0.3;
const SIGMA_MAX: f64 = 30.0;

impl Objective<'_> {
    fn rms(&self, p2: f64, sigma: f64) -> f64 {
        self.evaluations.set(self.evaluations.get() + 1);
        let p2c = p2.clamp(0.0, P2_MAX);
        let sc = sigma.clamp(0.0, SIGMA_MAX);
        let noise = with_free_params(self.base, p2c, sc);
        let sizes: Vec<usize> = self.targets.iter().map(|&(n, _)| n).collect();
        let curve = match fidelity_curve(&sizes, &noise) {
            Ok(c) => c,
            Err(_) => return f64::MAX,
        };
        let ss: f64 = curve
            .iter()
            .zip(self.targets)
            .map(|(f, &(_, t))| (f - t) * (f - t))
            .sum();
        let rms = (ss / self.targets.len() as f64).sqrt();
        // keep the simplex inside the physical domain
        let penalty = (p2 - p2c).abs() + (sigma - sc).abs();
        rms + penalty
    }
}

/// Fit (p2, sigma_collective) to the target table. Coarse 5x4 grid, then
/// Nelder–Mead until the simplex RMS spread drops below 1e-5 (or 120
/// iterations, reported as non-converged).
pub fn calibrate_noise(targets: &[(usize, f64)], base: &NoiseSpec) -> Result<CalibrationResult> {
    if targets.is_empty() {
        return Err(Error::Config("calibration target table is empty".into()));
    }
    for &(n, f) in targets {
        if !(2..=10).contains(&n) {
            return Err(Error::QubitCount { n, min: 2, max: 10 });
        }
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::OutOfRange {
                name: "target fidelity",
                value: f,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    let objective = Objective {
        targets,
        base,
        evaluations: std::cell::Cell::new(0),
    };

    let mut best = (f64::MAX, 0.0, 0.0);
    for &p2 in &[0.01, 0.03, 0.05, 0.07, 0.09] {
        for &sigma in &[0.0, 1.0, 2.0, 3.0] {
            let v = objective.rms(p2, sigma);
            if v < best.0 {
                best = (v, p2, sigma);
            }
        }
    }

    // Nelder–Mead with standard coefficients
    let mut simplex = [[best.1, best.2],
        [best.1 + 0.008, best.2],
        [best.1, best.2 + 0.5]];
    let mut values: Vec<f64> = simplex.iter().map(|p| objective.rms(p[0], p[1])).collect();
    let mut converged = false;
    for _ in 0..120 {
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (lo, mid, hi) = (order[0], order[1], order[2]);
        if values[hi] - values[lo] < 1e-5 {
            converged = true;
            break;
        }
        let centroid = [
            (simplex[lo][0] + simplex[mid][0]) / 2.0,
            (simplex[lo][1] + simplex[mid][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[hi][0]),
            centroid[1] + (centroid[1] - simplex[hi][1]),
        ];
        let f_reflect = objective.rms(reflect[0], reflect[1]);
        if f_reflect < values[lo] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[hi][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[hi][1]),
            ];
            let f_expand = objective.rms(expand[0], expand[1]);
            if f_expand < f_reflect {
                simplex[hi] = expand;
                values[hi] = f_expand;
            } else {
                simplex[hi] = reflect;
                values[hi] = f_reflect;
            }
        } else if f_reflect < values[mid] {
            simplex[hi] = reflect;
            values[hi] = f_reflect;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[hi][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[hi][1] - centroid[1]),
            ];
            let f_contract = objective.rms(contract[0], contract[1]);
            if f_contract < values[hi] {
                simplex[hi] = contract;
                values[hi] = f_contract;
            } else {
                // shrink toward the best vertex
                for k in [mid, hi] {
                    simplex[k] = [
                        simplex[lo][0] + 0.5 * (simplex[k][0] - simplex[lo][0]),
                        simplex[lo][1] + 0.5 * (simplex[k][1] - simplex[lo][1]),
                    ];
                    values[k] = objective.rms(simplex[k][0], simplex[k][1]);
                }
            }
        }
    }

    let best_idx = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty");
    let p2 = simplex[best_idx][0].clamp(0.0, P2_MAX);
    let sigma = simplex[best_idx][1].clamp(0.0, SIGMA_MAX);
    let fitted = with_free_params(base, p2, sigma);
    let sizes: Vec<usize> = targets.iter().map(|&(n, _)| n).collect();
    let curve = fidelity_curve(&sizes, &fitted)?;
    let rows: Vec<CalibrationRow> = targets
        .iter()
        .zip(&curve)
        .map(|(&(n, target), &simulated)| CalibrationRow {
            n,
            target,
            simulated,
            residual: simulated - target,
        })
        .collect();
    let rms = (rows.iter().map(|r| r.residual * r.residual).sum::<f64>()
        / rows.len() as f64)
        .sqrt();
    Ok(CalibrationResult {
        fitted,
        rows,
        rms,
        converged,
        evaluations: objective.evaluations.get(),
    })
}
