//! Fixed-frequency sinusoid fitting for parity scans.
//!
//! The model is `P(phi) = B cos(n phi + phi0)`, linearized as
//! `P = a cos(n phi) + c sin(n phi)` and solved by ordinary least squares,
//! so the fit is deterministic and needs no starting guess. `B = sqrt(a²+c²)`
//! and `phi0 = atan2(-c, a)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityFit {
    pub b: f64,
    pub phi0: f64,
    pub rms_residual: f64,
}

/// Least-squares fit of `B cos(n phi + phi0)` with the frequency pinned at
/// `n`. Needs at least 3 points and phases that do not coincide modulo
/// `2 pi / n`.
pub fn fit_parity(phases: &[f64], parities: &[f64], n: usize) -> Result<ParityFit> {
    if phases.len() != parities.len() {
        return Err(Error::DimensionMismatch {
            left: phases.len(),
            right: parities.len(),
        });
    }
    if phases.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: phases.len(),
        });
    }
    let freq = n as f64;
    // normal equations for the 2-parameter linear model
    let (mut scc, mut scs, mut sss) = (0.0, 0.0, 0.0);
    let (mut syc, mut sys) = (0.0, 0.0);
    for (&phi, &y) in phases.iter().zip(parities) {
        let c = (freq * phi).cos();
        let s = (freq * phi).sin();
        scc += c * c;
        scs += c * s;
        sss += s * s;
        syc += y * c;
        sys += y * s;
    }
    let det = scc * sss - scs * scs;
    let scale = scc.max(sss).max(1e-300);
    if det.abs() < 1e-10 * scale * scale.max(1.0) {
        return Err(Error::DegenerateFit);
    }
    let a = (sss * syc - scs * sys) / det;
    let c = (scc * sys - scs * syc) / det;
    let b = a.hypot(c);
    let phi0 = (-c).atan2(a);
    let mut ss_res = 0.0;
    for (&phi, &y) in phases.iter().zip(parities) {
        let model = a * (freq * phi).cos() + c * (freq * phi).sin();
        ss_res += (y - model) * (y - model);
    }
    let rms_residual = (ss_res / phases.len() as f64).sqrt();
    Ok(ParityFit {
        b,
        phi0,
        rms_residual,
    })
}

/// Fit every candidate frequency and return the one with the smallest RMS
/// residual. Restates the N-fold phase-sensitivity claim as a model
/// selection: for a GHZ_N parity scan the minimizer is exactly N.
pub fn select_frequency(phases: &[f64], parities: &[f64], candidates: &[usize]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &f in candidates {
        let fit = match fit_parity(phases, parities, f) {
            Ok(fit) => fit,
            Err(Error::DegenerateFit) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, r)| fit.rms_residual < r) {
            best = Some((f, fit.rms_residual));
        }
    }
    best.map(|(f, _)| f).ok_or(Error::DegenerateFit)
}

/// Uniform grid of `count` phases over `[0, 2 pi)`.
pub fn phase_grid(count: usize) -> Vec<f64> {
    let step = std::f64::consts::TAU / count as f64;
    (0..count).map(|k| k as f64 * step).collect()
}

/// Default scan resolution for an N-qubit parity experiment: `4N + 1`
/// points, at least two per fringe of the frequency-N oscillation.
pub fn default_grid_size(n: usize) -> usize {
    4 * n + 1
}
