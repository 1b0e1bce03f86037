//! N-qubit pure and mixed state containers.
//!
//! Basis convention, fixed globally: qubit 0 is the most significant bit of
//! the basis index, so index `b` spells the bitstring `b_0 b_1 ... b_{N-1}`
//! with `b_i = 1` meaning ion `i` is in the excited `|1>` (D) state. Dense
//! storage caps the register at [`MAX_QUBITS`] qubits.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{c64, hermiticity_deviation, unitarity_deviation};
use crate::noise::KrausChannel;

/// Dense density matrices at 12 qubits already take 4096^2 complex entries
/// (~268 MB); anything larger needs a different representation.
pub const MAX_QUBITS: usize = 12;

const UNITARY_TOL: f64 = 1e-9;

fn check_qubit_count(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::QubitCount {
            n,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn check_targets(n_qubits: usize, targets: &[usize]) -> Result<()> {
    match targets.len() {
        1 | 2 => {}
        k => return Err(Error::UnsupportedArity(k)),
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitIndex {
                index: t,
                n_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

fn check_gate_matrix(u: &Array2<C64>, targets: &[usize]) -> Result<()> {
    let dim = 1usize << targets.len();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: dim,
        });
    }
    let dev = unitarity_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Bit shift of qubit `q` inside an `n`-qubit basis index (qubit 0 = MSB).
#[inline]
pub(crate) fn qubit_shift(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Apply a 2x2 matrix to a contiguous amplitude slice on the qubit with bit
/// shift `sh`. Works for any matrix, not just unitaries, so the same kernel
/// serves Kraus operators.
fn kernel_1q(amps: &mut [C64], sh: usize, m: &Array2<C64>) {
    let mask = 1usize << sh;
    let low = mask - 1;
    let half = amps.len() / 2;
    let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    for g in 0..half {
        let i0 = ((g & !low) << 1) | (g & low);
        let i1 = i0 | mask;
        let a0 = amps[i0];
        let a1 = amps[i1];
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

/// Apply a 4x4 matrix on two qubit positions; `sh0` addresses the more
/// significant gate index bit (targets[0]).
fn kernel_2q(amps: &mut [C64], sh0: usize, sh1: usize, m: &Array2<C64>) {
    let m0 = 1usize << sh0;
    let m1 = 1usize << sh1;
    let (lo_sh, hi_sh) = if sh0 < sh1 { (sh0, sh1) } else { (sh1, sh0) };
    let lo_mask = (1usize << lo_sh) - 1;
    let mid_mask = ((1usize << hi_sh) - 1) & !((1usize << (lo_sh + 1)) - 1);
    let quarter = amps.len() / 4;
    for g in 0..quarter {
        // scatter the free bits of g around the two target positions
        let low = g & lo_mask;
        let mid = (g << 1) & mid_mask;
        let high = (g << 2) & !(mid_mask | lo_mask | m0 | m1);
        let base = high | mid | low;
        let idx = [base, base | m1, base | m0, base | m0 | m1];
        let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            amps[i] = m[(r, 0)] * a[0] + m[(r, 1)] * a[1] + m[(r, 2)] * a[2] + m[(r, 3)] * a[3];
        }
    }
}

fn apply_matrix_to_amps(amps: &mut [C64], n: usize, m: &Array2<C64>, targets: &[usize]) {
    match targets {
        [t] => kernel_1q(amps, qubit_shift(n, *t), m),
        [t0, t1] => kernel_2q(amps, qubit_shift(n, *t0), qubit_shift(n, *t1), m),
        _ => unreachable!("arity checked by caller"),
    }
}

/// Pure N-qubit state.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn ground_state(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amplitudes = vec![c64(0.0, 0.0); 1 << n];
        amplitudes[0] = c64(1.0, 0.0);
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }

    /// Build from explicit amplitudes; must be normalized within 1e-9.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_qubit_count(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: 1 << n,
            });
        }
        let state = Self {
            n_qubits: n,
            amplitudes,
        };
        let dev = (state.norm_sqr() - 1.0).abs();
        if dev > 1e-9 {
            return Err(Error::NotNormalized(dev));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Embed a 1- or 2-qubit unitary on `targets`, identity elsewhere.
    pub fn apply_unitary(&mut self, u: &Array2<C64>, targets: &[usize]) -> Result<()> {
        check_targets(self.n_qubits, targets)?;
        check_gate_matrix(u, targets)?;
        apply_matrix_to_amps(&mut self.amplitudes, self.n_qubits, u, targets);
        debug_assert!((self.norm_sqr() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut elements = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                elements[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix {
            n_qubits: self.n_qubits,
            elements,
        }
    }
}

/// Mixed N-qubit state, same basis ordering as [`StateVector`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_qubits: usize,
    elements: Array2<C64>,
}

impl DensityMatrix {
    pub fn ground_state(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut elements = Array2::zeros((dim, dim));
        elements[(0, 0)] = c64(1.0, 0.0);
        Ok(Self {
            n_qubits: n,
            elements,
        })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let mut elements = Array2::zeros((dim, dim));
        for i in 0..dim {
            elements[(i, i)] = c64(1.0 / dim as f64, 0.0);
        }
        Ok(Self {
            n_qubits: n,
            elements,
        })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density_matrix()
    }

    /// Build from an explicit matrix; checks Hermiticity and unit trace
    /// within 1e-9. Positivity is left to debug/property tests.
    pub fn from_matrix(n: usize, elements: Array2<C64>) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        if elements.nrows() != dim || elements.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: elements.nrows(),
                right: dim,
            });
        }
        let herm = hermiticity_deviation(&elements);
        if herm > 1e-9 {
            return Err(Error::NotHermitian(herm));
        }
        let rho = Self {
            n_qubits: n,
            elements,
        };
        let tr_dev = (rho.trace() - 1.0).abs();
        if tr_dev > 1e-9 {
            return Err(Error::NotNormalized(tr_dev));
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &Array2<C64> {
        &self.elements
    }

    /// Raw mutable access for the optimized channel kernels in `sim`; those
    /// kernels are pinned to the public Kraus path by the property tests.
    pub(crate) fn elements_mut(&mut self) -> &mut Array2<C64> {
        &mut self.elements
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.elements[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).sum()
    }

    /// `tr(rho^2)`; equals `sum |rho_ij|^2` for Hermitian input.
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `rho -> U rho U†` with `U` embedded on `targets`.
    pub fn apply_unitary(&mut self, u: &Array2<C64>, targets: &[usize]) -> Result<()> {
        check_targets(self.n_qubits, targets)?;
        check_gate_matrix(u, targets)?;
        self.apply_matrix_unchecked(u, targets);
        debug_assert!((self.trace() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// `rho -> M rho M†` without unitarity or trace checks; shared by the
    /// unitary path and the Kraus sum.
    pub(crate) fn apply_matrix_unchecked(&mut self, m: &Array2<C64>, targets: &[usize]) {
        let n = self.n_qubits;
        let dim = self.dim();
        // Left multiply: every column transforms like a state vector.
        {
            let mut col = vec![c64(0.0, 0.0); dim];
            for j in 0..dim {
                for i in 0..dim {
                    col[i] = self.elements[(i, j)];
                }
                apply_matrix_to_amps(&mut col, n, m, targets);
                for i in 0..dim {
                    self.elements[(i, j)] = col[i];
                }
            }
        }
        // Right multiply by M†: every row transforms under conj(M).
        let mc = m.mapv(|z| z.conj());
        let flat = self.elements.as_slice_mut().expect("contiguous storage");
        for row in flat.chunks_exact_mut(dim) {
            apply_matrix_to_amps(row, n, &mc, targets);
        }
    }

    /// `rho -> sum_k K_k rho K_k†` on `targets`.
    pub fn apply_kraus(&mut self, channel: &KrausChannel, targets: &[usize]) -> Result<()> {
        check_targets(self.n_qubits, targets)?;
        if targets.len() != channel.arity() {
            return Err(Error::DimensionMismatch {
                left: channel.arity(),
                right: targets.len(),
            });
        }
        let mut acc: Array2<C64> = Array2::zeros(self.elements.raw_dim());
        for k in channel.operators() {
            let mut term = self.clone();
            term.apply_matrix_unchecked(k, targets);
            acc += &term.elements;
        }
        self.elements = acc;
        debug_assert!((self.trace() - 1.0).abs() < 1e-9);
        Ok(())
    }

    /// Diagonal in the computational basis. Round-off negatives above
    /// -1e-12 are clamped to zero; anything more negative is a logic bug
    /// and trips the debug assertion.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let p = self.elements[(i, i)].re;
                debug_assert!(p >= -1e-12, "diagonal element {i} = {p}");
                p.max(0.0)
            })
            .collect()
    }
}

/// One sampled measurement record: a basis index and how often it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub bitstring: usize,
    pub count: u64,
}

/// Draw `shots` outcomes from `probs` with a seeded generator. The result is
/// a deterministic function of `(probs, shots, seed)`; entries with zero
/// counts are omitted and the remaining counts always sum to `shots`.
pub fn sample_shots(probs: &[f64], shots: u64, seed: u64) -> Result<Vec<Outcome>> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let mut total = 0.0;
    for &p in probs {
        if p < -1e-9 {
            return Err(Error::NegativeProbability(p));
        }
        total += p.max(0.0);
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::UnnormalizedProbabilities(total));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0) / total;
        cdf.push(acc);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let x: f64 = rng.gen();
        let idx = cdf.partition_point(|&c| c <= x).min(probs.len() - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(bitstring, count)| Outcome { bitstring, count })
        .collect())
}

/// Turn sampled outcomes back into an empirical probability vector.
pub fn outcome_frequencies(outcomes: &[Outcome], dim: usize, shots: u64) -> Vec<f64> {
    let mut freq = vec![0.0; dim];
    for o in outcomes {
        freq[o.bitstring] = o.count as f64 / shots as f64;
    }
    freq
}
