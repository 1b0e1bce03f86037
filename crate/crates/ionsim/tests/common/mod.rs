//! Independent numeric oracles for the integration tests. Nothing here
//! shares code with the production paths it checks: the matrix exponential
//! is a scaled Taylor series, embeddings are literal Kronecker sums, and
//! eigenvalues come from a Jacobi sweep on the real-symmetric embedding.

// each test target compiles its own copy and uses a subset
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(-i H)` for (small) Hermitian `H` by scaling-and-squaring with a
/// Taylor series.
pub fn exp_minus_i_hermitian(h: &Array2<C64>) -> Array2<C64> {
    let dim = h.nrows();
    let norm: f64 = h.iter().map(|z| z.norm()).sum();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scale = 1.0 / f64::from(1u32 << squarings.min(52));
    let a = h.mapv(|z| z * c64(0.0, -scale));
    // Taylor to machine precision at the scaled norm
    let mut term: Array2<C64> = Array2::eye(dim);
    let mut sum: Array2<C64> = Array2::eye(dim);
    for k in 1..30 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        sum = &sum + &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings.min(52) {
        result = result.dot(&result);
    }
    result
}

/// Literal Kronecker embedding of a gate on arbitrary targets: sums
/// elementary-matrix tensor chains, independent of the production kernels.
pub fn kron_embed(u: &Array2<C64>, targets: &[usize], n: usize) -> Array2<C64> {
    let dim = 1usize << n;
    let k = targets.len();
    let gdim = 1usize << k;
    assert_eq!(u.nrows(), gdim);
    let mut full: Array2<C64> = Array2::zeros((dim, dim));
    for row in 0..gdim {
        for col in 0..gdim {
            if u[(row, col)].norm() == 0.0 {
                continue;
            }
            // chain of per-qubit factors: E(row_bit, col_bit) on targets,
            // identity elsewhere
            let mut chain: Array2<C64> = Array2::eye(1);
            for q in 0..n {
                let factor: Array2<C64> = if let Some(pos) = targets.iter().position(|&t| t == q) {
                    let rb = (row >> (k - 1 - pos)) & 1;
                    let cb = (col >> (k - 1 - pos)) & 1;
                    let mut e = Array2::zeros((2, 2));
                    e[(rb, cb)] = c64(1.0, 0.0);
                    e
                } else {
                    Array2::eye(2)
                };
                chain = ndarray::linalg::kron(&chain, &factor);
            }
            full = full + chain.mapv(|z| z * u[(row, col)]);
        }
    }
    full
}

/// Eigenvalues of a Hermitian complex matrix via a cyclic Jacobi sweep on
/// the real-symmetric embedding `[[Re, -Im], [Im, Re]]` (each eigenvalue
/// appears twice).
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = vec![vec![0.0_f64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = m[(i, j)].re;
            a[i][j + n] = -m[(i, j)].im;
            a[i + n][j] = m[(i, j)].im;
            a[i + n][j + n] = m[(i, j)].re;
        }
    }
    let dim = 2 * n;
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..dim {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..dim).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    // embedding doubles the spectrum
    eig.into_iter().step_by(2).collect()
}

/// Haar-ish random pure state from normalized complex Gaussians.
pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let dim = 1usize << n;
    let mut amps: Vec<C64> = (0..dim).map(|_| c64(gaussian(rng), gaussian(rng))).collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

/// Standard normal via Box–Muller on the seeded generator.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
