//! Small complex-matrix helpers used by the gate and state modules.

use ndarray::Array2;
use num_complex::Complex64 as C64;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product with the first factor as the most significant subsystem.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

pub fn identity(dim: usize) -> Array2<C64> {
    Array2::eye(dim)
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-abs deviation of `m† m` from the identity; 0 for an exactly unitary matrix.
pub fn unitarity_deviation(m: &Array2<C64>) -> f64 {
    let d = m.nrows();
    let prod = dagger(m).dot(m);
    max_abs_diff(&prod, &identity(d))
}

/// Max-abs deviation from Hermitian symmetry.
pub fn hermiticity_deviation(m: &Array2<C64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub const PAULI_I: [[C64; 2]; 2] = [
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
];
pub const PAULI_X: [[C64; 2]; 2] = [
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
];
pub const PAULI_Y: [[C64; 2]; 2] = [
    [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
    [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
];
pub const PAULI_Z: [[C64; 2]; 2] = [
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
];

pub fn pauli(p: [[C64; 2]; 2]) -> Array2<C64> {
    Array2::from_shape_vec((2, 2), p.concat()).expect("2x2 shape")
}

/// The four single-qubit Paulis in I, X, Y, Z order.
pub fn paulis_1q() -> Vec<Array2<C64>> {
    vec![
        pauli(PAULI_I),
        pauli(PAULI_X),
        pauli(PAULI_Y),
        pauli(PAULI_Z),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_products_square_to_identity() {
        for p in paulis_1q() {
            assert!(max_abs_diff(&p.dot(&p), &identity(2)) < 1e-15);
        }
    }

    #[test]
    fn kron_orders_first_factor_most_significant() {
        let z = pauli(PAULI_Z);
        let i = identity(2);
        let zi = kron(&z, &i);
        // |10> = index 2 picks up the -1 from Z on the most significant qubit
        assert_eq!(zi[(2, 2)], c64(-1.0, 0.0));
        assert_eq!(zi[(1, 1)], c64(1.0, 0.0));
    }
}
