#![allow(dead_code)]

use opsys_core::matrix::{ComplexMatrix, HermitianMatrix, C64};
use opsys_core::Graph;
use rand::Rng;

/// Random simple graph on `n` vertices, each edge present with probability `p`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Hermitian `n×n` with real diagonal and complex off-diagonal entries,
/// every real coordinate uniform in `[-r, r]`.
pub fn random_hermitian_uniform<R: Rng>(n: usize, r: f64, rng: &mut R) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.random_range(-r..=r), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.random_range(-r..=r), rng.random_range(-r..=r));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(m).unwrap()
}

/// Hermitian with standard Gaussian-ish entries (uniform on [-1, 1]).
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> HermitianMatrix {
    random_hermitian_uniform(n, 1.0, rng)
}

pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
}
