//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod bessel;

use hidbf::efie::{EntryOracle, FnEntries, RescaleStrategy};
use hidbf::geometry::{generate_mesh, CurveSpec, Shape};
use hidbf::linalg::{dot_h, norm2};
use hidbf::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Orthonormal columns by twice-iterated Gram-Schmidt.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut q = random_matrix(n, n, rng);
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.col(k).to_vec();
                let c = dot_h(&qk, q.col(j));
                for (v, u) in q.col_mut(j).iter_mut().zip(&qk) {
                    *v -= c * u;
                }
            }
        }
        let nrm = norm2(q.col(j));
        q.col_mut(j).iter_mut().for_each(|v| *v /= nrm);
    }
    q
}

/// `U diag(sigma) V^H` with random unitary factors.
pub fn matrix_with_singular_values(sigma: &[f64], rng: &mut ChaCha8Rng) -> CMatrix {
    let n = sigma.len();
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let us = CMatrix::from_fn(n, n, |i, j| u[(i, j)] * sigma[j]);
    us.matmul(&v.adjoint())
}

/// `exp(-i pi x y N)` sampled at `x = i / N`, `y = j / N`.
pub fn fourier_kernel(n: usize) -> FnEntries<impl Fn(usize, usize) -> C64 + Sync> {
    FnEntries::new(n, n, move |i, j| {
        let phase = std::f64::consts::PI * (i as f64) * (j as f64) / n as f64;
        C64::from_polar(1.0, -phase)
    })
}

pub fn efie(shape: Shape, n: usize) -> EntryOracle {
    let mesh = generate_mesh(&CurveSpec::for_unknowns(shape, n, 20.0), 20.0).unwrap();
    assert_eq!(mesh.len(), n, "{shape} mesh size");
    EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn).unwrap()
}

pub fn frob_rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm()
}
