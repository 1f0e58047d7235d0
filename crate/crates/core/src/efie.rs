//! Impedance matrix of the 2D TMz electric-field integral equation with
//! pulse basis functions and point matching.
//!
//! Entries are produced on demand by an [`EntryOracle`]; the rescaled system
//! `a A x = a b` is what every solver in this crate sees.

use std::collections::HashSet;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::linalg::{CMatrix, C64, ZERO};
use crate::specfn::{self, EULER_GAMMA};

/// Free-space impedance in ohms.
pub const ETA0: f64 = 376.730_313_668;

/// Default cap on the size of densely assembled matrices.
pub const DENSE_LIMIT: usize = 8192;

/// Random access to the entries of a (possibly implicit) matrix.
pub trait MatrixEntries: Sync {
    fn shape(&self) -> (usize, usize);

    fn entry(&self, i: usize, j: usize) -> C64;
}

impl MatrixEntries for CMatrix {
    fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    fn entry(&self, i: usize, j: usize) -> C64 {
        self[(i, j)]
    }
}

impl<T: MatrixEntries + ?Sized> MatrixEntries for &T {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }

    fn entry(&self, i: usize, j: usize) -> C64 {
        (**self).entry(i, j)
    }
}

/// Matrix defined by a closure.
pub struct FnEntries<F> {
    rows: usize,
    cols: usize,
    f: F,
}

impl<F: Fn(usize, usize) -> C64 + Sync> FnEntries<F> {
    pub fn new(rows: usize, cols: usize, f: F) -> Self {
        Self { rows, cols, f }
    }
}

impl<F: Fn(usize, usize) -> C64 + Sync> MatrixEntries for FnEntries<F> {
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn entry(&self, i: usize, j: usize) -> C64 {
        (self.f)(i, j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub kappa: f64,
    pub eta0: f64,
    /// `exp(Euler–Mascheroni)`.
    pub gamma_const: f64,
    pub e_const: f64,
}

impl KernelParams {
    pub fn for_wavelength(lambda0: f64) -> Self {
        Self { kappa: 2.0 * PI / lambda0, eta0: ETA0, gamma_const: EULER_GAMMA.exp(), e_const: E }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RescaleStrategy {
    MaxFirstColumn,
    SpectralNorm,
}

/// Entry evaluator for the rescaled impedance matrix `a A`.
#[derive(Clone, Debug)]
pub struct EntryOracle {
    mesh: Mesh,
    params: KernelParams,
    rescale: f64,
}

impl EntryOracle {
    /// Oracle with an explicit rescale factor.
    pub fn new(mesh: Mesh, params: KernelParams, rescale: f64) -> Result<Self> {
        if !(params.kappa > 0.0 && params.eta0 > 0.0) {
            return Err(Error::Config("kappa and eta0 must be positive".into()));
        }
        if !(rescale > 0.0 && rescale.is_finite()) {
            return Err(Error::Config(format!("rescale factor must be positive, got {rescale}")));
        }
        let mut seen = HashSet::with_capacity(mesh.len());
        for (i, c) in mesh.centers.iter().enumerate() {
            if !seen.insert((c[0].to_bits(), c[1].to_bits())) {
                let j = mesh.centers[..i].iter().position(|p| p == c).unwrap_or(i);
                return Err(Error::CoincidentCenters(j, i));
            }
        }
        Ok(Self { mesh, params, rescale })
    }

    /// Oracle rescaled with the given strategy, `lambda0` taken from the mesh.
    pub fn rescaled(mesh: Mesh, strategy: RescaleStrategy) -> Result<Self> {
        let params = KernelParams::for_wavelength(mesh.wavelength);
        let a = compute_rescale(&mesh, &params, strategy)?;
        Self::new(mesh, params, a)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn rescale(&self) -> f64 {
        self.rescale
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// Checked entry `a A(i, j)`.
    pub fn impedance_entry(&self, i: usize, j: usize) -> Result<C64> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { row: i, col: j, n });
        }
        if i != j && self.mesh.centers[i] == self.mesh.centers[j] {
            return Err(Error::CoincidentCenters(i, j));
        }
        Ok(self.raw_entry(i, j))
    }

    #[inline]
    fn raw_entry(&self, i: usize, j: usize) -> C64 {
        unscaled_entry(&self.mesh, &self.params, i, j) * self.rescale
    }

    /// `b_i = a exp(-i kappa d . rho_i)` for a unit propagation direction `d`.
    pub fn plane_wave_rhs(&self, direction: [f64; 2]) -> Result<Vec<C64>> {
        let len = (direction[0].powi(2) + direction[1].powi(2)).sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("incident direction must be a unit vector, |d| = {len}")));
        }
        let k = self.params.kappa;
        Ok(self
            .mesh
            .centers
            .iter()
            .map(|c| Complex64::from_polar(self.rescale, -k * (direction[0] * c[0] + direction[1] * c[1])))
            .collect())
    }
}

impl MatrixEntries for EntryOracle {
    fn shape(&self) -> (usize, usize) {
        (self.len(), self.len())
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> C64 {
        self.raw_entry(i, j)
    }
}

#[inline]
fn unscaled_entry(mesh: &Mesh, p: &KernelParams, i: usize, j: usize) -> C64 {
    if i == j {
        let w = mesh.lengths[i];
        let pre = p.kappa * p.eta0 * w / 4.0;
        let log = (p.gamma_const * p.kappa * w / (4.0 * p.e_const)).ln();
        Complex64::new(pre, -pre * (2.0 / PI) * log)
    } else {
        let (a, b) = (mesh.centers[i], mesh.centers[j]);
        let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let pre = p.kappa * p.eta0 * mesh.lengths[j] / 4.0;
        specfn::hankel0_second_unchecked(p.kappa * r) * pre
    }
}

/// Rescale factor `a` for `a A x = a b`.
///
/// `MaxFirstColumn` gives `1 / max_i |A(i, 0)|` in `O(N)`. `SpectralNorm` gives
/// `1 / ||A||_2` estimated with 20 power iterations on `A^H A`, each a
/// matrix-free dense product (`O(N^2)` entry evaluations).
pub fn compute_rescale(mesh: &Mesh, params: &KernelParams, strategy: RescaleStrategy) -> Result<f64> {
    let n = mesh.len();
    if n == 0 {
        return Err(Error::Geometry("empty mesh".into()));
    }
    let norm = match strategy {
        RescaleStrategy::MaxFirstColumn => {
            (0..n).map(|i| unscaled_entry(mesh, params, i, 0).norm()).fold(0.0, f64::max)
        }
        RescaleStrategy::SpectralNorm => {
            let a = FnEntries::new(n, n, |i, j| unscaled_entry(mesh, params, i, j));
            let mut x: Vec<C64> = (0..n).map(|i| Complex64::new(1.0, 0.1 * (i % 7) as f64)).collect();
            let mut sigma = 0.0;
            for _ in 0..20 {
                let nx = crate::linalg::norm2(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                let y = dense_matvec(&a, &x);
                sigma = crate::linalg::norm2(&y);
                x = dense_adjoint_matvec(&a, &y);
            }
            sigma
        }
    };
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Domain("cannot rescale a matrix with vanishing norm".into()));
    }
    Ok(1.0 / norm)
}

/// Matrix-free dense product `A x`, entries evaluated on the fly, rows in parallel.
pub fn dense_matvec<M: MatrixEntries + ?Sized>(a: &M, x: &[C64]) -> Vec<C64> {
    let (rows, cols) = a.shape();
    assert_eq!(x.len(), cols, "dense_matvec: dimension mismatch");
    (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut s = ZERO;
            for (j, xj) in x.iter().enumerate() {
                s += a.entry(i, j) * xj;
            }
            s
        })
        .collect()
}

/// Matrix-free dense product `A^H y`.
pub fn dense_adjoint_matvec<M: MatrixEntries + ?Sized>(a: &M, y: &[C64]) -> Vec<C64> {
    let (rows, cols) = a.shape();
    assert_eq!(y.len(), rows);
    (0..cols)
        .into_par_iter()
        .map(|j| {
            let mut s = ZERO;
            for (i, yi) in y.iter().enumerate() {
                s += a.entry(i, j).conj() * yi;
            }
            s
        })
        .collect()
}

/// Full matrix of entries; refuses anything larger than `limit` per side.
pub fn assemble_dense<M: MatrixEntries + ?Sized>(a: &M, limit: usize) -> Result<CMatrix> {
    let (rows, cols) = a.shape();
    if rows.max(cols) > limit {
        return Err(Error::DenseLimit { n: rows.max(cols), limit });
    }
    let data: Vec<C64> = (0..cols)
        .into_par_iter()
        .flat_map_iter(|j| (0..rows).map(move |i| a.entry(i, j)))
        .collect();
    Ok(CMatrix::from_col_major(rows, cols, data))
}

/// `b = op(x_true)`, the synthetic right-hand side of the accuracy experiments.
pub fn synthetic_rhs(op: &dyn Fn(&[C64]) -> Vec<C64>, dim: usize, x_true: &[C64]) -> Result<Vec<C64>> {
    if x_true.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x_true.len() });
    }
    let b = op(x_true);
    if b.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: b.len() });
    }
    Ok(b)
}
