//! Small dense complex linear algebra used by the compression routines and
//! by the verification oracles: a column-major matrix type, partial-pivot LU,
//! triangular substitution and a Hessenberg/QR eigenvalue solver.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense column-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix column by column from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `y += self * x`.
    pub fn gemv_acc(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.rows];
        self.gemv_acc(x, &mut y);
        y
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let (src, dst) = (other.col(j), &mut out.data[j * self.rows..(j + 1) * self.rows]);
            for (k, &b) in src.iter().enumerate() {
                if b == ZERO {
                    continue;
                }
                for (d, &a) in dst.iter_mut().zip(self.col(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Copy of the submatrix selected by `rows` x `cols` (local indices).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        CMatrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.rows + i]
    }
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `a^H b`.
pub fn dot_h(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

/// `||a - b|| / ||b||`, or the absolute difference when `b` vanishes.
pub fn rel_error(a: &[C64], b: &[C64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let nb = norm2(b);
    if nb == 0.0 {
        diff
    } else {
        diff / nb
    }
}

/// Partial-pivot LU factorization, stored in place.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(mut a: CMatrix) -> Result<Self> {
        let n = a.rows;
        if a.cols != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.cols });
        }
        let scale = a.max_abs();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
                return Err(Error::Singular(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    a.data.swap(j * n + p, j * n + k);
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                a[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let akj = a[(k, j)];
                if akj == ZERO {
                    continue;
                }
                for i in k + 1..n {
                    let lik = a[(i, k)];
                    a[(i, j)] -= lik * akj;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for (xi, &l) in x[j + 1..].iter_mut().zip(&self.lu.col(j)[j + 1..]) {
                *xi -= l * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            for (xi, &u) in x[..j].iter_mut().zip(&self.lu.col(j)[..j]) {
                *xi -= u * xj;
            }
        }
        x
    }
}

/// Forward substitution with the strictly-lower part of `m` and an implicit unit diagonal.
pub fn unit_lower_solve_in_place(m: &CMatrix, x: &mut [C64]) {
    let n = m.rows;
    for j in 0..n {
        let xj = x[j];
        if xj == ZERO {
            continue;
        }
        let col = m.col(j);
        for i in j + 1..n {
            x[i] -= col[i] * xj;
        }
    }
}

/// Back substitution with the upper triangle (diagonal included) of `m`.
/// `offset` shifts the index reported on a singular pivot.
pub fn upper_solve_in_place(m: &CMatrix, x: &mut [C64], offset: usize) -> Result<()> {
    let n = m.rows;
    for j in (0..n).rev() {
        let d = m[(j, j)];
        if d.norm() < 1e-300 {
            return Err(Error::SingularDiagonal(offset + j));
        }
        x[j] /= d;
        let xj = x[j];
        if xj == ZERO {
            continue;
        }
        let col = m.col(j);
        for i in 0..j {
            x[i] -= col[i] * xj;
        }
    }
    Ok(())
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let nrm = (an * an + b.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, ONE);
    }
    (an / nrm, (a / an) * b.conj() / nrm)
}

/// All eigenvalues of a square complex matrix: Householder reduction to upper
/// Hessenberg form followed by single-shift QR sweeps with Wilkinson shifts.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.cols });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg_in_place(&mut h);

    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter_here = 0usize;
    let mut sweeps = 0usize;
    let max_sweeps = 100 * n.max(1);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter_here = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence(sweeps));
        }
        iter_here += 1;

        let (p, q, r, s) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        let mu = if iter_here % 11 == 10 {
            // exceptional shift
            s + C64::new(r.norm() * 0.75, 0.0)
        } else {
            let half = (p - s) * 0.5;
            let disc = (half * half + q * r).sqrt();
            let m1 = (p + s) * 0.5 + disc;
            let m2 = (p + s) * 0.5 - disc;
            if (m1 - s).norm() < (m2 - s).norm() {
                m1
            } else {
                m2
            }
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + y * c;
            }
            rots.push((c, sn));
        }
        for (idx, &(c, sn)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * sn.conj();
                h[(i, k + 1)] = -x * sn + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn hessenberg_in_place(h: &mut CMatrix) {
    let n = h.rows;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // H <- (I - 2vv^H) H
        for j in k..n {
            let mut s = ZERO;
            for i in k + 1..n {
                s += v[i].conj() * h[(i, j)];
            }
            s *= 2.0;
            for i in k + 1..n {
                let vi = v[i];
                h[(i, j)] -= vi * s;
            }
        }
        // H <- H (I - 2vv^H)
        for i in 0..n {
            let mut s = ZERO;
            for j in k + 1..n {
                s += h[(i, j)] * v[j];
            }
            s *= 2.0;
            for j in k + 1..n {
                let vj = v[j].conj();
                h[(i, j)] -= s * vj;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}
