//! Linear-scaling interpolative decompositions.
//!
//! A column ID selects skeleton columns `q` of `A(rows, cols)` and an
//! interpolation matrix `V = [I T] P^*` with `A ~ A(:, q) V`. Only a
//! Mock-Chebyshev sample of `t * k` rows is ever evaluated; the skeleton is
//! read off a column-pivoted Householder QR of that sample. Row IDs are
//! column IDs of the adjoint.

use std::f64::consts::PI;

use crate::efie::MatrixEntries;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdConfig {
    /// Relative truncation tolerance on the diagonal of `R`.
    pub epsilon: f64,
    /// Maximum retained rank `k`.
    pub rank_cap: usize,
    /// Sample size multiplier `t`: `t * k` rows (or columns) are sampled.
    pub oversampling: usize,
}

impl Default for IdConfig {
    fn default() -> Self {
        Self { epsilon: 1e-4, rank_cap: 100, oversampling: 1 }
    }
}

impl IdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.rank_cap == 0 || self.oversampling == 0 {
            return Err(Error::Config("rank_cap and oversampling must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_rank_cap(self, rank_cap: usize) -> Self {
        Self { rank_cap, ..self }
    }
}

/// Result of a row or column ID.
#[derive(Clone, Debug, PartialEq)]
pub struct IdResult {
    /// Skeleton indices (global), in pivot order.
    pub skeleton: Vec<usize>,
    /// `T`, of shape `rank x (n - rank)`.
    pub interp: CMatrix,
    /// Local positions in pivot order: the first `rank` are the skeleton.
    pub permutation: Vec<usize>,
    /// The rank stopped at the cap rather than at the tolerance.
    pub hit_cap: bool,
}

impl IdResult {
    fn empty(n: usize) -> Self {
        Self { skeleton: Vec::new(), interp: CMatrix::zeros(0, n), permutation: (0..n).collect(), hit_cap: false }
    }

    pub fn rank(&self) -> usize {
        self.skeleton.len()
    }

    /// Size of the index set the ID was computed on.
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    /// Local positions of the skeleton.
    pub fn skeleton_positions(&self) -> &[usize] {
        &self.permutation[..self.rank()]
    }

    /// Stored nonzeros of the interpolation matrix (identity block plus `T`).
    pub fn nonzeros(&self) -> usize {
        let k = self.rank();
        k + k * (self.len() - k)
    }

    /// `V x` for the column form: `x(q) + T x(p)`.
    pub fn apply_column(&self, x: &[C64], out: &mut [C64]) {
        let k = self.rank();
        debug_assert_eq!(x.len(), self.len());
        debug_assert_eq!(out.len(), k);
        for (o, &p) in out.iter_mut().zip(&self.permutation[..k]) {
            *o = x[p];
        }
        for (l, &p) in self.permutation[k..].iter().enumerate() {
            let xp = x[p];
            if xp == ZERO {
                continue;
            }
            for (o, &t) in out.iter_mut().zip(self.interp.col(l)) {
                *o += t * xp;
            }
        }
    }

    /// `y += U w` for the row form, `U = P [I T]^*`.
    pub fn apply_row_acc(&self, w: &[C64], y: &mut [C64]) {
        let k = self.rank();
        debug_assert_eq!(w.len(), k);
        debug_assert_eq!(y.len(), self.len());
        for (&wi, &p) in w.iter().zip(&self.permutation[..k]) {
            y[p] += wi;
        }
        for (l, &p) in self.permutation[k..].iter().enumerate() {
            let mut s = ZERO;
            for (&t, &wi) in self.interp.col(l).iter().zip(w) {
                s += t.conj() * wi;
            }
            y[p] += s;
        }
    }

    /// Dense `V` (`rank x n`) of the column form.
    pub fn column_interpolation_matrix(&self) -> CMatrix {
        let k = self.rank();
        let mut v = CMatrix::zeros(k, self.len());
        for (i, &p) in self.permutation[..k].iter().enumerate() {
            v[(i, p)] = ONE;
        }
        for (l, &p) in self.permutation[k..].iter().enumerate() {
            for i in 0..k {
                v[(i, p)] = self.interp[(i, l)];
            }
        }
        v
    }

    /// Dense `U` (`n x rank`) of the row form.
    pub fn row_interpolation_matrix(&self) -> CMatrix {
        self.column_interpolation_matrix().adjoint()
    }
}

/// Mock-Chebyshev subset of `index_set` of size `count`: the elements whose
/// positions are nearest to the Chebyshev nodes `cos((2m-1) pi / (2 count))`
/// mapped onto `[0, len - 1]`, collisions resolved to the nearest unused
/// position (ties toward the lower position). Returned in set order.
pub fn select_sample_indices(index_set: &[usize], count: usize) -> Result<Vec<usize>> {
    let n = index_set.len();
    if count == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    if count > n {
        return Err(Error::Config(format!("cannot sample {count} of {n} indices")));
    }
    if count == n {
        return Ok(index_set.to_vec());
    }
    let mut used = vec![false; n];
    let span = (n - 1) as f64;
    for m in 1..=count {
        let node = ((2 * m - 1) as f64 * PI / (2 * count) as f64).cos();
        let target = 0.5 * (node + 1.0) * span;
        let mut pos = (target.round() as usize).min(n - 1);
        if used[pos] {
            pos = nearest_unused(&used, target);
        }
        used[pos] = true;
    }
    Ok(used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| index_set[i]).collect())
}

fn nearest_unused(used: &[bool], target: f64) -> usize {
    let mut best = None;
    let mut best_d = f64::MAX;
    for (i, &u) in used.iter().enumerate() {
        if !u {
            let d = (i as f64 - target).abs();
            if d < best_d {
                best_d = d;
                best = Some(i);
            }
        }
    }
    best.expect("at least one unused position")
}

/// Column ID of `A(rows, cols)` from a Mock-Chebyshev sample of the rows.
pub fn column_id<E: MatrixEntries + ?Sized>(entries: &E, rows: &[usize], cols: &[usize], cfg: &IdConfig) -> IdResult {
    if rows.is_empty() || cols.is_empty() {
        return IdResult::empty(cols.len());
    }
    let count = (cfg.oversampling * cfg.rank_cap).min(rows.len());
    let sample = select_sample_indices(rows, count).expect("count within range");
    let m = CMatrix::from_fn(sample.len(), cols.len(), |i, j| entries.entry(sample[i], cols[j]));
    id_of_sample(m, cols, cfg)
}

/// Row ID of `A(rows, cols)`, computed as a column ID of `A^*` on a sample of the columns.
pub fn row_id<E: MatrixEntries + ?Sized>(entries: &E, rows: &[usize], cols: &[usize], cfg: &IdConfig) -> IdResult {
    if rows.is_empty() || cols.is_empty() {
        return IdResult::empty(rows.len());
    }
    let count = (cfg.oversampling * cfg.rank_cap).min(cols.len());
    let sample = select_sample_indices(cols, count).expect("count within range");
    let m = CMatrix::from_fn(sample.len(), rows.len(), |i, j| entries.entry(rows[j], sample[i]).conj());
    id_of_sample(m, rows, cfg)
}

/// Column ID of an explicit sample matrix whose columns are labelled by `labels`.
pub fn id_of_sample(mut a: CMatrix, labels: &[usize], cfg: &IdConfig) -> IdResult {
    let n = a.cols();
    assert_eq!(labels.len(), n);
    let qr = truncated_pivoted_qr(&mut a, cfg.epsilon, cfg.rank_cap);
    let k = qr.rank;
    let mut t = CMatrix::zeros(k, n - k);
    for l in 0..n - k {
        let col = t.col_mut(l);
        for i in 0..k {
            col[i] = a[(i, k + l)];
        }
        // back substitution with R11
        for i in (0..k).rev() {
            let mut s = col[i];
            for j in i + 1..k {
                s -= a[(i, j)] * col[j];
            }
            col[i] = s / a[(i, i)];
        }
    }
    IdResult {
        skeleton: qr.perm[..k].iter().map(|&p| labels[p]).collect(),
        interp: t,
        permutation: qr.perm,
        hit_cap: qr.hit_cap,
    }
}

struct PivotedQr {
    perm: Vec<usize>,
    rank: usize,
    hit_cap: bool,
}

/// Householder QR with column pivoting, overwriting `a` with `R` in permuted
/// column order. Stops at the first pivot below `eps * |R(0,0)|` or at `cap`.
/// Pivot ties go to the lowest original column index.
fn truncated_pivoted_qr(a: &mut CMatrix, eps: f64, cap: usize) -> PivotedQr {
    let (m, n) = (a.rows(), a.cols());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut v = vec![ZERO; m];
    let mut rank = 0;
    let mut r00 = 0.0;
    let limit = m.min(n).min(cap);
    let mut stopped_by_tolerance = false;

    let residual_norm = |a: &CMatrix, j: usize, c: usize| -> f64 {
        a.col(c)[j..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };

    for j in 0..limit {
        let mut p = j;
        let mut best = -1.0;
        for c in j..n {
            let nrm = residual_norm(a, j, c);
            if nrm > best || (nrm == best && perm[c] < perm[p]) {
                best = nrm;
                p = c;
            }
        }
        if j == 0 {
            r00 = best;
            if r00 == 0.0 {
                stopped_by_tolerance = true;
                break;
            }
        } else if best <= eps * r00 {
            stopped_by_tolerance = true;
            break;
        }
        if p != j {
            perm.swap(p, j);
            for i in 0..m {
                let (x, y) = (a[(i, j)], a[(i, p)]);
                a[(i, j)] = y;
                a[(i, p)] = x;
            }
        }
        let x0 = a[(j, j)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * best;
        for i in j..m {
            v[i] = a[(i, j)];
        }
        v[j] -= alpha;
        let vnorm2: f64 = v[j..m].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > 0.0 {
            let scale = 2.0 / vnorm2;
            for c in j + 1..n {
                let col = a.col_mut(c);
                let mut s = ZERO;
                for i in j..m {
                    s += v[i].conj() * col[i];
                }
                s *= scale;
                for i in j..m {
                    col[i] -= v[i] * s;
                }
            }
        }
        a[(j, j)] = alpha;
        for i in j + 1..m {
            a[(i, j)] = ZERO;
        }
        rank = j + 1;
    }

    let hit_cap = !stopped_by_tolerance && rank == cap && rank < n && {
        // a complete sample with nothing left above tolerance is not a truncation
        rank == m || (rank..n).any(|c| residual_norm(a, rank, c) > eps * r00)
    };
    PivotedQr { perm, rank, hit_cap }
}
