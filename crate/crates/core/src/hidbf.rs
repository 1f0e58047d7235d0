//! Hierarchical IDBF: a binary tree over the unknowns with dense diagonal
//! leaves and butterfly-compressed off-diagonal blocks,
//!
//! ```text
//! F = [ F11  F12 ]
//!     [ F21  F22 ]
//! ```
//!
//! The same tree, read as a lower or upper block-triangular matrix, gives
//! the approximate LU factors used as a preconditioner. No numerical
//! factorization happens: the split only reinterprets the stored blocks.

use std::fmt::Write as _;
use std::ops::Range;

use crate::efie::MatrixEntries;
use crate::error::{Error, Result};
use crate::idbf::{idbf_compress, ButterflyConfig, ButterflyFactors, RankRecord};
use crate::linalg::{unit_lower_solve_in_place, upper_solve_in_place, CMatrix, C64, ZERO};

#[derive(Clone, Debug)]
pub enum HidbfNode {
    Leaf {
        range: Range<usize>,
        block: CMatrix,
    },
    Internal {
        range: Range<usize>,
        mid: usize,
        f11: Box<HidbfNode>,
        f22: Box<HidbfNode>,
        f12: ButterflyFactors,
        f21: ButterflyFactors,
    },
}

/// Builds the H-IDBF of `A(range, range)`.
pub fn hidbf_construct<E: MatrixEntries + ?Sized>(
    entries: &E,
    range: Range<usize>,
    cfg: &ButterflyConfig,
) -> Result<HidbfNode> {
    cfg.validate()?;
    let (r, c) = entries.shape();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, got: c });
    }
    if range.end > r || range.is_empty() {
        return Err(Error::Config(format!("range {range:?} is not a nonempty subrange of 0..{r}")));
    }
    build(entries, range, cfg)
}

fn build<E: MatrixEntries + ?Sized>(entries: &E, range: Range<usize>, cfg: &ButterflyConfig) -> Result<HidbfNode> {
    let n = range.len();
    if n <= cfg.leaf_size {
        let lo = range.start;
        let block = CMatrix::from_fn(n, n, |i, j| entries.entry(lo + i, lo + j));
        return Ok(HidbfNode::Leaf { range, block });
    }
    let mid = range.start + n.div_ceil(2);
    let (top, bottom) = (range.start..mid, mid..range.end);
    let ((f11, f22), (f12, f21)) = rayon::join(
        || rayon::join(|| build(entries, top.clone(), cfg), || build(entries, bottom.clone(), cfg)),
        || {
            rayon::join(
                || idbf_compress(entries, top.clone(), bottom.clone(), cfg),
                || idbf_compress(entries, bottom.clone(), top.clone(), cfg),
            )
        },
    );
    Ok(HidbfNode::Internal {
        range,
        mid,
        f11: Box::new(f11?),
        f22: Box::new(f22?),
        f12: f12?,
        f21: f21?,
    })
}

impl HidbfNode {
    pub fn range(&self) -> Range<usize> {
        match self {
            HidbfNode::Leaf { range, .. } | HidbfNode::Internal { range, .. } => range.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.range().len()
    }

    pub fn is_empty(&self) -> bool {
        self.range().is_empty()
    }

    /// `u += F v`.
    pub fn matvec_acc(&self, v: &[C64], u: &mut [C64]) -> Result<()> {
        let n = self.len();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        self.acc(v, u);
        Ok(())
    }

    /// `F v`.
    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        let mut u = vec![ZERO; self.len()];
        self.matvec_acc(v, &mut u)?;
        Ok(u)
    }

    fn acc(&self, v: &[C64], u: &mut [C64]) {
        match self {
            HidbfNode::Leaf { block, .. } => block.gemv_acc(v, u),
            HidbfNode::Internal { range, mid, f11, f22, f12, f21 } => {
                let s = mid - range.start;
                let (v1, v2) = v.split_at(s);
                let (u1, u2) = u.split_at_mut(s);
                rayon::join(
                    || {
                        f11.acc(v1, u1);
                        f12.apply_acc(v2, u1).expect("consistent block sizes");
                    },
                    || {
                        f22.acc(v2, u2);
                        f21.apply_acc(v1, u2).expect("consistent block sizes");
                    },
                );
            }
        }
    }

    /// Dense matrix of the approximation.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.len();
        let mut out = CMatrix::zeros(n, n);
        self.fill_dense(&mut out, self.range().start, None);
        out
    }

    fn fill_dense(&self, out: &mut CMatrix, origin: usize, side: Option<Side>) {
        match self {
            HidbfNode::Leaf { range, block } => {
                let o = range.start - origin;
                for j in 0..block.cols() {
                    for i in 0..block.rows() {
                        let keep = match side {
                            None => true,
                            Some(Side::Lower) => i >= j,
                            Some(Side::Upper) => i <= j,
                        };
                        if keep {
                            out[(o + i, o + j)] = if side == Some(Side::Lower) && i == j {
                                C64::new(1.0, 0.0)
                            } else {
                                block[(i, j)]
                            };
                        }
                    }
                }
            }
            HidbfNode::Internal { f11, f22, f12, f21, .. } => {
                f11.fill_dense(out, origin, side);
                f22.fill_dense(out, origin, side);
                let blocks: Vec<&ButterflyFactors> = match side {
                    None => vec![f12, f21],
                    Some(Side::Lower) => vec![f21],
                    Some(Side::Upper) => vec![f12],
                };
                for b in blocks {
                    let d = b.to_dense();
                    let (r0, c0) = (b.row_range().start - origin, b.col_range().start - origin);
                    for j in 0..d.cols() {
                        for i in 0..d.rows() {
                            out[(r0 + i, c0 + j)] = d[(i, j)];
                        }
                    }
                }
            }
        }
    }

    fn visit(&self, depth: usize, f: &mut dyn FnMut(usize, &HidbfNode)) {
        f(depth, self);
        if let HidbfNode::Internal { f11, f22, .. } = self {
            f11.visit(depth + 1, f);
            f22.visit(depth + 1, f);
        }
    }

    fn butterflies(&self) -> Vec<&ButterflyFactors> {
        let mut out = Vec::new();
        self.collect_butterflies(&mut out);
        out
    }

    fn collect_butterflies<'a>(&'a self, out: &mut Vec<&'a ButterflyFactors>) {
        if let HidbfNode::Internal { f11, f22, f12, f21, .. } = self {
            out.push(f12);
            out.push(f21);
            f11.collect_butterflies(out);
            f22.collect_butterflies(out);
        }
    }

    /// Stored nonzeros: dense leaves plus every butterfly.
    pub fn nonzeros(&self) -> usize {
        let mut total = 0;
        self.visit(0, &mut |_, n| {
            if let HidbfNode::Leaf { block, .. } = n {
                total += block.rows() * block.cols();
            }
        });
        total + self.butterflies().iter().map(|b| b.nonzeros()).sum::<usize>()
    }

    /// Complex multiply-adds of one matvec.
    pub fn apply_flops(&self) -> usize {
        let mut total = 0;
        self.visit(0, &mut |_, n| {
            if let HidbfNode::Leaf { block, .. } = n {
                total += block.rows() * block.cols();
            }
        });
        total + self.butterflies().iter().map(|b| b.apply_flops()).sum::<usize>()
    }

    pub fn max_rank(&self) -> usize {
        self.butterflies().iter().map(|b| b.max_rank()).max().unwrap_or(0)
    }

    /// Rank records of all butterflies, block numbers made unique per level.
    pub fn rank_records(&self) -> Vec<RankRecord> {
        let mut offsets: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for b in self.butterflies() {
            let recs = b.rank_records();
            let mut used: Vec<usize> = Vec::new();
            for r in recs {
                if offsets.len() < r.level {
                    offsets.resize(r.level, 0);
                }
                if used.len() < r.level {
                    used.resize(r.level, 0);
                }
                used[r.level - 1] = used[r.level - 1].max(r.block + 1);
                out.push(RankRecord { block: r.block + offsets[r.level - 1], ..r });
            }
            for (o, u) in offsets.iter_mut().zip(used) {
                *o += u;
            }
        }
        out
    }

    /// Depth of the binary tree (0 for a single leaf).
    pub fn depth(&self) -> usize {
        let mut d = 0;
        self.visit(0, &mut |k, _| d = d.max(k));
        d
    }

    pub fn leaf_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(0, &mut |_, n| {
            if let HidbfNode::Leaf { range, .. } = n {
                out.push(range.len());
            }
        });
        out
    }

    /// Indented one-line-per-node description of the tree.
    pub fn structure_dump(&self) -> String {
        let mut s = String::new();
        self.visit(0, &mut |depth, n| {
            let pad = "  ".repeat(depth);
            match n {
                HidbfNode::Leaf { range, .. } => {
                    let _ = writeln!(s, "{pad}leaf [{}, {}) dense {}x{}", range.start, range.end, range.len(), range.len());
                }
                HidbfNode::Internal { range, mid, f12, f21, .. } => {
                    let _ = writeln!(
                        s,
                        "{pad}node [{}, {}) split {} F12 L={} max_rank={} nnz={} F21 L={} max_rank={} nnz={}",
                        range.start,
                        range.end,
                        mid,
                        f12.depth(),
                        f12.max_rank(),
                        f12.nonzeros(),
                        f21.depth(),
                        f21.max_rank(),
                        f21.nonzeros()
                    );
                }
            }
        });
        s
    }

    /// Perturbs the first off-diagonal butterfly. Test hook for the verification path.
    #[doc(hidden)]
    pub fn perturb_first_butterfly(&mut self, delta: C64) -> bool {
        match self {
            HidbfNode::Leaf { .. } => false,
            HidbfNode::Internal { f12, .. } => f12.perturb(delta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Unit diagonal, strictly lower part of the leaves, `F21` blocks.
    Lower,
    /// Upper part of the leaves including the diagonal, `F12` blocks.
    Upper,
}

/// Zero-copy triangular reading of an H-IDBF tree.
#[derive(Clone, Copy, Debug)]
pub struct TriangularView<'a> {
    pub source: &'a HidbfNode,
    pub side: Side,
}

/// `(L~, U~)`, both borrowing `node`.
pub fn lu_split(node: &HidbfNode) -> (TriangularView<'_>, TriangularView<'_>) {
    (TriangularView { source: node, side: Side::Lower }, TriangularView { source: node, side: Side::Upper })
}

impl TriangularView<'_> {
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// Product with the triangular matrix.
    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        let n = self.len();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        let mut u = vec![ZERO; n];
        tri_acc(self.source, self.side, v, &mut u);
        Ok(u)
    }

    /// Solves with the triangular matrix.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.len();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x = b.to_vec();
        match self.side {
            Side::Lower => lower_in_place(self.source, &mut x)?,
            Side::Upper => upper_in_place(self.source, &mut x)?,
        }
        Ok(x)
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.len();
        let mut out = CMatrix::zeros(n, n);
        self.source.fill_dense(&mut out, self.source.range().start, Some(self.side));
        out
    }
}

fn tri_acc(node: &HidbfNode, side: Side, v: &[C64], u: &mut [C64]) {
    match node {
        HidbfNode::Leaf { block, .. } => {
            let n = block.rows();
            for j in 0..n {
                let vj = v[j];
                let col = block.col(j);
                match side {
                    Side::Lower => {
                        u[j] += vj;
                        for i in j + 1..n {
                            u[i] += col[i] * vj;
                        }
                    }
                    Side::Upper => {
                        for i in 0..=j {
                            u[i] += col[i] * vj;
                        }
                    }
                }
            }
        }
        HidbfNode::Internal { range, mid, f11, f22, f12, f21 } => {
            let s = mid - range.start;
            let (v1, v2) = v.split_at(s);
            let (u1, u2) = u.split_at_mut(s);
            tri_acc(f11, side, v1, u1);
            tri_acc(f22, side, v2, u2);
            match side {
                Side::Lower => f21.apply_acc(v1, u2),
                Side::Upper => f12.apply_acc(v2, u1),
            }
            .expect("consistent block sizes");
        }
    }
}

fn lower_in_place(node: &HidbfNode, x: &mut [C64]) -> Result<()> {
    match node {
        HidbfNode::Leaf { block, .. } => {
            unit_lower_solve_in_place(block, x);
            Ok(())
        }
        HidbfNode::Internal { range, mid, f11, f22, f21, .. } => {
            let (x1, x2) = x.split_at_mut(mid - range.start);
            lower_in_place(f11, x1)?;
            let t = f21.apply(x1)?;
            x2.iter_mut().zip(t).for_each(|(a, b)| *a -= b);
            lower_in_place(f22, x2)
        }
    }
}

fn upper_in_place(node: &HidbfNode, x: &mut [C64]) -> Result<()> {
    match node {
        HidbfNode::Leaf { range, block } => upper_solve_in_place(block, x, range.start),
        HidbfNode::Internal { range, mid, f11, f22, f12, .. } => {
            let (x1, x2) = x.split_at_mut(mid - range.start);
            upper_in_place(f22, x2)?;
            let t = f12.apply(x2)?;
            x1.iter_mut().zip(t).for_each(|(a, b)| *a -= b);
            upper_in_place(f11, x1)
        }
    }
}

/// Solves `L~ x = b`; `view` must be the lower half of an `lu_split`.
pub fn lower_solve(view: &TriangularView<'_>, b: &[C64]) -> Result<Vec<C64>> {
    if view.side != Side::Lower {
        return Err(Error::Config("lower_solve needs the lower triangular view".into()));
    }
    view.solve(b)
}

/// Solves `U~ x = b`; `view` must be the upper half of an `lu_split`.
pub fn upper_solve(view: &TriangularView<'_>, b: &[C64]) -> Result<Vec<C64>> {
    if view.side != Side::Upper {
        return Err(Error::Config("upper_solve needs the upper triangular view".into()));
    }
    view.solve(b)
}
