//! Interpolative butterfly factorization of complementary low-rank blocks.
//!
//! A block whose row and column index sets are each split dyadically into
//! `2^L` leaves is compressed by repeated matrix splitting with
//! complementary skeletonization (MSCS): the block is cut into four
//! quadrants, each quadrant is skeletonized (row IDs per row leaf, then
//! column IDs per column leaf against the concatenated row skeletons), and
//! the skeleton submatrix of each quadrant, with neighbouring leaves merged
//! in pairs, is a complementary low-rank block with two fewer levels that is
//! compressed the same way. Recursion stops at a single leaf, which is kept
//! dense. `ceil(L / 2)` splitting steps are needed in total.

use std::io::Write;
use std::ops::Range;

use rayon::prelude::*;

use crate::efie::MatrixEntries;
use crate::error::{Error, Result};
use crate::id::{column_id, row_id, IdConfig, IdResult};
use crate::linalg::{CMatrix, C64, ZERO};

/// Retries double the rank cap this many times before giving up.
const CAP_DOUBLINGS: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ButterflyConfig {
    /// Largest leaf size `n0`.
    pub leaf_size: usize,
    pub id: IdConfig,
}

impl Default for ButterflyConfig {
    fn default() -> Self {
        Self { leaf_size: 200, id: IdConfig::default() }
    }
}

impl ButterflyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.leaf_size == 0 {
            return Err(Error::Config("leaf size must be positive".into()));
        }
        self.id.validate()
    }
}

/// Number of dyadic halvings (ceil split) needed to bring `n` down to at most `leaf_size`.
pub fn dyadic_depth(n: usize, leaf_size: usize) -> usize {
    let mut depth = 0;
    let mut m = n;
    while m > leaf_size {
        m = m.div_ceil(2);
        depth += 1;
    }
    depth
}

/// `2^depth` consecutive leaves of `range`, each split at `lo + ceil(n / 2)`.
pub fn dyadic_leaves(range: Range<usize>, depth: usize) -> Vec<Vec<usize>> {
    if depth == 0 {
        return vec![range.collect()];
    }
    let mid = range.start + (range.end - range.start).div_ceil(2);
    let mut leaves = dyadic_leaves(range.start..mid, depth - 1);
    leaves.extend(dyadic_leaves(mid..range.end, depth - 1));
    leaves
}

/// Index bookkeeping of a complementary low-rank block: equally many
/// (a power of two) row and column leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct ClrBlock {
    pub row_leaves: Vec<Vec<usize>>,
    pub col_leaves: Vec<Vec<usize>>,
}

impl ClrBlock {
    /// Block over contiguous ranges, with the depth chosen so that all leaves
    /// of both trees have at most `leaf_size` indices.
    pub fn new(rows: Range<usize>, cols: Range<usize>, leaf_size: usize) -> Self {
        let depth = dyadic_depth(rows.len(), leaf_size).max(dyadic_depth(cols.len(), leaf_size));
        Self { row_leaves: dyadic_leaves(rows, depth), col_leaves: dyadic_leaves(cols, depth) }
    }

    pub fn from_leaves(row_leaves: Vec<Vec<usize>>, col_leaves: Vec<Vec<usize>>) -> Result<Self> {
        if row_leaves.len() != col_leaves.len() || !row_leaves.len().is_power_of_two() {
            return Err(Error::Config(format!(
                "leaf counts must be equal powers of two, got {} and {}",
                row_leaves.len(),
                col_leaves.len()
            )));
        }
        Ok(Self { row_leaves, col_leaves })
    }

    pub fn leaf_count(&self) -> usize {
        self.row_leaves.len()
    }

    /// `L`, the depth of the row and column trees.
    pub fn depth(&self) -> usize {
        self.leaf_count().trailing_zeros() as usize
    }

    /// Number of tree levels, `L + 1`.
    pub fn tree_levels(&self) -> usize {
        self.depth() + 1
    }

    pub fn rows(&self) -> Vec<usize> {
        self.row_leaves.concat()
    }

    pub fn cols(&self) -> Vec<usize> {
        self.col_leaves.concat()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_leaves.iter().map(Vec::len).sum(), self.col_leaves.iter().map(Vec::len).sum())
    }

    /// The four quadrants `(0,0), (0,1), (1,0), (1,1)`, each with half the leaves.
    pub fn quadrants(&self) -> [ClrBlock; 4] {
        assert!(self.leaf_count() >= 2, "a single-leaf block has no quadrants");
        let h = self.leaf_count() / 2;
        let part = |i: usize, j: usize| ClrBlock {
            row_leaves: self.row_leaves[i * h..(i + 1) * h].to_vec(),
            col_leaves: self.col_leaves[j * h..(j + 1) * h].to_vec(),
        };
        [part(0, 0), part(0, 1), part(1, 0), part(1, 1)]
    }
}

fn span(idx: &[Vec<usize>]) -> (usize, usize) {
    let lo = idx.iter().flatten().copied().min().unwrap_or(0);
    let hi = idx.iter().flatten().copied().max().map_or(0, |m| m + 1);
    (lo, hi)
}

/// Low-rank complementary skeletonization of one quadrant.
#[derive(Clone, Debug)]
pub struct Lrcs {
    /// Row ID of each row leaf against all columns of the quadrant.
    pub row_ids: Vec<IdResult>,
    /// Column ID of each column leaf against the concatenated row skeletons.
    pub col_ids: Vec<IdResult>,
    /// Skeleton block for the next level: leaves merged in pairs, or a single
    /// leaf when the quadrant had one.
    pub inner: ClrBlock,
}

#[derive(Clone, Copy)]
enum Side {
    Row,
    Col,
}

fn id_with_retry<E: MatrixEntries + ?Sized>(
    entries: &E,
    rows: &[usize],
    cols: &[usize],
    cfg: &IdConfig,
    side: Side,
    level: usize,
) -> Result<IdResult> {
    let mut cap = cfg.rank_cap;
    for attempt in 0..=CAP_DOUBLINGS {
        let c = cfg.with_rank_cap(cap);
        let id = match side {
            Side::Row => row_id(entries, rows, cols, &c),
            Side::Col => column_id(entries, rows, cols, &c),
        };
        if !id.hit_cap {
            return Ok(id);
        }
        if attempt < CAP_DOUBLINGS {
            cap *= 2;
        }
    }
    Err(Error::RankCapExceeded {
        cap,
        level,
        rows: span(&[rows.to_vec()]),
        cols: span(&[cols.to_vec()]),
    })
}

fn merge_pairs(leaves: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    if leaves.len() == 1 {
        return leaves;
    }
    leaves.chunks(2).map(|p| p.concat()).collect()
}

/// Skeletonizes every leaf of `block` (normally a quadrant).
pub fn lrcs<E: MatrixEntries + ?Sized>(entries: &E, block: &ClrBlock, cfg: &IdConfig, level: usize) -> Result<Lrcs> {
    let cols = block.cols();
    let row_ids: Vec<IdResult> = block
        .row_leaves
        .par_iter()
        .map(|r| id_with_retry(entries, r, &cols, cfg, Side::Row, level))
        .collect::<Result<_>>()?;
    let row_skel: Vec<Vec<usize>> = row_ids.iter().map(|id| id.skeleton.clone()).collect();
    let r_hat = row_skel.concat();
    let col_ids: Vec<IdResult> = block
        .col_leaves
        .par_iter()
        .map(|c| id_with_retry(entries, &r_hat, c, cfg, Side::Col, level))
        .collect::<Result<_>>()?;
    let col_skel: Vec<Vec<usize>> = col_ids.iter().map(|id| id.skeleton.clone()).collect();
    let inner = ClrBlock { row_leaves: merge_pairs(row_skel), col_leaves: merge_pairs(col_skel) };
    Ok(Lrcs { row_ids, col_ids, inner })
}

/// One MSCS step: quadrants of `block`, each skeletonized.
pub fn mscs_split<E: MatrixEntries + ?Sized>(
    entries: &E,
    block: &ClrBlock,
    cfg: &IdConfig,
    level: usize,
) -> Result<[Lrcs; 4]> {
    let quads = block.quadrants();
    let parts: Vec<Lrcs> = quads.par_iter().map(|q| lrcs(entries, q, cfg, level)).collect::<Result<_>>()?;
    Ok(parts.try_into().expect("four quadrants"))
}

#[derive(Clone, Debug)]
enum Node {
    Dense(CMatrix),
    Split(Box<[Part; 4]>),
}

#[derive(Clone, Debug)]
struct Part {
    row_ids: Vec<IdResult>,
    col_ids: Vec<IdResult>,
    inner: Node,
}

/// One retained rank: MSCS level (1 at the top), block index within the level, rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankRecord {
    pub level: usize,
    pub block: usize,
    pub rank: usize,
}

/// IDBF of a block `A(rows, cols)`.
#[derive(Clone, Debug)]
pub struct ButterflyFactors {
    rows: Range<usize>,
    cols: Range<usize>,
    depth: usize,
    root: Node,
}

/// Compresses `A(rows, cols)`.
pub fn idbf_compress<E: MatrixEntries + ?Sized>(
    entries: &E,
    rows: Range<usize>,
    cols: Range<usize>,
    cfg: &ButterflyConfig,
) -> Result<ButterflyFactors> {
    cfg.validate()?;
    let (nr, nc) = entries.shape();
    if rows.end > nr || cols.end > nc {
        return Err(Error::IndexOutOfRange { row: rows.end, col: cols.end, n: nr.max(nc) });
    }
    let block = ClrBlock::new(rows.clone(), cols.clone(), cfg.leaf_size);
    let depth = block.depth();
    let root = build(entries, block, &cfg.id, 1)?;
    Ok(ButterflyFactors { rows, cols, depth, root })
}

fn build<E: MatrixEntries + ?Sized>(entries: &E, block: ClrBlock, cfg: &IdConfig, level: usize) -> Result<Node> {
    if block.leaf_count() == 1 {
        let (r, c) = (&block.row_leaves[0], &block.col_leaves[0]);
        return Ok(Node::Dense(CMatrix::from_fn(r.len(), c.len(), |i, j| entries.entry(r[i], c[j]))));
    }
    let parts = mscs_split(entries, &block, cfg, level)?;
    let built: Vec<Part> = parts
        .into_par_iter()
        .map(|p| {
            let inner = build(entries, p.inner, cfg, level + 1)?;
            Ok(Part { row_ids: p.row_ids, col_ids: p.col_ids, inner })
        })
        .collect::<Result<_>>()?;
    Ok(Node::Split(Box::new(built.try_into().expect("four parts"))))
}

impl Node {
    fn apply_acc(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Node::Dense(m) => m.gemv_acc(x, y),
            Node::Split(parts) => {
                let r0: usize = parts[0].row_ids.iter().map(IdResult::len).sum();
                let c0: usize = parts[0].col_ids.iter().map(IdResult::len).sum();
                for (q, part) in parts.iter().enumerate() {
                    let xs = if q % 2 == 0 { &x[..c0] } else { &x[c0..] };
                    let ys = if q < 2 { &mut y[..r0] } else { &mut y[r0..] };
                    part.apply_acc(xs, ys);
                }
            }
        }
    }

    fn visit<'a>(&'a self, level: usize, f: &mut dyn FnMut(usize, NodeRef<'a>)) {
        match self {
            Node::Dense(m) => f(level, NodeRef::Dense(m)),
            Node::Split(parts) => {
                for p in parts.iter() {
                    for id in p.row_ids.iter().chain(&p.col_ids) {
                        f(level, NodeRef::Id(id));
                    }
                    p.inner.visit(level + 1, f);
                }
            }
        }
    }

    fn first_dense_mut(&mut self) -> Option<&mut CMatrix> {
        match self {
            Node::Dense(m) if m.rows() > 0 && m.cols() > 0 => Some(m),
            Node::Dense(_) => None,
            Node::Split(parts) => parts.iter_mut().find_map(|p| p.inner.first_dense_mut()),
        }
    }
}

enum NodeRef<'a> {
    Dense(&'a CMatrix),
    Id(&'a IdResult),
}

impl Part {
    fn apply_acc(&self, x: &[C64], y: &mut [C64]) {
        let kc: usize = self.col_ids.iter().map(IdResult::rank).sum();
        let kr: usize = self.row_ids.iter().map(IdResult::rank).sum();
        let mut z = vec![ZERO; kc];
        let (mut xo, mut zo) = (0, 0);
        for id in &self.col_ids {
            id.apply_column(&x[xo..xo + id.len()], &mut z[zo..zo + id.rank()]);
            xo += id.len();
            zo += id.rank();
        }
        let mut w = vec![ZERO; kr];
        self.inner.apply_acc(&z, &mut w);
        let (mut yo, mut wo) = (0, 0);
        for id in &self.row_ids {
            id.apply_row_acc(&w[wo..wo + id.rank()], &mut y[yo..yo + id.len()]);
            yo += id.len();
            wo += id.rank();
        }
    }
}

impl ButterflyFactors {
    pub fn row_range(&self) -> Range<usize> {
        self.rows.clone()
    }

    pub fn col_range(&self) -> Range<usize> {
        self.cols.clone()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Depth `L` of the row and column trees.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of MSCS steps, which is also the number of `U` (and `V`)
    /// factor levels: `ceil(L / 2)`.
    pub fn middle_level(&self) -> usize {
        self.depth.div_ceil(2)
    }

    /// `y += B x`.
    pub fn apply_acc(&self, x: &[C64], y: &mut [C64]) -> Result<()> {
        let (r, c) = self.shape();
        if x.len() != c {
            return Err(Error::DimensionMismatch { expected: c, got: x.len() });
        }
        if y.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: y.len() });
        }
        self.root.apply_acc(x, y);
        Ok(())
    }

    /// `B x`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        let mut y = vec![ZERO; self.rows.len()];
        self.apply_acc(x, &mut y)?;
        Ok(y)
    }

    /// Dense matrix of the factorization, one column per unit vector.
    pub fn to_dense(&self) -> CMatrix {
        let (r, c) = self.shape();
        let mut out = CMatrix::zeros(r, c);
        let mut e = vec![ZERO; c];
        for j in 0..c {
            e[j] = C64::new(1.0, 0.0);
            self.root.apply_acc(&e, out.col_mut(j));
            e[j] = ZERO;
        }
        out
    }

    /// Stored nonzeros: identity plus interpolation coefficients of every ID,
    /// plus the dense middle blocks.
    pub fn nonzeros(&self) -> usize {
        let mut total = 0;
        self.root.visit(1, &mut |_, n| {
            total += match n {
                NodeRef::Dense(m) => m.rows() * m.cols(),
                NodeRef::Id(id) => id.nonzeros(),
            }
        });
        total
    }

    /// Complex multiply-adds of one application.
    pub fn apply_flops(&self) -> usize {
        let mut total = 0;
        self.root.visit(1, &mut |_, n| {
            total += match n {
                NodeRef::Dense(m) => m.rows() * m.cols(),
                NodeRef::Id(id) => id.nonzeros() - id.rank(),
            }
        });
        total
    }

    pub fn max_rank(&self) -> usize {
        self.rank_records().iter().map(|r| r.rank).max().unwrap_or(0)
    }

    /// Rank of every ID, numbered per level in construction order.
    pub fn rank_records(&self) -> Vec<RankRecord> {
        let mut counters: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        self.root.visit(1, &mut |level, n| {
            if let NodeRef::Id(id) = n {
                if counters.len() < level {
                    counters.resize(level, 0);
                }
                let block = counters[level - 1];
                counters[level - 1] += 1;
                out.push(RankRecord { level, block, rank: id.rank() });
            }
        });
        out
    }

    /// Adds `delta` to one entry of a dense middle block. Only meant for
    /// exercising the verification path on a deliberately broken factorization.
    #[doc(hidden)]
    pub fn perturb(&mut self, delta: C64) -> bool {
        match self.root.first_dense_mut() {
            Some(m) => {
                m[(0, 0)] += delta;
                true
            }
            None => false,
        }
    }
}

/// Writes `level,block,rank` rows.
pub fn write_rank_csv<W: Write>(records: &[RankRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "block", "rank"])?;
    for r in records {
        w.write_record([r.level.to_string(), r.block.to_string(), r.rank.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efie::FnEntries;

    #[test]
    fn depth_and_leaves() {
        assert_eq!(dyadic_depth(200, 200), 0);
        assert_eq!(dyadic_depth(201, 200), 1);
        assert_eq!(dyadic_depth(1024, 64), 4);
        let leaves = dyadic_leaves(0..7, 2);
        assert_eq!(leaves, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6]]);
    }

    #[test]
    fn quadrants_partition_the_block() {
        let b = ClrBlock::new(0..64, 64..128, 4);
        assert_eq!(b.leaf_count(), 16);
        assert_eq!(b.tree_levels(), 5);
        let q = b.quadrants();
        let mut rows: Vec<usize> = q[0].rows();
        rows.extend(q[2].rows());
        assert_eq!(rows, b.rows());
        let mut cols: Vec<usize> = q[0].cols();
        cols.extend(q[1].cols());
        assert_eq!(cols, b.cols());
        assert!(q.iter().all(|c| c.leaf_count() == 8));
    }

    #[test]
    fn mscs_children_lose_two_levels() {
        let n = 128;
        let a = FnEntries::new(n, n, |i, j| {
            C64::from_polar(1.0, -std::f64::consts::PI * (i * j) as f64 / n as f64)
        });
        let b = ClrBlock::new(0..n, 0..n, 8);
        assert_eq!(b.tree_levels(), 5);
        let parts = mscs_split(&a, &b, &IdConfig::default(), 1).unwrap();
        for p in &parts {
            assert_eq!(p.inner.tree_levels(), 3);
        }
    }

    #[test]
    fn small_block_stays_dense() {
        let a = FnEntries::new(10, 10, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let f = idbf_compress(&a, 0..10, 0..10, &ButterflyConfig::default()).unwrap();
        assert_eq!(f.depth(), 0);
        assert_eq!(f.nonzeros(), 100);
        let d = f.to_dense();
        assert_eq!(d[(3, 4)], a.entry(3, 4));
    }
}
