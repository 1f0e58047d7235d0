//! Open-surface scatterers as parametrized planar curves, discretized into
//! ordered pulse-basis segments of equal arclength.
//!
//! All geometry is expressed in free-space wavelengths (`lambda0 = 1`). The
//! `electrical_size` of a [`CurveSpec`] is the total arclength over all
//! contours; each contour receives `round(points_per_wavelength * length)`
//! segments and its unknowns follow the curve parametrization. Multi-contour
//! shapes are concatenated in generation order (left to right, bottom to top).
//!
//! Shape parameters (all optional, defaults in parentheses):
//!
//! | shape | parameters |
//! |---|---|
//! | `semicircle` | none |
//! | `open_arc` | `angle` in (0, 2pi] (pi). At 2pi one segment slot is left empty so the arc stays open. |
//! | `spiral` | `rotation` in (0, 20pi] (2pi): Archimedean `r = b theta`, `theta` in [0, rotation] |
//! | `corrugated_corner` | `amplitude` >= 0 (0.25), `period` > 0 (2.0), `arm_ratio` in (0, 1) (0.5): two arms at 90 degrees, the first holding `arm_ratio` of the arclength |
//! | `parallel_strips` | `separation` > 0 (the strip length): gap between the two strips |
//! | `cup_cavity` | `lip_ratio` in [0, 0.9] (0.25): lip length over bowl radius |
//! | `arc_array` | `count` >= 1 (4), `angle` in (0, pi] (pi/2), `pitch_ratio` > 1 (1.5): pitch over arc diameter |
//! | `square_outline` | none: three sides of a square |

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Semicircle,
    CorrugatedCorner,
    Spiral,
    ParallelStrips,
    CupCavity,
    ArcArray,
    OpenArc,
    SquareOutline,
}

impl Shape {
    pub const ALL: [Shape; 8] = [
        Shape::Semicircle,
        Shape::CorrugatedCorner,
        Shape::Spiral,
        Shape::ParallelStrips,
        Shape::CupCavity,
        Shape::ArcArray,
        Shape::OpenArc,
        Shape::SquareOutline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Semicircle => "semicircle",
            Shape::CorrugatedCorner => "corrugated_corner",
            Shape::Spiral => "spiral",
            Shape::ParallelStrips => "parallel_strips",
            Shape::CupCavity => "cup_cavity",
            Shape::ArcArray => "arc_array",
            Shape::OpenArc => "open_arc",
            Shape::SquareOutline => "square_outline",
        }
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            Shape::Semicircle | Shape::SquareOutline => &[],
            Shape::OpenArc => &["angle"],
            Shape::Spiral => &["rotation"],
            Shape::CorrugatedCorner => &["amplitude", "period", "arm_ratio"],
            Shape::ParallelStrips => &["separation"],
            Shape::CupCavity => &["lip_ratio"],
            Shape::ArcArray => &["count", "angle", "pitch_ratio"],
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let shape = match key.as_str() {
            "semicircle" => Shape::Semicircle,
            "corrugated_corner" | "corner" => Shape::CorrugatedCorner,
            "spiral" => Shape::Spiral,
            "parallel_strips" | "strips" => Shape::ParallelStrips,
            "cup_cavity" | "cup" => Shape::CupCavity,
            "arc_array" | "array" => Shape::ArcArray,
            "open_arc" | "arc" => Shape::OpenArc,
            "square_outline" | "square" => Shape::SquareOutline,
            _ => return Err(Error::Geometry(format!("unsupported shape '{s}'"))),
        };
        Ok(shape)
    }
}

/// Description of a scatterer: shape, named parameters and total arclength in wavelengths.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub shape: Shape,
    pub params: BTreeMap<String, f64>,
    pub electrical_size: f64,
}

impl CurveSpec {
    pub fn new(shape: Shape, electrical_size: f64) -> Self {
        Self { shape, params: BTreeMap::new(), electrical_size }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Spec sized so that discretizing at `points_per_wavelength` yields `n` unknowns.
    pub fn for_unknowns(shape: Shape, n: usize, points_per_wavelength: f64) -> Self {
        Self::new(shape, n as f64 / points_per_wavelength)
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.electrical_size.is_finite() && self.electrical_size > 0.0) {
            return Err(Error::Geometry(format!(
                "electrical size must be positive, got {}",
                self.electrical_size
            )));
        }
        let allowed = self.shape.param_names();
        for (k, v) in &self.params {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Geometry(format!("unknown parameter '{k}' for shape {}", self.shape)));
            }
            if !v.is_finite() {
                return Err(Error::Geometry(format!("parameter '{k}' is not finite")));
            }
        }
        let bad = |what: &str| Err(Error::Geometry(format!("{}: {what}", self.shape)));
        match self.shape {
            Shape::OpenArc => {
                let a = self.param("angle", PI);
                if !(a > 0.0 && a <= 2.0 * PI + 1e-12) {
                    return bad("angle must lie in (0, 2pi]");
                }
            }
            Shape::Spiral => {
                let r = self.param("rotation", 2.0 * PI);
                if !(r > 0.0 && r <= 20.0 * PI) {
                    return bad("rotation must lie in (0, 20pi]");
                }
            }
            Shape::CorrugatedCorner => {
                if self.param("amplitude", 0.25) < 0.0 || self.param("period", 2.0) <= 0.0 {
                    return bad("amplitude must be >= 0 and period > 0");
                }
                let r = self.param("arm_ratio", 0.5);
                if !(r > 0.0 && r < 1.0) {
                    return bad("arm_ratio must lie in (0, 1)");
                }
            }
            Shape::ParallelStrips => {
                if self.param("separation", 1.0) <= 0.0 {
                    return bad("separation must be positive");
                }
            }
            Shape::CupCavity => {
                let l = self.param("lip_ratio", 0.25);
                if !(0.0..=0.9).contains(&l) {
                    return bad("lip_ratio must lie in [0, 0.9]");
                }
            }
            Shape::ArcArray => {
                let c = self.param("count", 4.0);
                let a = self.param("angle", PI / 2.0);
                if c < 1.0 || c.fract() != 0.0 {
                    return bad("count must be a positive integer");
                }
                if !(a > 0.0 && a <= PI) {
                    return bad("angle must lie in (0, pi]");
                }
                if self.param("pitch_ratio", 1.5) <= 1.0 {
                    return bad("pitch_ratio must exceed 1");
                }
            }
            Shape::Semicircle | Shape::SquareOutline => {}
        }
        Ok(())
    }
}

/// Discretized scatterer: ordered segment centers and lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub centers: Vec<Point>,
    pub lengths: Vec<f64>,
    /// Index of the first segment of every contour after the first.
    pub contour_breaks: Vec<usize>,
    pub wavelength: f64,
    /// Segment end points; empty for meshes read back from CSV.
    pub endpoints: Vec<[Point; 2]>,
}

impl Mesh {
    pub fn new(centers: Vec<Point>, lengths: Vec<f64>, contour_breaks: Vec<usize>, wavelength: f64) -> Result<Self> {
        if centers.len() != lengths.len() {
            return Err(Error::DimensionMismatch { expected: centers.len(), got: lengths.len() });
        }
        if centers.is_empty() {
            return Err(Error::Geometry("mesh has no segments".into()));
        }
        if let Some(i) = lengths.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Geometry(format!("segment {i} has non-positive length")));
        }
        if !(wavelength > 0.0) {
            return Err(Error::Geometry("wavelength must be positive".into()));
        }
        if contour_breaks.windows(2).any(|w| w[0] >= w[1])
            || contour_breaks.iter().any(|&b| b == 0 || b >= centers.len())
        {
            return Err(Error::Geometry("contour breaks must be increasing interior indices".into()));
        }
        Ok(Self { centers, lengths, contour_breaks, wavelength, endpoints: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Contour index of every segment.
    pub fn contour_ids(&self) -> Vec<usize> {
        let mut ids = Vec::with_capacity(self.len());
        let mut c = 0;
        for i in 0..self.len() {
            while c < self.contour_breaks.len() && self.contour_breaks[c] <= i {
                c += 1;
            }
            ids.push(c);
        }
        ids
    }

    /// Writes `# lambda0=<value>` followed by `x,y,w,contour_id` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# lambda0={}", self.wavelength)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "w", "contour_id"])?;
        for ((c, len), id) in self.centers.iter().zip(&self.lengths).zip(self.contour_ids()) {
            w.write_record(&[c[0].to_string(), c[1].to_string(), len.to_string(), id.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let wavelength = first
            .trim()
            .trim_start_matches('#')
            .trim()
            .strip_prefix("lambda0=")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Io(format!("expected '# lambda0=<value>' header, got '{}'", first.trim())))?;
        let mut rdr = csv::Reader::from_reader(reader);
        let mut centers = Vec::new();
        let mut lengths = Vec::new();
        let mut breaks = Vec::new();
        let mut last_id = None;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Io(format!("row {i}: bad field {k}")))
            };
            centers.push([field(0)?, field(1)?]);
            lengths.push(field(2)?);
            let id = field(3)? as usize;
            if let Some(prev) = last_id {
                if id != prev {
                    breaks.push(i);
                }
            }
            last_id = Some(id);
        }
        Mesh::new(centers, lengths, breaks, wavelength)
    }
}

/// Largest distance between two segment centers.
///
/// Exact `O(N^2)` scan for `N <= 10_000`; above that the bounding-box diagonal
/// is returned, which bounds the true diameter from above by at most a factor `sqrt(2)`.
pub fn mesh_diameter(mesh: &Mesh) -> f64 {
    let pts = &mesh.centers;
    if pts.len() <= 10_000 {
        let mut best = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max(dist2(p, q));
            }
        }
        best.sqrt()
    } else {
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }
}

fn dist2(p: &Point, q: &Point) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

/// Discretizes `spec` into segments of equal arclength, `points_per_wavelength` per unit length.
pub fn generate_mesh(spec: &CurveSpec, points_per_wavelength: f64) -> Result<Mesh> {
    if !(points_per_wavelength >= 4.0) {
        return Err(Error::Geometry(format!(
            "points per wavelength must be at least 4, got {points_per_wavelength}"
        )));
    }
    spec.validate()?;
    let contours = build_contours(spec, points_per_wavelength)?;

    let mut centers = Vec::new();
    let mut lengths = Vec::new();
    let mut endpoints = Vec::new();
    let mut breaks = Vec::new();
    for (ci, contour) in contours.iter().enumerate() {
        if ci > 0 {
            breaks.push(centers.len());
        }
        let total = contour.length();
        let n = segments_for(total, points_per_wavelength);
        let w = total / n as f64;
        let mut start = contour.point_at(0.0);
        for i in 0..n {
            let s1 = if i + 1 == n { total } else { (i + 1) as f64 * w };
            let end = contour.point_at(s1);
            centers.push(contour.point_at((i as f64 + 0.5) * w));
            lengths.push(w);
            endpoints.push([start, end]);
            start = end;
        }
    }
    let mut mesh = Mesh::new(centers, lengths, breaks, 1.0)?;
    mesh.endpoints = endpoints;
    Ok(mesh)
}

fn segments_for(length: f64, ppw: f64) -> usize {
    ((length * ppw).round() as usize).max(1)
}

/// A contour is a chain of pieces traversed in order.
struct Contour {
    pieces: Vec<Piece>,
}

impl Contour {
    fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    fn point_at(&self, mut s: f64) -> Point {
        let last = self.pieces.len() - 1;
        for (k, p) in self.pieces.iter().enumerate() {
            let len = p.length();
            if s <= len || k == last {
                return p.point_at(s.min(len).max(0.0));
            }
            s -= len;
        }
        unreachable!("contour has at least one piece")
    }
}

enum Piece {
    Line { start: Point, end: Point },
    /// Circular arc swept from `theta0` with signed angular extent `sweep`.
    Arc { center: Point, radius: f64, theta0: f64, sweep: f64 },
    Param(ParamPiece),
}

impl Piece {
    fn length(&self) -> f64 {
        match self {
            Piece::Line { start, end } => dist2(start, end).sqrt(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
            Piece::Param(p) => p.length(),
        }
    }

    fn point_at(&self, s: f64) -> Point {
        match self {
            Piece::Line { start, end } => {
                let len = dist2(start, end).sqrt();
                let t = if len > 0.0 { s / len } else { 0.0 };
                [start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1])]
            }
            Piece::Arc { center, radius, theta0, sweep } => {
                let th = theta0 + sweep.signum() * s / radius;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
            Piece::Param(p) => p.point_at(s),
        }
    }
}

type PosFn = Box<dyn Fn(f64) -> Point + Send + Sync>;
type SpeedFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth curve `pos(t)`, `t` in `[t0, t1]`, with an arclength table for inversion.
struct ParamPiece {
    pos: PosFn,
    speed: SpeedFn,
    grid: Vec<f64>,
    cum: Vec<f64>,
}

// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

impl ParamPiece {
    fn new(pos: PosFn, speed: SpeedFn, t0: f64, t1: f64, intervals: usize) -> Self {
        let grid: Vec<f64> = (0..=intervals).map(|i| t0 + (t1 - t0) * i as f64 / intervals as f64).collect();
        let mut cum = vec![0.0; grid.len()];
        for i in 0..intervals {
            cum[i + 1] = cum[i] + gauss_legendre(&*speed, grid[i], grid[i + 1]);
        }
        Self { pos, speed, grid, cum }
    }

    fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn point_at(&self, s: f64) -> Point {
        let k = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => return (self.pos)(self.grid[k]),
            Err(k) => k.clamp(1, self.cum.len() - 1) - 1,
        };
        let (ta, tb) = (self.grid[k], self.grid[k + 1]);
        let frac = (s - self.cum[k]) / (self.cum[k + 1] - self.cum[k]);
        let mut t = ta + frac * (tb - ta);
        for _ in 0..40 {
            let f = self.cum[k] + gauss_legendre(&*self.speed, ta, t) - s;
            let step = f / (self.speed)(t);
            t = (t - step).clamp(ta, tb);
            if step.abs() <= 1e-15 * (tb - ta).abs().max(1e-300) {
                break;
            }
        }
        (self.pos)(t)
    }
}

fn build_contours(spec: &CurveSpec, ppw: f64) -> Result<Vec<Contour>> {
    let s = spec.electrical_size;
    let single = |p: Piece| vec![Contour { pieces: vec![p] }];
    let contours = match spec.shape {
        Shape::Semicircle => {
            let r = s / PI;
            single(Piece::Arc { center: [0.0, 0.0], radius: r, theta0: PI, sweep: -PI })
        }
        Shape::OpenArc => {
            let angle = spec.param("angle", PI);
            let covered = if angle >= 2.0 * PI - 1e-12 {
                let n = segments_for(s, ppw) as f64;
                2.0 * PI * n / (n + 1.0)
            } else {
                angle
            };
            let r = s / covered;
            single(Piece::Arc { center: [0.0, 0.0], radius: r, theta0: PI / 2.0 + covered / 2.0, sweep: -covered })
        }
        Shape::Spiral => {
            let rot = spec.param("rotation", 2.0 * PI);
            let unit = 0.5 * (rot * (1.0 + rot * rot).sqrt() + rot.asinh());
            let b = s / unit;
            let pos: PosFn = Box::new(move |t: f64| [b * t * t.cos(), b * t * t.sin()]);
            let speed: SpeedFn = Box::new(move |t: f64| b * (1.0 + t * t).sqrt());
            let intervals = (64.0 * rot).ceil().max(256.0) as usize;
            single(Piece::Param(ParamPiece::new(pos, speed, 0.0, rot, intervals)))
        }
        Shape::CorrugatedCorner => corrugated_corner(s, spec.param("amplitude", 0.25), spec.param("period", 2.0), spec.param("arm_ratio", 0.5))?,
        Shape::ParallelStrips => {
            let half = s / 2.0;
            let sep = spec.param("separation", half);
            vec![
                Contour { pieces: vec![Piece::Line { start: [0.0, 0.0], end: [half, 0.0] }] },
                Contour { pieces: vec![Piece::Line { start: [0.0, sep], end: [half, sep] }] },
            ]
        }
        Shape::CupCavity => {
            let ratio = spec.param("lip_ratio", 0.25);
            let r = s / (PI + 2.0 * ratio);
            let lip = ratio * r;
            let mut pieces = Vec::new();
            if lip > 0.0 {
                pieces.push(Piece::Line { start: [-r + lip, 0.0], end: [-r, 0.0] });
            }
            pieces.push(Piece::Arc { center: [0.0, 0.0], radius: r, theta0: PI, sweep: PI });
            if lip > 0.0 {
                pieces.push(Piece::Line { start: [r, 0.0], end: [r - lip, 0.0] });
            }
            vec![Contour { pieces }]
        }
        Shape::ArcArray => {
            let count = spec.param("count", 4.0) as usize;
            let angle = spec.param("angle", PI / 2.0);
            let pitch_ratio = spec.param("pitch_ratio", 1.5);
            let each = s / count as f64;
            let r = each / angle;
            let pitch = pitch_ratio * 2.0 * r;
            (0..count)
                .map(|j| Contour {
                    pieces: vec![Piece::Arc {
                        center: [j as f64 * pitch, 0.0],
                        radius: r,
                        theta0: PI / 2.0 + angle / 2.0,
                        sweep: -angle,
                    }],
                })
                .collect()
        }
        Shape::SquareOutline => {
            let a = s / 3.0;
            vec![Contour {
                pieces: vec![
                    Piece::Line { start: [0.0, 0.0], end: [0.0, a] },
                    Piece::Line { start: [0.0, a], end: [a, a] },
                    Piece::Line { start: [a, a], end: [a, 0.0] },
                ],
            }]
        }
    };
    for c in &contours {
        if !(c.length() > 0.0) {
            return Err(Error::Geometry(format!("{}: degenerate contour", spec.shape)));
        }
    }
    Ok(contours)
}

/// Two sinusoidally corrugated arms meeting at a right angle at the origin.
/// The offset `amplitude (1 - cos k u)` has zero value and slope at the vertex,
/// so the corner angle is exactly 90 degrees.
fn corrugated_corner(total: f64, amplitude: f64, period: f64, arm_ratio: f64) -> Result<Vec<Contour>> {
    let k = 2.0 * PI / period;
    let speed_of = move |t: f64| (1.0 + (amplitude * k * (k * t).sin()).powi(2)).sqrt();
    let arclength = |ell: f64| -> f64 {
        let pieces = (ell / period * 16.0).ceil().max(16.0) as usize;
        let h = ell / pieces as f64;
        (0..pieces).map(|i| gauss_legendre(&speed_of, i as f64 * h, (i + 1) as f64 * h)).sum()
    };
    // straight-line extent of an arm with the given arclength
    let extent = |target: f64| -> Result<f64> {
        let mut ell = target;
        for _ in 0..60 {
            let step = (arclength(ell) - target) / speed_of(ell);
            ell -= step;
            if step.abs() < 1e-14 * target {
                break;
            }
        }
        if ell > 0.0 {
            Ok(ell)
        } else {
            Err(Error::Geometry("corrugated corner: degenerate arm".into()))
        }
    };
    let first = extent(total * arm_ratio)?;
    let second = extent(total * (1.0 - arm_ratio))?;

    let arm = |ell: f64, dir: Point, normal: Point, reversed: bool| -> Piece {
        let intervals = ((ell / period) * 32.0).ceil().max(256.0) as usize;
        let pos: PosFn = Box::new(move |t: f64| {
            let u = if reversed { ell - t } else { t };
            let d = amplitude * (1.0 - (k * u).cos());
            [dir[0] * u + normal[0] * d, dir[1] * u + normal[1] * d]
        });
        let speed: SpeedFn = Box::new(move |t: f64| {
            let u = if reversed { ell - t } else { t };
            (1.0 + (amplitude * k * (k * u).sin()).powi(2)).sqrt()
        });
        Piece::Param(ParamPiece::new(pos, speed, 0.0, ell, intervals))
    };
    let left = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let right = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    Ok(vec![Contour {
        pieces: vec![
            arm(first, left, [FRAC_1_SQRT_2, FRAC_1_SQRT_2], true),
            arm(second, right, [-FRAC_1_SQRT_2, FRAC_1_SQRT_2], false),
        ],
    }])
}
