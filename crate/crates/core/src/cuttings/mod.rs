//! Vertical decompositions with conflict lists, and 1/r-cuttings built from
//! them by sampling and refining heavy cells.

mod vd;

pub use vd::{decompose, Curve, RawCell, Trap};

use crate::domain::PolygonalDomain;
use crate::geom::{pieces_contain, BBox, Bisector, ConicArc, Point, TarskiCell, XArc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CuttingError {
    #[error("no 1/r-cutting found within {0} attempts")]
    RetryBudgetExceeded(usize),
    #[error("point ({0}, {1}) is outside the bounding box")]
    OutsideBoundingBox(f64, f64),
}

pub const RETRY_BUDGET: usize = 64;

/// The box all cuttings are clipped to, and the classification tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub bbox: BBox,
    pub tol: f64,
}

impl Frame {
    /// The domain's bounding box inflated by 10%.
    pub fn for_domain(d: &PolygonalDomain) -> Self {
        let b = d.bbox();
        Frame {
            bbox: b.inflate(0.1 * b.width().max(b.height())),
            tol: d.tolerance().geom(),
        }
    }

    pub fn new(bbox: BBox, tol: f64) -> Self {
        Frame { bbox, tol }
    }
}

/// An input region prepared for conflict tests.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub pieces: Vec<XArc>,
    pub bbox: BBox,
}

impl Prepared {
    pub fn new(c: &TarskiCell) -> Self {
        // Segments vertical up to rounding are made exactly vertical, so the
        // decomposition walls them off instead of seeing a sliver.
        let pieces: Vec<XArc> = c
            .arcs
            .iter()
            .flat_map(|a| a.x_monotone_pieces())
            .map(|p| match p {
                XArc::Seg { left, right }
                    if left.x != right.x && (right.x - left.x) <= 1e-12 * (1.0 + left.x.abs()) =>
                {
                    let x = 0.5 * (left.x + right.x);
                    XArc::seg(Point::new(x, left.y), Point::new(x, right.y))
                }
                p => p,
            })
            .collect();
        let bbox = pieces.iter().fold(BBox::empty(), |b, p| b.union(&p.bbox()));
        Prepared { pieces, bbox }
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.bbox.contains(p, tol) && pieces_contain(&self.pieces, p, tol)
    }
}

/// How a region relates to a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// The boundary crosses the open cell.
    Conflict,
    Covers,
    Disjoint,
}

pub fn relation(t: &Trap, tb: &BBox, sample: Point, r: &Prepared, tol: f64) -> Relation {
    if !r.bbox.overlaps(tb, tol) {
        return Relation::Disjoint;
    }
    for p in &r.pieces {
        if p.bbox().overlaps(tb, tol) && t.piece_enters(p, tol) {
            return Relation::Conflict;
        }
    }
    if pieces_contain(&r.pieces, sample, 0.0) {
        Relation::Covers
    } else {
        Relation::Disjoint
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoTrapezoid {
    pub id: usize,
    pub trap: Trap,
    pub defining: Vec<usize>,
    /// Inputs whose boundary crosses the open cell, ascending.
    pub conflicts: Vec<usize>,
    /// Inputs that contain the whole cell, ascending.
    pub covering: Vec<usize>,
}

impl PseudoTrapezoid {
    pub fn area(&self) -> f64 {
        self.trap.area()
    }
}

/// Classifies `inputs` (indices into `prep`) against a cell.
fn classify(t: &Trap, inputs: &[usize], prep: &[&Prepared], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let tb = t.bbox();
    let sample = t.sample();
    let (mut conflicts, mut covering) = (Vec::new(), Vec::new());
    for &i in inputs {
        match relation(t, &tb, sample, prep[i], tol) {
            Relation::Conflict => conflicts.push(i),
            Relation::Covers => covering.push(i),
            Relation::Disjoint => {}
        }
    }
    (conflicts, covering)
}

/// A cell with its defining, conflicting and covering inputs.
type RawClassified = (Trap, Vec<usize>, Vec<usize>, Vec<usize>);

fn curves_of(ids: &[usize], prep: &[&Prepared]) -> Vec<Curve> {
    ids.iter()
        .flat_map(|&i| prep[i].pieces.iter().map(move |&arc| Curve { arc, owner: Some(i) }))
        .collect()
}

/// Decomposes `frame` by the pieces of `sample` and classifies `inputs`
/// against every cell. Returns `(trap, defining, conflicts, covering)`.
fn decompose_and_classify(
    frame: &Trap,
    sample: &[usize],
    inputs: &[usize],
    prep: &[&Prepared],
    tol: f64,
) -> Vec<RawClassified> {
    decompose(frame, &curves_of(sample, prep), tol)
        .into_iter()
        .map(|c| {
            let (conf, cov) = classify(&c.trap, inputs, prep, tol);
            (c.trap, c.defining, conf, cov)
        })
        .collect()
}

fn finish(raw: Vec<RawClassified>) -> Vec<PseudoTrapezoid> {
    raw.into_iter()
        .enumerate()
        .map(|(id, (trap, defining, conflicts, covering))| PseudoTrapezoid {
            id,
            trap,
            defining,
            conflicts,
            covering,
        })
        .collect()
}

/// Vertical decomposition of a uniform random `r`-subset of the regions,
/// clipped to the frame, with conflict lists against all regions.
pub fn vertical_decomposition(
    regions: &[&TarskiCell],
    r: usize,
    seed: u64,
    frame: &Frame,
) -> Vec<PseudoTrapezoid> {
    let owned: Vec<Prepared> = regions.iter().map(|c| Prepared::new(c)).collect();
    let prep: Vec<&Prepared> = owned.iter().collect();
    let all: Vec<usize> = (0..prep.len()).collect();
    let sample = random_subset(prep.len(), r, seed);
    finish(decompose_and_classify(&Trap::from_bbox(&frame.bbox), &sample, &all, &prep, frame.tol))
}

fn random_subset(n: usize, r: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm.truncate(r.min(n));
    perm.sort_unstable();
    perm
}

/// A 1/r-cutting of the input regions, with an x-slab point location index.
#[derive(Debug, Clone)]
pub struct Cutting {
    pub cells: Vec<PseudoTrapezoid>,
    pub r: usize,
    pub n_inputs: usize,
    pub frame: Frame,
    /// Fresh samples drawn while refining heavy cells.
    pub attempts: usize,
    index: SlabIndex,
}

/// `⌊N / r⌋`, the conflict bound a cutting must meet.
pub fn conflict_bound(n: usize, r: usize) -> usize {
    n / r.max(1)
}

pub fn build_cutting(
    regions: &[&TarskiCell],
    r: usize,
    seed: u64,
    frame: &Frame,
) -> Result<Cutting, CuttingError> {
    let owned: Vec<Prepared> = regions.iter().map(|c| Prepared::new(c)).collect();
    let prep: Vec<&Prepared> = owned.iter().collect();
    build_cutting_prepared(&prep, r, seed, frame)
}

pub fn build_cutting_prepared(
    prep: &[&Prepared],
    r: usize,
    seed: u64,
    frame: &Frame,
) -> Result<Cutting, CuttingError> {
    let n = prep.len();
    let r = r.max(1);
    let bound = conflict_bound(n, r);
    let all: Vec<usize> = (0..n).collect();
    let sample = random_subset(n, r, seed);
    let top = decompose_and_classify(&Trap::from_bbox(&frame.bbox), &sample, &all, prep, frame.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::new();
    let mut attempts = 0;
    for cell in top {
        refine(cell, n, r, bound, prep, frame.tol, &mut rng, &mut out, &mut attempts, 0)?;
    }
    let cells = finish(out);
    let index = SlabIndex::new(&cells);
    Ok(Cutting {
        cells,
        r,
        n_inputs: n,
        frame: *frame,
        attempts,
        index,
    })
}

/// Splits a heavy cell by the decomposition of a sample of its conflict
/// list of size `⌈|C| r / N⌉`, growing the sample on repeated failure.
#[allow(clippy::too_many_arguments)]
fn refine(
    cell: RawClassified,
    n: usize,
    r: usize,
    bound: usize,
    prep: &[&Prepared],
    tol: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<RawClassified>,
    attempts: &mut usize,
    tries: usize,
) -> Result<(), CuttingError> {
    let (trap, defining, conflicts, covering) = cell;
    if conflicts.len() <= bound {
        out.push((trap, defining, conflicts, covering));
        return Ok(());
    }
    if tries >= RETRY_BUDGET {
        return Err(CuttingError::RetryBudgetExceeded(RETRY_BUDGET));
    }
    *attempts += 1;
    let c = conflicts.len();
    let t = (c * r).div_ceil(n.max(1)).max(1);
    let t = (t * (1 + tries)).min(c);
    let mut sample = conflicts.clone();
    sample.shuffle(rng);
    sample.truncate(t);
    sample.sort_unstable();
    for (sub, def, conf, cov) in decompose_and_classify(&trap, &sample, &conflicts, prep, tol) {
        let mut cov = cov;
        cov.extend_from_slice(&covering);
        cov.sort_unstable();
        let mut def = def;
        def.extend_from_slice(&defining);
        def.sort_unstable();
        def.dedup();
        // A sub-cell no lighter than its parent needs a larger sample.
        let next = if conf.len() >= c { tries + 1 } else { 0 };
        refine((sub, def, conf, cov), n, r, bound, prep, tol, rng, out, attempts, next)?;
    }
    Ok(())
}

impl Cutting {
    pub fn max_conflict(&self) -> usize {
        self.cells.iter().map(|c| c.conflicts.len()).max().unwrap_or(0)
    }

    /// `Σ |C|^2` over the cells.
    pub fn conflict_square_sum(&self) -> usize {
        self.cells.iter().map(|c| c.conflicts.len().pow(2)).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area()).sum()
    }

    /// The cell whose closure contains `p`; ties go to the smallest id.
    pub fn locate(&self, p: Point) -> Result<usize, CuttingError> {
        if !self.frame.bbox.contains(p, 0.0) {
            return Err(CuttingError::OutsideBoundingBox(p.x, p.y));
        }
        let tol = self.frame.tol;
        let best = self
            .index
            .candidates(p.x, tol)
            .filter(|&i| self.cells[i].trap.contains(p, tol))
            .min();
        // Round-off can leave a point in a gap narrower than `tol`.
        Ok(best.unwrap_or_else(|| self.nearest(p)))
    }

    /// Every cell whose closure contains `p`, ascending; the nearest cell
    /// when round-off leaves `p` in a gap.
    pub fn locate_all(&self, p: Point) -> Result<Vec<usize>, CuttingError> {
        if !self.frame.bbox.contains(p, 0.0) {
            return Err(CuttingError::OutsideBoundingBox(p.x, p.y));
        }
        let tol = self.frame.tol;
        let mut v: Vec<usize> =
            self.index.candidates(p.x, tol).filter(|&i| self.cells[i].trap.contains(p, tol)).collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            v.push(self.nearest(p));
        }
        Ok(v)
    }

    fn nearest(&self, p: Point) -> usize {
        let dist = |t: &Trap| {
            let x = p.x.clamp(t.x_lo, t.x_hi);
            let (b, u) = (t.bottom_at(x), t.top_at(x));
            (p.x - x).abs() + (b - p.y).max(p.y - u).max(0.0)
        };
        let mut best = (f64::INFINITY, 0);
        for c in &self.cells {
            let d = dist(&c.trap);
            if d < best.0 {
                best = (d, c.id);
            }
        }
        best.1
    }
}

/// Cells grouped by the x-slabs between all cell walls.
#[derive(Debug, Clone, Default)]
struct SlabIndex {
    xs: Vec<f64>,
    /// `slabs[k]`: cells overlapping `(xs[k], xs[k+1])`.
    slabs: Vec<Vec<usize>>,
}

impl SlabIndex {
    fn new(cells: &[PseudoTrapezoid]) -> Self {
        let mut xs: Vec<f64> = cells.iter().flat_map(|c| [c.trap.x_lo, c.trap.x_hi]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut slabs = vec![Vec::new(); xs.len().saturating_sub(1)];
        for c in cells {
            let a = xs.partition_point(|&x| x < c.trap.x_lo);
            let b = xs.partition_point(|&x| x < c.trap.x_hi);
            for s in &mut slabs[a..b] {
                s.push(c.id);
            }
        }
        SlabIndex { xs, slabs }
    }

    /// Cells of the slabs meeting `[x - tol, x + tol]`.
    fn candidates(&self, x: f64, tol: f64) -> impl Iterator<Item = usize> + '_ {
        let lo = self.xs.partition_point(|&w| w < x - tol).saturating_sub(1);
        let hi = (self.xs.partition_point(|&w| w <= x + tol)).min(self.slabs.len());
        self.slabs[lo.min(hi)..hi].iter().flatten().copied()
    }
}

/// `n` interior-disjoint random cells in `[0, 100]^2`, one per cell of a
/// grid: triangles, and with `hyperbolic` also sectors closed by a
/// hyperbola arc.
pub fn random_cells(seed: u64, n: usize, hyperbolic: bool) -> Vec<TarskiCell> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ((2 * n) as f64).sqrt().ceil().max(1.0) as usize;
    let s = 100.0 / g as f64;
    let mut slots: Vec<usize> = (0..g * g).collect();
    slots.shuffle(&mut rng);
    slots.truncate(n);
    slots
        .into_iter()
        .map(|k| {
            let o = Point::new((k % g) as f64 * s, (k / g) as f64 * s);
            let c = o + Point::new(0.5 * s, 0.5 * s);
            if hyperbolic && rng.gen_bool(0.5) {
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let half = rng.gen_range(0.2..0.5);
                let b = Bisector::new(c, 0.3 * s, c + Point::from_angle(phi) * s, 0.0);
                let (t0, t1) = (phi - half, phi + half);
                let p0 = b.point_at(t0).unwrap();
                let p1 = b.point_at(t1).unwrap();
                let arcs = vec![
                    ConicArc::segment(c, p0),
                    ConicArc::hyperbola_between(b, t0, t1),
                    ConicArc::segment(p1, c),
                ];
                let sample = c + Point::from_angle(phi) * (0.1 * s);
                TarskiCell::new(arcs, sample)
            } else {
                let mut v = || o + Point::new(rng.gen_range(0.05..0.95) * s, rng.gen_range(0.05..0.95) * s);
                let (a, b, c) = (v(), v(), v());
                let arcs = vec![ConicArc::segment(a, b), ConicArc::segment(b, c), ConicArc::segment(c, a)];
                let m = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
                TarskiCell::new(arcs, m)
            }
        })
        .collect()
}
