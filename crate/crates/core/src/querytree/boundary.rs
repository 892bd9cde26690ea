//! Queries with `s` (and optionally `t`) on the domain boundary: the
//! regions cut each boundary cycle into intervals, stored in one segment
//! tree per cycle.

use super::{BuildConfig, BuildError, CuttingTree, Instance, TreeStats, INNER_SEED};
use crate::domain::{BoundaryPoint, DomainError};
use crate::envelope::Best;
use crate::geodesic::Answer;
use crate::geom::{arc_arc_intersections, ArcIntersection, ConicArc, Point};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryVariant {
    SOnly,
    SAndT,
}

impl std::str::FromStr for BoundaryVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "s-only" => Ok(BoundaryVariant::SOnly),
            "s-and-t" | "st" => Ok(BoundaryVariant::SAndT),
            _ => Err(format!("unknown boundary variant '{s}'")),
        }
    }
}

/// A closed piece `[lo, hi]` of a cycle's arc-length axis inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub region: usize,
    pub cycle: usize,
    pub lo: f64,
    pub hi: f64,
}

/// The intervals of every region on every cycle, sorted by
/// `(cycle, region, lo)`. Pieces meeting at an edge end are merged; a cycle's
/// axis starts at its first vertex, so nothing wraps around.
pub fn boundary_intervals(inst: &Instance) -> Vec<Interval> {
    let d = &inst.g.domain;
    let tol = inst.t.tol;
    let mut out = Vec::new();
    for cycle in 0..d.cycles() {
        let ring = d.ring(cycle);
        let par = d.boundary_param(cycle);
        let m = ring.len();
        for r in &inst.t.regions {
            let bb = inst.prep[r.id].bbox;
            let mut pieces: Vec<(f64, f64)> = Vec::new();
            for i in 0..m {
                let (a, b) = (ring[i], ring[(i + 1) % m]);
                let eb = crate::geom::BBox::of_points([a, b]);
                if !eb.overlaps(&bb, tol) {
                    continue;
                }
                for (u, v) in edge_pieces(&r.cell.arcs, a, b, tol, |p| r.contains(p, tol)) {
                    let len = par[i + 1] - par[i];
                    pieces.push((par[i] + u * len, par[i] + v * len));
                }
            }
            for (lo, hi) in merge(pieces, tol) {
                out.push(Interval { region: r.id, cycle, lo, hi });
            }
        }
    }
    out
}

/// Parameter ranges of `a→b` inside a closed region with boundary `arcs`.
fn edge_pieces(arcs: &[ConicArc], a: Point, b: Point, tol: f64, inside: impl Fn(Point) -> bool) -> Vec<(f64, f64)> {
    let dir = b - a;
    let len2 = dir.dot(dir);
    let lam = |p: Point| (p - a).dot(dir) / len2;
    let edge = ConicArc::segment(a, b);
    let mut ts = vec![0.0, 1.0];
    for arc in arcs {
        match arc_arc_intersections(&edge, arc) {
            Ok(ArcIntersection::Points(ps)) => ts.extend(ps.into_iter().map(lam)),
            Ok(ArcIntersection::Overlap(s)) => ts.extend([lam(s.a), lam(s.b)]),
            _ => {}
        }
        let (p, q) = arc.endpoints();
        for e in [p, q] {
            let t = lam(e);
            if (0.0..=1.0).contains(&t) && a.lerp(b, t).dist(e) <= tol {
                ts.push(t);
            }
        }
    }
    ts.retain(|t| (0.0..=1.0).contains(t));
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y) * len2.sqrt() <= tol);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in ts.windows(2) {
        if inside(a.lerp(b, 0.5 * (w[0] + w[1]))) {
            match out.last_mut() {
                Some(l) if l.1 == w[0] => l.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

fn merge(mut v: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(l) if lo <= l.1 + tol => l.1 = l.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// A segment tree over one cycle. Atoms alternate between endpoint
/// positions (even) and the open gaps between them (odd).
#[derive(Debug, Clone)]
pub struct SegmentTree {
    pub xs: Vec<f64>,
    pub nodes: Vec<SegNode>,
    fanout: usize,
}

#[derive(Debug, Clone)]
pub struct SegNode {
    pub lo: usize,
    pub hi: usize,
    pub children: Vec<usize>,
    /// Regions whose interval spans this node but not its parent.
    pub ids: Vec<usize>,
}

impl SegmentTree {
    fn new(intervals: &[Interval], fanout: usize, tol: f64) -> Self {
        let mut xs: Vec<f64> = intervals.iter().flat_map(|i| [i.lo, i.hi]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|x, y| *x - *y <= tol);
        let atoms = (2 * xs.len()).saturating_sub(1).max(1);
        let mut t = SegmentTree { xs, nodes: Vec::new(), fanout };
        t.make(0, atoms);
        for iv in intervals {
            let (a, b) = (t.atom_of(iv.lo, tol), t.atom_of(iv.hi, tol));
            t.insert(0, a, b + 1, iv.region);
        }
        for n in &mut t.nodes {
            n.ids.sort_unstable();
            n.ids.dedup();
        }
        t
    }

    fn make(&mut self, lo: usize, hi: usize) -> usize {
        let me = self.nodes.len();
        self.nodes.push(SegNode { lo, hi, children: Vec::new(), ids: Vec::new() });
        if hi - lo > 1 {
            let k = self.fanout.min(hi - lo);
            let mut kids = Vec::with_capacity(k);
            for j in 0..k {
                kids.push(self.make(lo + (hi - lo) * j / k, lo + (hi - lo) * (j + 1) / k));
            }
            self.nodes[me].children = kids;
        }
        me
    }

    fn insert(&mut self, at: usize, a: usize, b: usize, id: usize) {
        let (lo, hi) = (self.nodes[at].lo, self.nodes[at].hi);
        if b <= lo || hi <= a {
            return;
        }
        if a <= lo && hi <= b {
            self.nodes[at].ids.push(id);
            return;
        }
        for c in self.nodes[at].children.clone() {
            self.insert(c, a, b, id);
        }
    }

    /// The atom holding coordinate `x`: an endpoint within `tol`, or a gap.
    fn atom_of(&self, x: f64, tol: f64) -> usize {
        let i = self.xs.partition_point(|&v| v < x - tol);
        if i < self.xs.len() && (self.xs[i] - x).abs() <= tol {
            2 * i
        } else if i == 0 {
            0
        } else if i == self.xs.len() {
            2 * (self.xs.len() - 1)
        } else {
            2 * i - 1
        }
    }

    /// Canonical sets on the root-to-leaf path of the atom at `x`.
    pub fn stab(&self, x: f64, tol: f64, mut f: impl FnMut(&[usize])) {
        if self.xs.is_empty() {
            return;
        }
        let k = self.atom_of(x, tol);
        let mut at = 0;
        loop {
            let n = &self.nodes[at];
            if !n.ids.is_empty() {
                f(&n.ids);
            }
            match n.children.iter().find(|&&c| self.nodes[c].lo <= k && k < self.nodes[c].hi) {
                Some(&c) => at = c,
                None => return,
            }
        }
    }

    fn sets(&self) -> impl Iterator<Item = &[usize]> {
        self.nodes.iter().map(|n| n.ids.as_slice())
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BoundaryStats {
    pub structure: String,
    pub config: BuildConfig,
    pub intervals: usize,
    pub segment_nodes: usize,
    pub canonical_total: usize,
    pub envelope_pairs: u64,
    pub inner: Option<TreeStats>,
}

#[derive(Debug, Clone)]
pub struct BoundaryStructure {
    pub cfg: BuildConfig,
    pub variant: BoundaryVariant,
    pub intervals: Vec<Interval>,
    /// One tree per boundary cycle.
    pub trees: Vec<SegmentTree>,
    /// The tree joined with the canonical sets of `s` when only `s` is on
    /// the boundary.
    pub inner: Option<CuttingTree>,
}

pub fn build_boundary(
    inst: &Instance,
    variant: BoundaryVariant,
    cfg: &BuildConfig,
) -> Result<BoundaryStructure, BuildError> {
    cfg.validate()?;
    let intervals = boundary_intervals(inst);
    let trees = (0..inst.g.domain.cycles())
        .map(|c| {
            let iv: Vec<Interval> = intervals.iter().filter(|i| i.cycle == c).copied().collect();
            SegmentTree::new(&iv, cfg.fanout, inst.t.tol)
        })
        .collect();
    let inner = match variant {
        BoundaryVariant::SOnly => Some(CuttingTree::build(
            (0..inst.t.len()).collect(),
            &inst.prep,
            &inst.frame,
            cfg,
            cfg.seed ^ INNER_SEED,
        )?),
        BoundaryVariant::SAndT => None,
    };
    Ok(BoundaryStructure { cfg: *cfg, variant, intervals, trees, inner })
}

impl BoundaryStructure {
    fn stab(&self, inst: &Instance, bp: &BoundaryPoint, f: impl FnMut(&[usize])) {
        let x = inst.g.domain.boundary_coord(bp);
        self.trees[bp.cycle].stab(x, inst.t.tol, f);
    }

    pub fn query(&self, inst: &Instance, s: Point, q: Point) -> Result<Answer, DomainError> {
        let d = &inst.g.domain;
        let bs = d.boundary_locate(s)?;
        let bt = match self.variant {
            BoundaryVariant::SAndT => Some(d.boundary_locate(q)?),
            BoundaryVariant::SOnly => None,
        };
        inst.answer(s, q, || {
            let mut best = Best::default();
            match (&self.inner, bt) {
                (Some(inner), _) => self.stab(inst, &bs, |a| {
                    inner.visit(q, inst, |b| inst.join(a, b, s, q, &mut best));
                }),
                (None, Some(bt)) => self.stab(inst, &bs, |a| {
                    self.stab(inst, &bt, |b| inst.join(a, b, s, q, &mut best));
                }),
                (None, None) => unreachable!("s-and-t structure without t on the boundary"),
            }
            best
        })
    }

    pub fn stats(&self, inst: &Instance) -> BoundaryStats {
        let sets = || self.trees.iter().flat_map(|t| t.sets());
        let envelope_pairs = match &self.inner {
            Some(inner) => inst.pair_count(sets(), inner.covering_sets()),
            None => inst.pair_count(sets(), sets()),
        };
        BoundaryStats {
            structure: match self.variant {
                BoundaryVariant::SOnly => "boundary:s-only".into(),
                BoundaryVariant::SAndT => "boundary:s-and-t".into(),
            },
            config: self.cfg,
            intervals: self.intervals.len(),
            segment_nodes: self.trees.iter().map(|t| t.nodes.len()).sum(),
            canonical_total: sets().map(|s| s.len()).sum(),
            envelope_pairs,
            inner: self.inner.as_ref().map(|t| t.stats(&self.cfg)),
        }
    }
}
