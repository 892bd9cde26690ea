//! Polygonal domains with holes: validation, membership, boundary
//! parametrization, JSON I/O and seeded random generation.

use crate::geom::{orient, segments_intersect, signed_area, BBox, Mode, Point, Segment, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid domain: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("point ({0}, {1}) is not on the domain boundary")]
    NotOnBoundary(f64, f64),
    #[error("point ({0}, {1}) lies outside the domain")]
    PointOutsideDomain(f64, f64),
    #[error("free space is disconnected")]
    Disconnected,
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite { ring: usize },
    TooFewVertices { ring: usize },
    Orientation { ring: usize },
    SelfIntersection { ring: usize, edge_a: usize, edge_b: usize },
    RingIntersection { ring_a: usize, edge_a: usize, ring_b: usize, edge_b: usize },
    HoleOutside { ring: usize },
    HoleNested { ring_a: usize, ring_b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFinite { ring } => write!(f, "ring {ring}: non-finite coordinate"),
            Violation::TooFewVertices { ring } => write!(f, "ring {ring}: fewer than 3 vertices"),
            Violation::Orientation { ring } => {
                if ring == 0 {
                    write!(f, "ring 0: outer ring must be counterclockwise")
                } else {
                    write!(f, "ring {ring}: hole must be clockwise")
                }
            }
            Violation::SelfIntersection { ring, edge_a, edge_b } => {
                write!(f, "ring {ring}: edges {edge_a} and {edge_b} intersect")
            }
            Violation::RingIntersection { ring_a, edge_a, ring_b, edge_b } => write!(
                f,
                "ring {ring_a} edge {edge_a} meets ring {ring_b} edge {edge_b}"
            ),
            Violation::HoleOutside { ring } => write!(f, "ring {ring}: hole not inside outer ring"),
            Violation::HoleNested { ring_a, ring_b } => {
                write!(f, "rings {ring_a} and {ring_b}: one hole inside another")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// A point on a boundary cycle (0 = outer ring, i = hole i).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub cycle: usize,
    pub edge: usize,
    pub fraction: f64,
    pub point: Point,
}

/// Outer ring (counterclockwise) and holes (clockwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalDomain {
    pub outer: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
}

/// One directed ring edge with its position in the domain.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub seg: Segment,
    pub cycle: usize,
    pub index: usize,
    /// Global vertex ids of the endpoints.
    pub from: usize,
    pub to: usize,
}

impl PolygonalDomain {
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        PolygonalDomain { outer, holes }
    }

    pub fn n(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Vec::len).sum::<usize>()
    }

    pub fn h(&self) -> usize {
        self.holes.len()
    }

    pub fn ring(&self, cycle: usize) -> &[Point] {
        if cycle == 0 {
            &self.outer
        } else {
            &self.holes[cycle - 1]
        }
    }

    pub fn cycles(&self) -> usize {
        1 + self.holes.len()
    }

    /// All vertices, outer ring first, then holes in order.
    pub fn vertices(&self) -> Vec<Point> {
        let mut v = self.outer.clone();
        for h in &self.holes {
            v.extend_from_slice(h);
        }
        v
    }

    /// Global id of the first vertex of each cycle.
    pub fn cycle_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.cycles());
        let mut acc = 0;
        for c in 0..self.cycles() {
            off.push(acc);
            acc += self.ring(c).len();
        }
        off
    }

    /// Global ids of the ring neighbours `(prev, next)` of each vertex.
    pub fn neighbours(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n());
        for (c, off) in self.cycle_offsets().into_iter().enumerate() {
            let m = self.ring(c).len();
            for i in 0..m {
                out.push((off + (i + m - 1) % m, off + (i + 1) % m));
            }
        }
        out
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n());
        for (c, off) in self.cycle_offsets().into_iter().enumerate() {
            let r = self.ring(c);
            let m = r.len();
            for i in 0..m {
                out.push(Edge {
                    seg: Segment::new(r[i], r[(i + 1) % m]),
                    cycle: c,
                    index: i,
                    from: off + i,
                    to: off + (i + 1) % m,
                });
            }
        }
        out
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(self.outer.iter().copied())
    }

    pub fn tolerance(&self) -> Tolerance {
        let feature = self.edges().iter().map(|e| e.seg.len()).fold(f64::INFINITY, f64::min);
        Tolerance::for_diameter(self.bbox().diameter()).with_feature(feature)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.outer) + self.holes.iter().map(|h| signed_area(h)).sum::<f64>()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let cycles = self.cycles();
        for c in 0..cycles {
            let r = self.ring(c);
            if r.iter().any(|p| !p.is_finite()) {
                v.push(Violation::NonFinite { ring: c });
            }
            if r.len() < 3 {
                v.push(Violation::TooFewVertices { ring: c });
            }
        }
        if !v.is_empty() {
            return v;
        }
        for c in 0..cycles {
            let a = signed_area(self.ring(c));
            if (c == 0 && a <= 0.0) || (c > 0 && a >= 0.0) {
                v.push(Violation::Orientation { ring: c });
            }
            let r = self.ring(c);
            let m = r.len();
            for i in 0..m {
                for j in i + 1..m {
                    let si = Segment::new(r[i], r[(i + 1) % m]);
                    let sj = Segment::new(r[j], r[(j + 1) % m]);
                    let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                    let bad = if adjacent {
                        // Neighbours share one endpoint; anything more is a fold.
                        let shared = if j == i + 1 { r[j] } else { r[i] };
                        let (p, q) = if j == i + 1 { (si.a, sj.b) } else { (sj.a, si.b) };
                        orient(p, shared, q) == 0
                            && (q - shared).dot(p - shared) > 0.0
                    } else {
                        segments_intersect(&si, &sj, Mode::Closed)
                    };
                    if bad {
                        v.push(Violation::SelfIntersection { ring: c, edge_a: i, edge_b: j });
                    }
                }
            }
        }
        for ca in 0..cycles {
            for cb in ca + 1..cycles {
                let (ra, rb) = (self.ring(ca), self.ring(cb));
                for i in 0..ra.len() {
                    let sa = Segment::new(ra[i], ra[(i + 1) % ra.len()]);
                    for j in 0..rb.len() {
                        let sb = Segment::new(rb[j], rb[(j + 1) % rb.len()]);
                        if segments_intersect(&sa, &sb, Mode::Closed) {
                            v.push(Violation::RingIntersection {
                                ring_a: ca,
                                edge_a: i,
                                ring_b: cb,
                                edge_b: j,
                            });
                        }
                    }
                }
            }
        }
        if v.iter().any(|x| matches!(x, Violation::RingIntersection { .. })) {
            return v;
        }
        for (i, h) in self.holes.iter().enumerate() {
            if !point_in_ring(&self.outer, h[0]) {
                v.push(Violation::HoleOutside { ring: i + 1 });
            }
            for (j, g) in self.holes.iter().enumerate() {
                if i < j && (point_in_ring(g, h[0]) || point_in_ring(h, g[0])) {
                    v.push(Violation::HoleNested { ring_a: i + 1, ring_b: j + 1 });
                }
            }
        }
        v
    }

    /// Closed-set membership: exact boundary detection, then even-odd parity.
    pub fn contains(&self, p: Point) -> Location {
        for c in 0..self.cycles() {
            let r = self.ring(c);
            for i in 0..r.len() {
                if Segment::new(r[i], r[(i + 1) % r.len()]).contains_point(p) {
                    return Location::Boundary;
                }
            }
        }
        if !point_in_ring(&self.outer, p) {
            return Location::Exterior;
        }
        if self.holes.iter().any(|h| point_in_ring(h, p)) {
            return Location::Exterior;
        }
        Location::Interior
    }

    /// Membership with a tolerance band counted as boundary.
    pub fn contains_tol(&self, p: Point, tol: f64) -> Location {
        match self.contains(p) {
            Location::Boundary => Location::Boundary,
            loc => {
                if self.edges().iter().any(|e| e.seg.dist_to(p) <= tol) {
                    Location::Boundary
                } else {
                    loc
                }
            }
        }
    }

    pub fn cycle_length(&self, cycle: usize) -> f64 {
        let r = self.ring(cycle);
        (0..r.len()).map(|i| r[i].dist(r[(i + 1) % r.len()])).sum()
    }

    /// Arc-length offsets of each edge start on a cycle; the last entry is
    /// the cycle length.
    pub fn boundary_param(&self, cycle: usize) -> Vec<f64> {
        let r = self.ring(cycle);
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(r.len() + 1);
        for i in 0..r.len() {
            out.push(acc);
            acc += r[i].dist(r[(i + 1) % r.len()]);
        }
        out.push(acc);
        out
    }

    /// Arc-length coordinate of a boundary point on its cycle axis.
    pub fn boundary_coord(&self, bp: &BoundaryPoint) -> f64 {
        let r = self.ring(bp.cycle);
        let off = self.boundary_param(bp.cycle)[bp.edge];
        off + bp.fraction * r[bp.edge].dist(r[(bp.edge + 1) % r.len()])
    }

    /// Inverse of `boundary_coord`.
    pub fn boundary_at(&self, cycle: usize, s: f64) -> BoundaryPoint {
        let par = self.boundary_param(cycle);
        let total = *par.last().unwrap();
        let s = s.rem_euclid(total);
        let m = par.len() - 1;
        let e = match par[..m].binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let len = par[e + 1] - par[e];
        let fraction = if len > 0.0 { ((s - par[e]) / len).clamp(0.0, 1.0) } else { 0.0 };
        let mut bp = BoundaryPoint { cycle, edge: e, fraction, point: Point::new(0.0, 0.0) };
        if bp.fraction >= 1.0 {
            bp.edge = (e + 1) % m;
            bp.fraction = 0.0;
        }
        bp.point = self.boundary_eval(&bp);
        bp
    }

    pub fn boundary_eval(&self, bp: &BoundaryPoint) -> Point {
        let r = self.ring(bp.cycle);
        let a = r[bp.edge];
        let b = r[(bp.edge + 1) % r.len()];
        if bp.fraction == 0.0 {
            return a;
        }
        a.lerp(b, bp.fraction)
    }

    /// Finds the boundary edge through `p` (within the curve tolerance).
    pub fn boundary_locate(&self, p: Point) -> Result<BoundaryPoint, DomainError> {
        let tol = self.tolerance().curve;
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for c in 0..self.cycles() {
            let r = self.ring(c);
            let m = r.len();
            for i in 0..m {
                let s = Segment::new(r[i], r[(i + 1) % m]);
                let d = if s.contains_point(p) { 0.0 } else { s.dist_to(p) };
                if d <= tol && best.is_none_or(|b| d < b.0) {
                    let dir = s.b - s.a;
                    let t = ((p - s.a).dot(dir) / dir.dot(dir)).clamp(0.0, 1.0);
                    best = Some((d, c, i, t));
                    if d == 0.0 {
                        break;
                    }
                }
            }
        }
        let Some((_, cycle, mut edge, mut fraction)) = best else {
            return Err(DomainError::NotOnBoundary(p.x, p.y));
        };
        if p == self.ring(cycle)[edge] {
            fraction = 0.0;
        }
        if fraction >= 1.0 || p == self.ring(cycle)[(edge + 1) % self.ring(cycle).len()] {
            edge = (edge + 1) % self.ring(cycle).len();
            fraction = 0.0;
        }
        Ok(BoundaryPoint { cycle, edge, fraction, point: p })
    }

    pub fn from_json(s: &str) -> Result<Self, DomainError> {
        let d: PolygonalDomain = serde_json::from_str(s)?;
        let v = d.validate();
        if !v.is_empty() {
            return Err(DomainError::Invalid(v));
        }
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<Self, DomainError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical JSON text (compact, fixed field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), DomainError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Seeded random domain with `n_target` vertices and `h_target` holes.
    pub fn generate(seed: u64, n_target: usize, h_target: usize) -> Result<Self, DomainError> {
        if n_target < 3 + 3 * h_target {
            return Err(DomainError::GenerationFailed(format!(
                "{n_target} vertices cannot hold an outer ring and {h_target} holes"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Holes get 3 vertices plus a share of the surplus; the outer ring
        // keeps at least half.
        let surplus = n_target - 3 - 3 * h_target;
        let mut hole_sizes = vec![3usize; h_target];
        let outer_extra_min = surplus / 2;
        for _ in 0..(surplus - outer_extra_min) {
            if h_target == 0 {
                break;
            }
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..h_target);
                hole_sizes[i] += 1;
            }
        }
        let outer_n = n_target - hole_sizes.iter().sum::<usize>();
        for _attempt in 0..32 {
            let outer = star_ring(&mut rng, Point::new(0.0, 0.0), 100.0, 0.55, outer_n);
            let mut dom = PolygonalDomain::new(outer, Vec::new());
            if !dom.validate().is_empty() {
                continue;
            }
            let mut ok = true;
            for &hs in &hole_sizes {
                let mut placed = false;
                for _ in 0..2000 {
                    let c = Point::new(rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0));
                    let rad = rng.gen_range(6.0..18.0);
                    let mut ring = star_ring(&mut rng, c, rad, 0.5, hs);
                    ring.reverse();
                    let mut cand = dom.clone();
                    cand.holes.push(ring);
                    if cand.validate().is_empty() && clearance(&cand) > 1.0 {
                        dom = cand;
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(dom);
            }
        }
        Err(DomainError::GenerationFailed(format!(
            "no valid domain with n={n_target}, h={h_target} within the retry budget"
        )))
    }

    /// Uniform point of the open free space, by rejection from the bbox.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> Point {
        let b = self.bbox();
        loop {
            let p = Point::new(rng.gen_range(b.min.x..b.max.x), rng.gen_range(b.min.y..b.max.y));
            if self.contains(p) == Location::Interior {
                return p;
            }
        }
    }

    /// Uniform point by arc length over all cycles, holes included.
    pub fn sample_boundary<R: Rng>(&self, rng: &mut R) -> BoundaryPoint {
        let lens: Vec<f64> = (0..self.cycles()).map(|c| self.cycle_length(c)).collect();
        let mut u = rng.gen_range(0.0..lens.iter().sum::<f64>());
        let mut cycle = 0;
        while cycle + 1 < lens.len() && u >= lens[cycle] {
            u -= lens[cycle];
            cycle += 1;
        }
        self.boundary_at(cycle, u)
    }
}

/// Even-odd test against one ring (boundary handling left to the caller).
pub fn point_in_ring(r: &[Point], p: Point) -> bool {
    let mut inside = false;
    let m = r.len();
    for i in 0..m {
        let (a, b) = (r[i], r[(i + 1) % m]);
        if (a.y > p.y) != (b.y > p.y) {
            let o = orient(a, b, p);
            // Upward edge: p left of it means the rightward ray crosses.
            if (b.y > a.y && o > 0) || (b.y < a.y && o < 0) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Smallest distance between a vertex and a non-incident edge.
fn clearance(d: &PolygonalDomain) -> f64 {
    let edges = d.edges();
    let verts = d.vertices();
    let mut best = f64::INFINITY;
    for (vi, &v) in verts.iter().enumerate() {
        for e in &edges {
            if e.from != vi && e.to != vi {
                best = best.min(e.seg.dist_to(v));
            }
        }
    }
    best
}

/// Star-shaped ring (counterclockwise) with jittered angles and radii,
/// coordinates rounded to 1e-3.
fn star_ring(rng: &mut ChaCha8Rng, c: Point, rad: f64, jitter: f64, n: usize) -> Vec<Point> {
    let mut angles: Vec<f64> = (0..n)
        .map(|i| {
            let base = std::f64::consts::TAU * i as f64 / n as f64;
            base + rng.gen_range(0.0..0.8) * std::f64::consts::TAU / n as f64
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let round = |v: f64| (v * 1000.0).round() / 1000.0;
    angles
        .iter()
        .map(|&a| {
            let r = rad * rng.gen_range(1.0 - jitter..1.0);
            Point::new(round(c.x + r * a.cos()), round(c.y + r * a.sin()))
        })
        .collect()
}
