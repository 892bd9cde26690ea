//! Augmented shortest path maps of all polygon vertices.
//!
//! For a source `v`, every point `q` of P reaches `v` through a first vertex
//! (the apex) that `q` sees. The points sharing an apex form a region that is
//! star-shaped from the apex; it is cut into sectors, each bounded by two
//! segments from the apex and one far arc, which is either an obstacle edge
//! or a weighted bisector with another vertex.

mod sweep;

pub use sweep::{Far, Piece};

use crate::domain::DomainError;
use crate::geodesic::Geodesic;
use crate::geom::{Bisector, ConicArc, Point, TarskiCell};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use sweep::ApexSweep;

/// The far boundary of a sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarCurve {
    /// Supporting line `n·(p - apex) = h` of an obstacle edge.
    Edge { edge: usize, n: Point, h: f64 },
    /// Weighted bisector between the apex and `other`.
    Bisector { other: usize, support: Bisector },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpmRegion {
    pub id: usize,
    pub source: usize,
    pub apex: usize,
    /// `d(apex, source)`.
    pub weight: f64,
    pub apex_point: Point,
    /// Absolute directions around the apex, `theta0 < theta1`.
    pub theta0: f64,
    pub theta1: f64,
    pub far: FarCurve,
    pub cell: TarskiCell,
}

impl SpmRegion {
    pub fn rho_far(&self, theta: f64) -> f64 {
        match self.far {
            FarCurve::Edge { n, h, .. } => h / n.dot(Point::from_angle(theta)),
            FarCurve::Bisector { support, .. } => support.rho(theta).unwrap_or(0.0),
        }
    }

    pub fn far_point(&self, theta: f64) -> Point {
        self.apex_point + Point::from_angle(theta) * self.rho_far(theta)
    }

    /// Closed containment with an absolute tolerance.
    pub fn contains(&self, q: Point, tol: f64) -> bool {
        let d = q - self.apex_point;
        let r = d.norm();
        if r <= tol {
            return true;
        }
        let th = self.theta0 + (d.angle() - self.theta0).rem_euclid(TAU);
        let slack = tol / r;
        let th = if th > self.theta1 + slack && th > TAU - slack + self.theta0 {
            th - TAU
        } else {
            th
        };
        if th < self.theta0 - slack || th > self.theta1 + slack {
            return false;
        }
        r <= self.rho_far(th.clamp(self.theta0, self.theta1)) + tol
    }

    /// Weighted distance to the source through this region's apex.
    pub fn value_at(&self, q: Point) -> f64 {
        q.dist(self.apex_point) + self.weight
    }

    pub fn area(&self) -> f64 {
        match self.far {
            FarCurve::Edge { .. } => {
                let a = self.far_point(self.theta0) - self.apex_point;
                let b = self.far_point(self.theta1) - self.apex_point;
                0.5 * a.cross(b)
            }
            FarCurve::Bisector { .. } => {
                gauss_legendre(|t| 0.5 * self.rho_far(t).powi(2), self.theta0, self.theta1)
            }
        }
    }
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let pieces = 32;
    let mut acc = 0.0;
    for i in 0..pieces {
        let lo = a + (b - a) * i as f64 / pieces as f64;
        let hi = a + (b - a) * (i + 1) as f64 / pieces as f64;
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for j in 0..5 {
            acc += W[j] * h * f(m + h * X[j]);
        }
    }
    acc
}

fn make_region(g: &Geodesic, source: usize, apex: usize, dw: f64, p: Piece) -> Option<SpmRegion> {
    let w = g.vertex(apex);
    let far = match p.far {
        Far::Empty => return None,
        Far::Edge(i) => {
            let s = g.vis.edges[i].seg;
            let d = s.b - s.a;
            let n = Point::new(-d.y, d.x) * (1.0 / d.norm());
            let h = n.dot(s.a - w);
            // Orient the normal away from the apex.
            let (n, h) = if h < 0.0 { (n * -1.0, -h) } else { (n, h) };
            FarCurve::Edge { edge: i, n, h }
        }
        Far::Bisector(u) => FarCurve::Bisector {
            other: u,
            support: Bisector::new(w, dw, g.vertex(u), g.gm.d(u, source)),
        },
    };
    let mut r = SpmRegion {
        id: 0,
        source,
        apex,
        weight: dw,
        apex_point: w,
        theta0: p.theta0,
        theta1: p.theta1,
        far,
        cell: TarskiCell::new(Vec::new(), w),
    };
    let (p0, p1) = (r.far_point(p.theta0), r.far_point(p.theta1));
    let far_arc = match far {
        FarCurve::Edge { .. } => ConicArc::segment(p0, p1),
        FarCurve::Bisector { support, .. } => ConicArc::hyperbola_between(support, p.theta0, p.theta1),
    };
    let tm = 0.5 * (p.theta0 + p.theta1);
    let sample = w + Point::from_angle(tm) * (0.5 * r.rho_far(tm));
    r.cell = TarskiCell::new(
        vec![ConicArc::segment(w, p0), far_arc, ConicArc::segment(p1, w)],
        sample,
    );
    Some(r)
}

/// Regions of the shortest path map of `source`, ids unassigned.
pub fn build_spm(g: &Geodesic, source: usize) -> Vec<SpmRegion> {
    let nb = g.domain.neighbours();
    let mut out = Vec::new();
    for (apex, &(prev, next)) in nb.iter().enumerate() {
        let sw = ApexSweep::new(g, source, apex, prev, next);
        let dw = sw.dw();
        for p in sw.run() {
            if let Some(r) = make_region(g, source, apex, dw, p) {
                out.push(r);
            }
        }
    }
    out
}

/// The multiset of all regions of all sources, with a per-source index.
#[derive(Debug, Clone)]
pub struct RegionMultiset {
    pub regions: Vec<SpmRegion>,
    pub n_sources: usize,
    /// Region id range of each source.
    pub by_source: Vec<(usize, usize)>,
    pub tol: f64,
}

impl RegionMultiset {
    pub fn build(g: &Geodesic) -> Self {
        let per: Vec<Vec<SpmRegion>> = (0..g.n()).into_par_iter().map(|v| build_spm(g, v)).collect();
        let mut regions = Vec::new();
        let mut by_source = Vec::new();
        for rs in per {
            let start = regions.len();
            for mut r in rs {
                r.id = regions.len();
                regions.push(r);
            }
            by_source.push((start, regions.len()));
        }
        RegionMultiset {
            regions,
            n_sources: g.n(),
            by_source,
            tol: g.domain.tolerance().geom(),
        }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn of_source(&self, v: usize) -> &[SpmRegion] {
        let (a, b) = self.by_source[v];
        &self.regions[a..b]
    }

    /// The region of `source` that holds `p`: among containing regions the
    /// one with the least weighted distance, ties to the smaller id. Falls
    /// back to the best region whose apex `p` sees.
    pub fn locate_in_source(&self, g: &Geodesic, source: usize, p: Point) -> usize {
        let mut best: Option<(f64, usize)> = None;
        for r in self.of_source(source) {
            if r.contains(p, self.tol) {
                let v = r.value_at(p);
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, r.id));
                }
            }
        }
        if let Some((_, id)) = best {
            return id;
        }
        let mut fb: Option<(f64, usize)> = None;
        for r in self.of_source(source) {
            let v = r.value_at(p);
            if fb.is_none_or(|b| v < b.0) && g.sees(p, r.apex_point) {
                fb = Some((v, r.id));
            }
        }
        fb.map(|b| b.1).unwrap_or(self.by_source[source].0)
    }

    /// The set `T_p`: one region per source.
    pub fn regions_containing(&self, g: &Geodesic, p: Point) -> Result<Vec<usize>, DomainError> {
        g.check_in(p)?;
        Ok((0..self.n_sources).map(|v| self.locate_in_source(g, v, p)).collect())
    }
}

/// All pairs `(S, T)` in `A × B` with the same source, sorted.
pub fn relevant_pairs(t: &RegionMultiset, a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &y in b {
        buckets.entry(t.regions[y].source).or_default().push(y);
    }
    let mut out = Vec::new();
    for &x in a {
        if let Some(ys) = buckets.get(&t.regions[x].source) {
            for &y in ys {
                out.push((x, y));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Location, PolygonalDomain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn d0() -> Geodesic {
        Geodesic::new(PolygonalDomain::new(
            vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)],
            vec![vec![p(4., 4.), p(4., 6.), p(6., 6.), p(6., 4.)]],
        ))
        .unwrap()
    }

    /// Weighted minimum over visible vertices, straight from the matrix.
    fn brute_min(g: &Geodesic, source: usize, q: Point) -> f64 {
        g.visible_vertices(q)
            .into_iter()
            .map(|w| q.dist(g.vertex(w)) + g.gm.d(w, source))
            .fold(f64::INFINITY, f64::min)
    }

    fn sample_interior(g: &Geodesic, rng: &mut ChaCha8Rng) -> Point {
        let bb = g.domain.bbox();
        loop {
            let q = p(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y));
            if g.domain.contains(q) == Location::Interior {
                return q;
            }
        }
    }

    #[test]
    fn d0_examples() {
        let g = d0();
        let t = RegionMultiset::build(&g);
        let r = &t.regions[t.locate_in_source(&g, 0, p(1., 1.))];
        assert_eq!((r.apex, r.weight), (0, 0.0));
        let r = &t.regions[t.locate_in_source(&g, 0, p(9.5, 9.5))];
        assert!(r.apex == 4 + 1 || r.apex == 4 + 3, "apex {}", r.apex);
        assert!((r.weight - 52f64.sqrt()).abs() < 1e-12);
        let tp = t.regions_containing(&g, p(1., 5.)).unwrap();
        assert_eq!(tp.len(), 8);
        for (v, &id) in tp.iter().enumerate() {
            assert_eq!(t.regions[id].source, v);
            assert!(t.regions[id].contains(p(1., 5.), 1e-9));
        }
        let tv = t.regions_containing(&g, p(4., 6.)).unwrap();
        assert_eq!((t.regions[tv[5]].apex, t.regions[tv[5]].weight), (5, 0.0));
        assert!(t.regions_containing(&g, p(5., 5.)).is_err());
    }

    #[test]
    fn tiling_and_labels_on_generated_domains() {
        for seed in [1u64, 2] {
            let g = Geodesic::new(PolygonalDomain::generate(seed, 20, 2).unwrap()).unwrap();
            let t = RegionMultiset::build(&g);
            let area = g.domain.area();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in 0..g.n() {
                let sum: f64 = t.of_source(v).iter().map(|r| r.area()).sum();
                assert!((sum - area).abs() < 1e-6 * area, "source {v}: {sum} vs {area}");
                for _ in 0..50 {
                    let q = sample_interior(&g, &mut rng);
                    let r = &t.regions[t.locate_in_source(&g, v, q)];
                    let want = brute_min(&g, v, q);
                    assert!((r.value_at(q) - want).abs() <= 1e-9 * want, "{} vs {want}", r.value_at(q));
                    assert!(g.sees(r.cell.interior_sample, r.apex_point));
                }
            }
        }
    }

    #[test]
    fn relevant_pairs_examples() {
        let g = d0();
        let t = RegionMultiset::build(&g);
        let ts = t.regions_containing(&g, p(1., 5.)).unwrap();
        let tt = t.regions_containing(&g, p(9., 5.)).unwrap();
        assert_eq!(relevant_pairs(&t, &ts, &tt).len(), 8);
        let a: Vec<usize> = t.of_source(3).iter().map(|r| r.id).collect();
        let b: Vec<usize> = t.of_source(4).iter().map(|r| r.id).collect();
        assert!(relevant_pairs(&t, &a, &b).is_empty());
        assert_eq!(relevant_pairs(&t, &a[..1], &a[..1]), vec![(a[0], a[0])]);
    }
}
