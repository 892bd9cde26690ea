//! Segment visibility inside the closed free space, and the vertex
//! visibility graph.

use crate::domain::{DomainError, Edge, Location, PolygonalDomain};
use crate::geom::{orient, Point};
use rayon::prelude::*;

/// Visibility queries against one domain, with its edges cached.
#[derive(Debug, Clone)]
pub struct Visibility {
    pub edges: Vec<Edge>,
    pub vertices: Vec<Point>,
    /// Query endpoints within this distance of an edge count as on it.
    pub snap: f64,
}

impl Visibility {
    pub fn new(d: &PolygonalDomain) -> Self {
        Visibility {
            edges: d.edges(),
            vertices: d.vertices(),
            snap: d.tolerance().curve,
        }
    }

    fn contains(&self, d: &PolygonalDomain, p: Point) -> bool {
        d.contains(p) != Location::Exterior
    }

    /// Whether the closed segment `pq` lies in the closed free space.
    /// Both endpoints are assumed to be in P.
    pub fn sees(&self, d: &PolygonalDomain, p: Point, q: Point) -> bool {
        if p == q {
            return true;
        }
        let dir = q - p;
        let len2 = dir.dot(dir);
        let param = |x: Point| (x - p).dot(dir) / len2;
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        // Parameter ranges where pq runs along a ring edge.
        let mut along: Vec<(f64, f64)> = Vec::new();
        for e in &self.edges {
            let (a, b) = (e.seg.a, e.seg.b);
            let snap_p = p == a || p == b || e.seg.dist_to(p) <= self.snap;
            let snap_q = q == a || q == b || e.seg.dist_to(q) <= self.snap;
            if snap_p && snap_q {
                // Both ends on this edge: pq runs along it.
                along.push((0.0, 1.0));
                continue;
            }
            let op = if snap_p { 0 } else { orient(a, b, p) };
            let oq = if snap_q { 0 } else { orient(a, b, q) };
            let oa = orient(p, q, a);
            let ob = orient(p, q, b);
            if op * oq < 0 && oa * ob < 0 {
                return false;
            }
            if oa == 0 && ob == 0 {
                let (ta, tb) = (param(a), param(b));
                let (lo, hi) = (ta.min(tb).max(0.0), ta.max(tb).min(1.0));
                if lo < hi {
                    along.push((lo, hi));
                }
            }
            for (o, x) in [(oa, a), (ob, b)] {
                if o == 0 {
                    let t = param(x);
                    if t > 0.0 && t < 1.0 {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi - lo <= 0.0 {
                continue;
            }
            if along.iter().any(|&(a, b)| a <= lo && hi <= b) {
                continue;
            }
            let m = p + dir * (0.5 * (lo + hi));
            if !self.contains(d, m) {
                return false;
            }
        }
        true
    }

    pub fn visible_vertices(&self, d: &PolygonalDomain, p: Point) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&w| self.sees(d, p, self.vertices[w]))
            .collect()
    }
}

/// Checked version of `Visibility::sees`.
pub fn sees(d: &PolygonalDomain, p: Point, q: Point) -> Result<bool, DomainError> {
    let vis = Visibility::new(d);
    check_in(d, &vis, p)?;
    check_in(d, &vis, q)?;
    Ok(vis.sees(d, p, q))
}

pub fn visible_vertices(d: &PolygonalDomain, p: Point) -> Result<Vec<usize>, DomainError> {
    let vis = Visibility::new(d);
    check_in(d, &vis, p)?;
    Ok(vis.visible_vertices(d, p))
}

pub(crate) fn check_in(d: &PolygonalDomain, vis: &Visibility, p: Point) -> Result<(), DomainError> {
    if !p.is_finite() || d.contains_tol(p, vis.snap) == Location::Exterior {
        return Err(DomainError::PointOutsideDomain(p.x, p.y));
    }
    Ok(())
}

/// Vertex visibility graph with Euclidean edge weights.
#[derive(Debug, Clone)]
pub struct VisibilityGraph {
    pub n: usize,
    pub adj: Vec<Vec<(usize, f64)>>,
    visible: Vec<bool>,
}

impl VisibilityGraph {
    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.visible[u * self.n + w]
    }
}

pub fn build_visibility_graph(d: &PolygonalDomain, vis: &Visibility) -> VisibilityGraph {
    let n = vis.vertices.len();
    let rows: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .map(|w| w != u && w > u && vis.sees(d, vis.vertices[u], vis.vertices[w]))
                .collect()
        })
        .collect();
    let mut visible = vec![false; n * n];
    for u in 0..n {
        for w in u + 1..n {
            if rows[u][w] {
                visible[u * n + w] = true;
                visible[w * n + u] = true;
            }
        }
    }
    let adj = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&w| visible[u * n + w])
                .map(|w| (w, vis.vertices[u].dist(vis.vertices[w])))
                .collect()
        })
        .collect();
    VisibilityGraph { n, adj, visible }
}
