//! Vertex-to-vertex geodesic distances and the brute-force two-point oracle.

use crate::domain::{DomainError, PolygonalDomain};
use crate::geom::Point;
use crate::visibility::{build_visibility_graph, check_in, Visibility, VisibilityGraph};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// All-pairs geodesic distances between polygon vertices.
#[derive(Debug, Clone)]
pub struct GeodesicMatrix {
    pub n: usize,
    d: Vec<f64>,
    /// `pred[u*n + w]`: vertex before `w` on the shortest path from `u`.
    pred: Vec<usize>,
}

impl GeodesicMatrix {
    pub fn d(&self, u: usize, w: usize) -> f64 {
        self.d[u * self.n + w]
    }

    pub fn pred(&self, u: usize, w: usize) -> usize {
        self.pred[u * self.n + w]
    }

    /// Vertex sequence of the shortest path from `u` to `w`, both included.
    pub fn vertex_path(&self, u: usize, w: usize) -> Vec<usize> {
        let mut out = vec![w];
        let mut x = w;
        while x != u {
            x = self.pred(u, x);
            out.push(x);
        }
        out.reverse();
        out
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn dijkstra(vg: &VisibilityGraph, src: usize) -> (Vec<f64>, Vec<usize>) {
    let n = vg.n;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    pred[src] = src;
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, src));
    while let Some(Item(du, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(w, len) in &vg.adj[u] {
            let nd = du + len;
            // Ties keep the smaller predecessor index for determinism.
            if nd < dist[w] || (nd == dist[w] && u < pred[w] && !done[w]) {
                dist[w] = nd;
                pred[w] = u;
                heap.push(Item(nd, w));
            }
        }
    }
    (dist, pred)
}

pub fn all_pairs(vg: &VisibilityGraph) -> Result<GeodesicMatrix, DomainError> {
    let n = vg.n;
    let rows: Vec<(Vec<f64>, Vec<usize>)> = (0..n).into_par_iter().map(|u| dijkstra(vg, u)).collect();
    let mut d = Vec::with_capacity(n * n);
    let mut pred = Vec::with_capacity(n * n);
    for (r, p) in rows {
        if r.iter().any(|x| !x.is_finite()) {
            return Err(DomainError::Disconnected);
        }
        d.extend(r);
        pred.extend(p);
    }
    // Row sums may differ in the last bit between directions; keep one.
    for u in 0..n {
        for w in 0..u {
            d[u * n + w] = d[w * n + u];
        }
    }
    Ok(GeodesicMatrix { n, d, pred })
}

/// A domain together with its visibility data and vertex distances.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub domain: PolygonalDomain,
    pub vis: Visibility,
    pub vg: VisibilityGraph,
    pub gm: GeodesicMatrix,
}

/// Oracle answer: distance, witnessing vertex pair (first and last vertex
/// on the path, `None` for a straight path) and the polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub distance: f64,
    pub witness: Option<(usize, usize)>,
    pub path: Vec<Point>,
}

impl Geodesic {
    pub fn new(domain: PolygonalDomain) -> Result<Self, DomainError> {
        let v = domain.validate();
        if !v.is_empty() {
            return Err(DomainError::Invalid(v));
        }
        let vis = Visibility::new(&domain);
        let vg = build_visibility_graph(&domain, &vis);
        let gm = all_pairs(&vg)?;
        Ok(Geodesic { domain, vis, vg, gm })
    }

    pub fn n(&self) -> usize {
        self.gm.n
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vis.vertices[i]
    }

    pub fn sees(&self, p: Point, q: Point) -> bool {
        self.vis.sees(&self.domain, p, q)
    }

    pub fn visible_vertices(&self, p: Point) -> Vec<usize> {
        self.vis.visible_vertices(&self.domain, p)
    }

    pub fn check_in(&self, p: Point) -> Result<(), DomainError> {
        check_in(&self.domain, &self.vis, p)
    }

    /// Index of the vertex at exactly `p`, if any.
    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        self.vis.vertices.iter().position(|&v| v == p)
    }

    /// Polyline `s, u, ..., w, t` through the shortest vertex path.
    pub fn path_through(&self, s: Point, u: usize, w: usize, t: Point) -> Vec<Point> {
        let mut path = vec![s];
        for x in self.gm.vertex_path(u, w) {
            let p = self.vertex(x);
            if path.last() != Some(&p) {
                path.push(p);
            }
        }
        if path.last() != Some(&t) {
            path.push(t);
        }
        path
    }

    /// Exact geodesic distance by minimizing over visible vertex pairs, with
    /// the straight-segment short-circuit.
    pub fn oracle_distance(&self, s: Point, t: Point) -> Result<Answer, DomainError> {
        self.check_in(s)?;
        self.check_in(t)?;
        if s == t {
            return Ok(Answer { distance: 0.0, witness: None, path: vec![s] });
        }
        if self.sees(s, t) {
            return Ok(Answer { distance: s.dist(t), witness: None, path: vec![s, t] });
        }
        let vs = self.visible_vertices(s);
        let vt = self.visible_vertices(t);
        let mut best: Option<(f64, usize, usize)> = None;
        for &u in &vs {
            let su = s.dist(self.vertex(u));
            for &w in &vt {
                let f = su + self.gm.d(u, w) + self.vertex(w).dist(t);
                if best.is_none_or(|b| f < b.0) {
                    best = Some((f, u, w));
                }
            }
        }
        let (distance, u, w) = best.ok_or(DomainError::Disconnected)?;
        Ok(Answer { distance, witness: Some((u, w)), path: self.path_through(s, u, w, t) })
    }
}

pub fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist(w[1])).sum()
}
