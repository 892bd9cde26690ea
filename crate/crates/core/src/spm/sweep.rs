//! Angular sweep around one apex: finds the directions along which the apex
//! is the first vertex toward the source, and what bounds its region there.

use crate::geodesic::Geodesic;
use crate::geom::Point;
use std::f64::consts::{FRAC_PI_2, TAU};

/// What ends the apex region along a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Far {
    /// The ray leaves the apex region at once (another vertex is as good).
    Empty,
    /// An obstacle edge (global edge index).
    Edge(usize),
    /// The weighted bisector with another vertex.
    Bisector(usize),
}

/// A maximal angular interval with one far boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub theta0: f64,
    pub theta1: f64,
    pub far: Far,
}

pub(crate) struct ApexSweep<'a> {
    g: &'a Geodesic,
    w: Point,
    dw: f64,
    /// Per vertex; `None` for the apex and for vertices that cannot win.
    cands: Vec<Option<Cand>>,
    edges: Vec<EdgeLine>,
    base: Vec<f64>,
    lo: f64,
    hi: f64,
}

#[derive(Clone, Copy)]
struct Cand {
    c: Point,
    k: f64,
    numer: f64,
    /// The vertex is already as good as the apex at the apex itself.
    at_zero: bool,
    /// Next vertex on its path to the source.
    toward: Point,
}

#[derive(Clone, Copy)]
struct EdgeLine {
    a: Point,
    b: Point,
    /// Unit normal and offset of the supporting line relative to the apex.
    n: Point,
    h: f64,
    incident: bool,
}

/// Angles `θ` with `α·e(θ) = γ`.
fn solve_dir(alpha: Point, gamma: f64) -> Vec<f64> {
    let r = alpha.norm();
    if r < 1e-300 {
        return Vec::new();
    }
    let c = gamma / r;
    if !(-1.0..=1.0).contains(&c) {
        return Vec::new();
    }
    let psi = alpha.angle();
    let d = c.acos();
    if d == 0.0 {
        vec![psi]
    } else {
        vec![psi - d, psi + d]
    }
}

impl<'a> ApexSweep<'a> {
    pub fn new(g: &'a Geodesic, source: usize, apex: usize, prev: usize, next: usize) -> Self {
        let w = g.vertex(apex);
        let dw = g.gm.d(apex, source);
        let scale = g.domain.tolerance().scale;
        let tiny = 1e-10 * (1.0 + scale);
        let cands = (0..g.n())
            .map(|u| {
                if u == apex {
                    return None;
                }
                let c = g.vertex(u) - w;
                let k = dw - g.gm.d(u, source);
                let cn = c.norm();
                // A vertex whose own path runs through the apex never wins.
                if cn + k <= tiny {
                    return None;
                }
                Some(Cand {
                    c,
                    k,
                    numer: (cn - k) * (cn + k),
                    at_zero: cn - k <= tiny,
                    toward: g.vertex(g.gm.pred(source, u)),
                })
            })
            .collect();
        let edges = g
            .vis
            .edges
            .iter()
            .map(|e| {
                let d = e.seg.b - e.seg.a;
                let n = Point::new(-d.y, d.x) * (1.0 / d.norm());
                EdgeLine {
                    a: e.seg.a,
                    b: e.seg.b,
                    n,
                    h: n.dot(e.seg.a - w),
                    incident: e.from == apex || e.to == apex,
                }
            })
            .collect();
        let lo = (g.vertex(next) - w).angle();
        let mut hi = (g.vertex(prev) - w).angle();
        while hi <= lo {
            hi += TAU;
        }
        let mut sw = ApexSweep {
            g,
            w,
            dw,
            cands,
            edges,
            base: Vec::new(),
            lo,
            hi,
        };
        let mut base = Vec::new();
        for u in 0..g.n() {
            if u != apex {
                let d = g.vertex(u) - w;
                base.push(sw.unwrap(d.angle()));
                base.push(sw.unwrap(d.angle() + std::f64::consts::PI));
            }
        }
        base.retain(|&t| t > lo && t < sw.hi);
        base.sort_by(f64::total_cmp);
        base.dedup();
        sw.base = base;
        sw
    }

    fn unwrap(&self, t: f64) -> f64 {
        self.lo + (t - self.lo).rem_euclid(TAU)
    }

    /// Distance along the ray to the first obstacle edge.
    fn ray_cast(&self, e: Point) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, ed) in self.edges.iter().enumerate() {
            if ed.incident {
                continue;
            }
            let d = ed.b - ed.a;
            let den = e.cross(d);
            if den == 0.0 {
                continue;
            }
            let aw = ed.a - self.w;
            let rho = aw.cross(d) / den;
            let t = aw.cross(e) / den;
            if rho > 0.0 && (0.0..=1.0).contains(&t) && rho < best.0 {
                best = (rho, i);
            }
        }
        best
    }

    fn rho0(c: &Cand, e: Point) -> Option<f64> {
        let den = 2.0 * (e.dot(c.c) + c.k);
        if den <= 0.0 {
            return None;
        }
        let r = c.numer / den;
        (r > 0.0).then_some(r)
    }

    /// Far boundary of the apex region along direction `theta`.
    pub fn eval(&self, theta: f64) -> (Far, f64) {
        let e = Point::from_angle(theta);
        let (rho_obs, edge) = self.ray_cast(e);
        let mut list: Vec<(f64, usize)> = Vec::new();
        for (u, c) in self.cands.iter().enumerate() {
            let Some(c) = c else { continue };
            if c.at_zero {
                let eps = 1e-6 * rho_obs.min(c.c.norm());
                let q = self.w + e * eps;
                if self.g.sees(q, self.w + c.c) {
                    return (Far::Empty, 0.0);
                }
                continue;
            }
            if let Some(r) = Self::rho0(c, e) {
                if r < rho_obs {
                    list.push((r, u));
                }
            }
        }
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (r, u) in list {
            let q = self.w + e * r;
            if self.g.sees(q, self.g.vertex(u)) {
                return (Far::Bisector(u), r);
            }
        }
        (Far::Edge(edge), rho_obs)
    }

    /// Directions where the bisector of `c` meets the line through `p`
    /// and `q`, which is where visibility along it can change.
    fn bisector_line(&self, c: &Cand, p: Point, q: Point) -> Vec<f64> {
        let d = q - p;
        let len = d.norm();
        if len == 0.0 {
            return Vec::new();
        }
        let n = Point::new(-d.y, d.x) * (1.0 / len);
        let h = n.dot(p - self.w);
        solve_dir(c.c * (2.0 * h) - n * c.numer, -2.0 * h * c.k)
    }

    /// Directions inside `(lo, hi)` where the far boundary could change.
    fn events(&self, far: Far, lo: f64, hi: f64) -> Vec<f64> {
        let mut ev: Vec<f64> = Vec::new();
        let mut push = |ts: Vec<f64>| {
            for t in ts {
                let t = self.unwrap(t);
                if t > lo && t < hi {
                    ev.push(t);
                }
            }
        };
        // A vertex and the vertex behind it on its path have bisectors that
        // touch tangentially along the line through both; that touching
        // point is found here as a simple crossing.
        for c in self.cands.iter().flatten() {
            if !c.at_zero {
                push(self.bisector_line(c, self.w + c.c, c.toward));
            }
        }
        match far {
            Far::Empty => {}
            Far::Bisector(u) => {
                let cu = self.cands[u].unwrap();
                let pu = self.w + cu.c;
                for x in 0..self.g.n() {
                    let px = self.g.vertex(x);
                    if px != pu && px != self.w {
                        push(self.bisector_line(&cu, pu, px));
                    }
                }
                for (v, c) in self.cands.iter().enumerate() {
                    let Some(c) = c else { continue };
                    if v == u || c.at_zero {
                        continue;
                    }
                    let alpha = c.c * cu.numer - cu.c * c.numer;
                    push(solve_dir(alpha, c.numer * cu.k - cu.numer * c.k));
                }
                for ed in &self.edges {
                    if !ed.incident {
                        let alpha = cu.c * (2.0 * ed.h) - ed.n * cu.numer;
                        push(solve_dir(alpha, -2.0 * ed.h * cu.k));
                    }
                }
            }
            Far::Edge(i) => {
                let ed = self.edges[i];
                for c in self.cands.iter().flatten() {
                    if !c.at_zero {
                        let alpha = c.c * (2.0 * ed.h) - ed.n * c.numer;
                        push(solve_dir(alpha, -2.0 * ed.h * c.k));
                    }
                }
            }
        }
        let i0 = self.base.partition_point(|&t| t <= lo);
        let i1 = self.base.partition_point(|&t| t < hi);
        ev.extend_from_slice(&self.base[i0..i1]);
        ev.sort_by(f64::total_cmp);
        ev.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        ev
    }

    fn sweep(&self, lo: f64, hi: f64, out: &mut Vec<Piece>, depth: usize) {
        let mid = 0.5 * (lo + hi);
        let (far, _) = self.eval(mid);
        if hi - lo < 1e-11 || depth > 200 {
            out.push(Piece { theta0: lo, theta1: hi, far });
            return;
        }
        let ev: Vec<f64> = self
            .events(far, lo, hi)
            .into_iter()
            .filter(|&t| t - lo > 1e-14 && hi - t > 1e-14)
            .collect();
        if !ev.is_empty() {
            let mut cuts = vec![lo];
            cuts.extend(ev);
            cuts.push(hi);
            for w in cuts.windows(2) {
                self.sweep(w[0], w[1], out, depth + 1);
            }
            return;
        }
        let span = hi - lo;
        let same = [0.25, 0.75]
            .iter()
            .all(|f| self.eval(lo + f * span).0 == far);
        if same {
            out.push(Piece { theta0: lo, theta1: hi, far });
        } else {
            self.sweep(lo, mid, out, depth + 1);
            self.sweep(mid, hi, out, depth + 1);
        }
    }

    /// Pieces of the apex region, merged and split to spans of at most π/2.
    pub fn run(&self) -> Vec<Piece> {
        let mut raw = Vec::new();
        self.sweep(self.lo, self.hi, &mut raw, 0);
        // Slivers come from curves that touch tangentially (a vertex and the
        // vertex behind it on its path); they are absorbed by a neighbour.
        const SLIVER: f64 = 1e-9;
        let mut merged: Vec<Piece> = Vec::new();
        for p in raw {
            match merged.last_mut() {
                Some(last) if last.far == p.far || p.theta1 - p.theta0 < SLIVER => {
                    last.theta1 = p.theta1
                }
                _ => merged.push(p),
            }
        }
        if merged.len() > 1 && merged[0].theta1 - merged[0].theta0 < SLIVER {
            merged[1].theta0 = merged[0].theta0;
            merged.remove(0);
        }
        let mut out = Vec::new();
        for p in merged {
            if p.far == Far::Empty {
                continue;
            }
            let k = ((p.theta1 - p.theta0) / FRAC_PI_2).ceil().max(1.0) as usize;
            for i in 0..k {
                out.push(Piece {
                    theta0: p.theta0 + (p.theta1 - p.theta0) * i as f64 / k as f64,
                    theta1: p.theta0 + (p.theta1 - p.theta0) * (i + 1) as f64 / k as f64,
                    far: p.far,
                });
            }
        }
        out
    }

    pub fn dw(&self) -> f64 {
        self.dw
    }
}
