use super::poly;
use super::{orient, segment_intersection_point, BBox, GeomError, Point, Segment};
use std::f64::consts::{PI, TAU};

/// Support of an additively weighted bisector: the points `p` with
/// `|p - a| + weight_a = |p - b| + weight_b`.
///
/// With fixed weights this is a single hyperbola branch (a line when the
/// weights are equal). It is parametrized in polar coordinates around
/// `focus_a`: at absolute direction `θ` the branch sits at radius
/// `ρ(α) = (c² - k²) / (2 (c cos α + k))`, `α = θ - φ`, where `c = |b - a|`,
/// `φ` is the direction of `b - a` and `k = weight_a - weight_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisector {
    pub focus_a: Point,
    pub focus_b: Point,
    pub weight_a: f64,
    pub weight_b: f64,
}

impl Bisector {
    pub fn new(focus_a: Point, weight_a: f64, focus_b: Point, weight_b: f64) -> Self {
        Bisector {
            focus_a,
            focus_b,
            weight_a,
            weight_b,
        }
    }

    fn c(&self) -> f64 {
        self.focus_a.dist(self.focus_b)
    }

    fn k(&self) -> f64 {
        self.weight_a - self.weight_b
    }

    fn phi(&self) -> f64 {
        (self.focus_b - self.focus_a).angle()
    }

    /// `c² - k²`; positive exactly when the support is a proper curve.
    fn numer(&self) -> f64 {
        let c = self.c();
        let k = self.k();
        (c - k) * (c + k)
    }

    pub fn is_proper(&self) -> bool {
        self.numer() > 0.0
    }

    /// Sign tag of the branch: which focus the branch bends around.
    pub fn branch_sign(&self) -> i32 {
        let d = self.weight_b - self.weight_a;
        if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Signed residual of the defining equation.
    pub fn residual(&self, p: Point) -> f64 {
        p.dist(self.focus_a) + self.weight_a - p.dist(self.focus_b) - self.weight_b
    }

    /// Half-width of the open angular window (around `φ`) in which the
    /// branch is visible from `focus_a`.
    pub fn alpha_max(&self) -> f64 {
        let c = self.c();
        (-self.k() / c).clamp(-1.0, 1.0).acos()
    }

    /// Radius of the branch along absolute direction `theta` from `focus_a`.
    pub fn rho(&self, theta: f64) -> Option<f64> {
        let c = self.c();
        let k = self.k();
        let den = 2.0 * (c * (theta - self.phi()).cos() + k);
        let num = self.numer();
        if num <= 0.0 || den <= 0.0 {
            return None;
        }
        Some(num / den)
    }

    pub fn point_at(&self, theta: f64) -> Option<Point> {
        self.rho(theta)
            .map(|r| self.focus_a + Point::from_angle(theta) * r)
    }

    /// Absolute direction (from `focus_a`) of a point on the branch,
    /// unwrapped into `(φ - π, φ + π]`.
    pub fn theta_of(&self, p: Point) -> f64 {
        let phi = self.phi();
        let a = (p - self.focus_a).angle() - phi;
        phi + wrap_pi(a)
    }

    /// Whether two supports describe the same curve.
    pub fn same_support(&self, o: &Bisector, tol: f64) -> bool {
        let direct = self.focus_a == o.focus_a
            && self.focus_b == o.focus_b
            && ((self.weight_b - self.weight_a) - (o.weight_b - o.weight_a)).abs() <= tol;
        let swapped = self.focus_a == o.focus_b
            && self.focus_b == o.focus_a
            && ((self.weight_b - self.weight_a) + (o.weight_b - o.weight_a)).abs() <= tol;
        direct || swapped
    }

    /// Parameters `t` at which the line `o + t d` meets this branch.
    pub fn line_params(&self, o: Point, d: Point) -> Vec<f64> {
        let (a, b) = (self.focus_a, self.focus_b);
        let delta = self.weight_b - self.weight_a;
        let l0 = o.dist(a).powi(2) - o.dist(b).powi(2) - delta * delta;
        let l1 = 2.0 * d.dot(b - a);
        let ob = o - b;
        let cand = if delta == 0.0 {
            if l1 == 0.0 {
                Vec::new()
            } else {
                vec![-l0 / l1]
            }
        } else {
            let d2 = d.dot(d);
            let qa = l1 * l1 - 4.0 * delta * delta * d2;
            let qb = 2.0 * l0 * l1 - 8.0 * delta * delta * d.dot(ob);
            let qc = l0 * l0 - 4.0 * delta * delta * ob.dot(ob);
            poly::solve_quadratic(qa, qb, qc)
        };
        let scale = 1.0 + a.dist(b) + o.norm() + delta.abs();
        let mut found: Vec<(f64, f64)> = Vec::new();
        for t in cand {
            let t = self.polish_line(o, d, t);
            let res = self.residual(o + d * t).abs();
            if res <= 1e-7 * scale {
                found.push((t, res));
            }
        }
        found.sort_by(|x, y| x.0.total_cmp(&y.0));
        // Near-double roots of the squared equation come out as a close
        // pair of which only one is accurate.
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (t, res) in found {
            match out.last_mut() {
                Some(last) if (t - last.0).abs() <= 1e-6 * (1.0 + t.abs()) * d.norm().recip().min(1.0) => {
                    if res < last.1 {
                        *last = (t, res);
                    }
                }
                _ => out.push((t, res)),
            }
        }
        out.into_iter().map(|x| x.0).collect()
    }

    fn polish_line(&self, o: Point, d: Point, mut t: f64) -> f64 {
        for _ in 0..3 {
            let p = o + d * t;
            let ra = p.dist(self.focus_a);
            let rb = p.dist(self.focus_b);
            if ra == 0.0 || rb == 0.0 {
                break;
            }
            let g = ra + self.weight_a - rb - self.weight_b;
            let dg = d.dot(p - self.focus_a) / ra - d.dot(p - self.focus_b) / rb;
            if dg.abs() < 1e-300 {
                break;
            }
            let nt = t - g / dg;
            if !nt.is_finite() {
                break;
            }
            let np = o + d * nt;
            if self.residual(np).abs() <= g.abs() {
                t = nt;
            } else {
                break;
            }
        }
        t
    }

    /// Absolute directions (from `focus_a`) in `(θ0, θ1)` where the branch
    /// has a vertical tangent.
    pub fn vertical_tangents(&self, t0: f64, t1: f64) -> Vec<f64> {
        let k = self.k();
        if k == 0.0 {
            return Vec::new();
        }
        let v = -self.c() * self.phi().sin() / k;
        angles_with_sin(v, t0, t1)
    }

    /// Absolute directions in `(θ0, θ1)` with a horizontal tangent.
    pub fn horizontal_tangents(&self, t0: f64, t1: f64) -> Vec<f64> {
        let k = self.k();
        if k == 0.0 {
            return Vec::new();
        }
        let v = -self.c() * self.phi().cos() / k;
        // cos θ = v  ⇔  sin(θ + π/2) = v
        angles_with_sin(v, t0 + PI / 2.0, t1 + PI / 2.0)
            .into_iter()
            .map(|a| a - PI / 2.0)
            .collect()
    }

    /// Directions `θ` in `[θ0, θ1]` (absolute, around `focus_a`) where this
    /// branch meets the branch `other`.
    pub fn meet_support(&self, other: &Bisector, t0: f64, t1: f64) -> Vec<f64> {
        let phi = self.phi();
        let (sp, cp) = phi.sin_cos();
        let rot = |v: Point| Point::new(v.x * cp + v.y * sp, -v.x * sp + v.y * cp);
        let c1 = self.c();
        let k1 = self.k();
        let n1 = self.numer();
        let delta2 = other.weight_b - other.weight_a;
        let a1 = self.focus_a;
        let l0 = a1.dist(other.focus_a).powi(2) - a1.dist(other.focus_b).powi(2) - delta2 * delta2;
        let g = rot((other.focus_b - other.focus_a) * 2.0);
        let h = rot(a1 - other.focus_b);
        let h2 = a1.dist(other.focus_b).powi(2);
        // Linear forms a + b cos α + c sin α, mapped to quadratics in s = tan(α/2)
        // over (1 + s²).
        let lin = |a: f64, b: f64, c: f64| vec![a + b, 2.0 * c, a - b];
        let q_d = lin(k1, c1, 0.0);
        let q_t1 = lin(2.0 * k1 * l0, 2.0 * c1 * l0 + n1 * g.x, n1 * g.y);
        let q_h = lin(0.0, h.x, h.y);
        let one_s2 = vec![1.0, 0.0, 1.0];
        let p = if delta2 == 0.0 {
            q_t1
        } else {
            let mut rhs = poly::mul(&q_d, &q_d);
            rhs = rhs.iter().map(|v| v * 4.0 * h2).collect();
            rhs = poly::axpy(&rhs, 4.0 * n1, &poly::mul(&q_d, &q_h));
            rhs = poly::axpy(&rhs, n1 * n1, &poly::mul(&one_s2, &one_s2));
            poly::axpy(&poly::mul(&q_t1, &q_t1), -4.0 * delta2 * delta2, &rhs)
        };
        let amax = self.alpha_max();
        let lo = wrap_pi(t0 - phi).max(-amax);
        let hi = (lo + (t1 - t0)).min(amax);
        if hi <= lo {
            return Vec::new();
        }
        let s_lo = (0.5 * lo).tan();
        let s_hi = (0.5 * hi).tan();
        let scale = 1.0 + c1 + other.focus_a.dist(other.focus_b) + a1.dist(other.focus_a);
        let mut found: Vec<(f64, f64)> = Vec::new();
        for s in poly::real_roots(&p, s_lo, s_hi) {
            let Some(theta) = self.settle_meet(other, self.polish_meet(other, phi + 2.0 * s.atan()), scale)
            else {
                continue;
            };
            if let Some(q) = self.point_at(theta) {
                let res = other.residual(q).abs();
                if res <= 1e-7 * scale {
                    found.push((theta - phi + (t0 - wrap_pi(t0 - phi)), res));
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Near-tangential contacts show up as clustered roots; keep the best.
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (t, r) in found {
            match out.last_mut() {
                Some(last) if (t - last.0).abs() <= 1e-6 => {
                    if r < last.1 {
                        *last = (t, r);
                    }
                }
                _ => out.push((t, r)),
            }
        }
        out.into_iter().map(|(t, _)| t).collect()
    }

    /// A root with a visible residual is either a crossing the polish could
    /// not resolve or a near miss of the two curves. Bisects to the sign
    /// change in the first case and rejects the second.
    fn settle_meet(&self, other: &Bisector, theta: f64, scale: f64) -> Option<f64> {
        let f = |t: f64| self.point_at(t).map(|p| other.residual(p));
        let g = f(theta)?;
        if g.abs() <= 1e-11 * scale {
            return Some(theta);
        }
        let mut h = 1e-9;
        while h <= 1e-3 {
            for end in [theta - h, theta + h] {
                if let Some(ge) = f(end) {
                    if (ge < 0.0) != (g < 0.0) {
                        let (mut a, mut b) = (theta, end);
                        for _ in 0..100 {
                            let m = 0.5 * (a + b);
                            match f(m) {
                                Some(gm) if (gm < 0.0) == (g < 0.0) => a = m,
                                Some(_) => b = m,
                                None => break,
                            }
                        }
                        let (ga, gb) = (f(a)?.abs(), f(b)?.abs());
                        return Some(if ga <= gb { a } else { b });
                    }
                }
            }
            h *= 10.0;
        }
        None
    }

    fn polish_meet(&self, other: &Bisector, mut theta: f64) -> f64 {
        let f = |t: f64| self.point_at(t).map(|p| other.residual(p));
        for _ in 0..4 {
            let Some(g) = f(theta) else { break };
            let h = 1e-7 * (1.0 + theta.abs());
            let (Some(gp), Some(gm)) = (f(theta + h), f(theta - h)) else {
                break;
            };
            let dg = (gp - gm) / (2.0 * h);
            if dg.abs() < 1e-300 {
                break;
            }
            let nt = theta - g / dg;
            match f(nt) {
                Some(ng) if ng.abs() < g.abs() => theta = nt,
                _ => break,
            }
        }
        theta
    }
}

fn wrap_pi(a: f64) -> f64 {
    let mut t = (a + PI).rem_euclid(TAU) - PI;
    if t <= -PI {
        t += TAU;
    }
    t
}

/// Angles θ in the open interval `(t0, t1)` with `sin θ = v`.
fn angles_with_sin(v: f64, t0: f64, t1: f64) -> Vec<f64> {
    if !(-1.0..=1.0).contains(&v) {
        return Vec::new();
    }
    let base = [v.asin(), PI - v.asin()];
    let mut out = Vec::new();
    for b in base {
        let mut t = t0 + (b - t0).rem_euclid(TAU);
        while t < t1 {
            if t > t0 {
                out.push(t);
            }
            t += TAU;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    out
}

/// Whether absolute angle `theta` lies in `[t0, t1]`, modulo 2π.
pub(crate) fn angle_in(theta: f64, t0: f64, t1: f64, eps: f64) -> bool {
    let d = (theta - t0).rem_euclid(TAU);
    d <= (t1 - t0) + eps || d >= TAU - eps
}

/// A boundary curve: a segment or a connected piece of a weighted bisector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConicArc {
    Segment(Segment),
    /// Piece of the branch between absolute directions `theta0 < theta1`
    /// around `support.focus_a`.
    Hyperbola {
        support: Bisector,
        theta0: f64,
        theta1: f64,
    },
}

impl ConicArc {
    pub fn segment(a: Point, b: Point) -> Self {
        ConicArc::Segment(Segment::new(a, b))
    }

    /// Builds the piece of the bisector support between two points on it.
    /// Equal weights give a straight segment.
    pub fn hyperbola(support: Bisector, p: Point, q: Point) -> Result<Self, GeomError> {
        if support.weight_a == support.weight_b {
            return Ok(ConicArc::segment(p, q));
        }
        if !support.is_proper() {
            return Err(GeomError::Degenerate("bisector support is not a curve"));
        }
        let a = support.theta_of(p);
        let b = support.theta_of(q);
        let (theta0, theta1) = if a <= b { (a, b) } else { (b, a) };
        Ok(ConicArc::Hyperbola {
            support,
            theta0,
            theta1,
        })
    }

    /// Piece of the bisector support between two absolute directions.
    pub fn hyperbola_between(support: Bisector, theta0: f64, theta1: f64) -> Self {
        if support.weight_a == support.weight_b {
            let p = support.point_at(theta0).unwrap_or(support.focus_a);
            let q = support.point_at(theta1).unwrap_or(support.focus_a);
            return ConicArc::segment(p, q);
        }
        ConicArc::Hyperbola {
            support,
            theta0: theta0.min(theta1),
            theta1: theta0.max(theta1),
        }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        match *self {
            ConicArc::Segment(s) => (s.a, s.b),
            ConicArc::Hyperbola {
                support,
                theta0,
                theta1,
            } => (
                support.point_at(theta0).unwrap_or(support.focus_a),
                support.point_at(theta1).unwrap_or(support.focus_a),
            ),
        }
    }

    /// Signed residual of the defining equation at `p` (distance to the
    /// supporting line for segments).
    pub fn residual(&self, p: Point) -> f64 {
        match *self {
            ConicArc::Segment(s) => {
                let d = s.b - s.a;
                let l = d.norm();
                if l == 0.0 {
                    p.dist(s.a)
                } else {
                    d.cross(p - s.a) / l
                }
            }
            ConicArc::Hyperbola { support, .. } => support.residual(p),
        }
    }

    /// Splits at points of vertical tangency into x-monotone pieces.
    pub fn x_monotone_pieces(&self) -> Vec<XArc> {
        match *self {
            ConicArc::Segment(s) => vec![XArc::seg(s.a, s.b)],
            ConicArc::Hyperbola {
                support,
                theta0,
                theta1,
            } => {
                let mut cuts = vec![theta0];
                cuts.extend(support.vertical_tangents(theta0, theta1));
                cuts.push(theta1);
                cuts.windows(2)
                    .filter(|w| w[1] > w[0])
                    .map(|w| XArc::hyp(support, w[0], w[1]))
                    .collect()
            }
        }
    }

    /// Dense polyline approximation (for drawing and quadrature oracles).
    pub fn polyline(&self, n: usize) -> Vec<Point> {
        match *self {
            ConicArc::Segment(s) => vec![s.a, s.b],
            ConicArc::Hyperbola {
                support,
                theta0,
                theta1,
            } => (0..=n)
                .filter_map(|i| {
                    support.point_at(theta0 + (theta1 - theta0) * i as f64 / n as f64)
                })
                .collect(),
        }
    }
}

/// All y with `(x, y)` on the arc, ascending.
pub fn arc_x_intersections(arc: &ConicArc, x: f64) -> Vec<f64> {
    let mut ys: Vec<f64> = arc
        .x_monotone_pieces()
        .iter()
        .flat_map(|p| p.ys_at(x))
        .collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    ys
}

/// Result of intersecting two arcs.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcIntersection {
    Points(Vec<Point>),
    /// Collinear segments sharing a sub-segment of positive length.
    Overlap(Segment),
}

/// Transversal intersection points of two arcs.
pub fn arc_arc_intersections(
    a1: &ConicArc,
    a2: &ConicArc,
) -> Result<ArcIntersection, GeomError> {
    match (a1, a2) {
        (ConicArc::Segment(s), ConicArc::Segment(t)) => Ok(segment_pair(s, t)),
        (ConicArc::Segment(s), h @ ConicArc::Hyperbola { .. })
        | (h @ ConicArc::Hyperbola { .. }, ConicArc::Segment(s)) => {
            Ok(ArcIntersection::Points(segment_hyperbola(s, h)))
        }
        (
            ConicArc::Hyperbola {
                support: b1,
                theta0: s0,
                theta1: s1,
            },
            ConicArc::Hyperbola {
                support: b2,
                theta0: u0,
                theta1: u1,
            },
        ) => {
            let tol = 1e-12 * (1.0 + b1.c() + b1.weight_a.abs() + b1.weight_b.abs());
            if b1.same_support(b2, tol) {
                return Err(GeomError::OverlapUnsupported);
            }
            let pts = b1
                .meet_support(b2, *s0, *s1)
                .into_iter()
                .filter_map(|t| b1.point_at(t))
                .filter(|&p| angle_in(b2.theta_of(p), *u0, *u1, 1e-9))
                .collect();
            Ok(ArcIntersection::Points(pts))
        }
    }
}

fn segment_pair(s: &Segment, t: &Segment) -> ArcIntersection {
    if orient(s.a, s.b, t.a) == 0 && orient(s.a, s.b, t.b) == 0 {
        let d = s.b - s.a;
        let d = if d.norm() == 0.0 { t.b - t.a } else { d };
        let key = |p: Point| (p - s.a).dot(d);
        let mut pts = [(key(s.a), s.a), (key(s.b), s.b), (key(t.a), t.a), (key(t.b), t.b)];
        let (s_lo, s_hi) = (key(s.a).min(key(s.b)), key(s.a).max(key(s.b)));
        let (t_lo, t_hi) = (key(t.a).min(key(t.b)), key(t.a).max(key(t.b)));
        let lo = s_lo.max(t_lo);
        let hi = s_hi.min(t_hi);
        if lo > hi {
            return ArcIntersection::Points(Vec::new());
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let p_lo = pts.iter().find(|p| p.0 == lo).map(|p| p.1).unwrap_or(s.a);
        let p_hi = pts.iter().find(|p| p.0 == hi).map(|p| p.1).unwrap_or(s.b);
        if lo == hi {
            return ArcIntersection::Points(vec![p_lo]);
        }
        return ArcIntersection::Overlap(Segment::new(p_lo, p_hi));
    }
    ArcIntersection::Points(segment_intersection_point(s, t).into_iter().collect())
}

fn segment_hyperbola(s: &Segment, h: &ConicArc) -> Vec<Point> {
    let ConicArc::Hyperbola {
        support,
        theta0,
        theta1,
    } = *h
    else {
        return Vec::new();
    };
    let d = s.b - s.a;
    support
        .line_params(s.a, d)
        .into_iter()
        .filter(|&t| (-1e-12..=1.0 + 1e-12).contains(&t))
        .map(|t| s.at(t.clamp(0.0, 1.0)))
        .filter(|&p| angle_in(support.theta_of(p), theta0, theta1, 1e-9))
        .collect()
}

/// An x-monotone boundary piece, as used by vertical decompositions.
///
/// `left` is lexicographically smallest. Vertical segments are allowed and
/// flagged by `is_vertical`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XArc {
    Seg {
        left: Point,
        right: Point,
    },
    Hyp {
        support: Bisector,
        theta0: f64,
        theta1: f64,
        left: Point,
        right: Point,
    },
}

impl XArc {
    pub fn seg(a: Point, b: Point) -> Self {
        if a.lex_cmp(b).is_le() {
            XArc::Seg { left: a, right: b }
        } else {
            XArc::Seg { left: b, right: a }
        }
    }

    pub fn hyp(support: Bisector, theta0: f64, theta1: f64) -> Self {
        let p = support.point_at(theta0).unwrap_or(support.focus_a);
        let q = support.point_at(theta1).unwrap_or(support.focus_a);
        let (left, right) = if p.lex_cmp(q).is_le() { (p, q) } else { (q, p) };
        XArc::Hyp {
            support,
            theta0,
            theta1,
            left,
            right,
        }
    }

    pub fn left(&self) -> Point {
        match *self {
            XArc::Seg { left, .. } | XArc::Hyp { left, .. } => left,
        }
    }

    pub fn right(&self) -> Point {
        match *self {
            XArc::Seg { right, .. } | XArc::Hyp { right, .. } => right,
        }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(*self, XArc::Seg { left, right } if left.x == right.x)
    }

    pub fn x_lo(&self) -> f64 {
        self.left().x
    }

    pub fn x_hi(&self) -> f64 {
        self.right().x
    }

    /// The y-value of the piece at `x`, clamped into the piece's x-range.
    /// Undefined (returns the lower endpoint) for vertical segments.
    pub fn y_at(&self, x: f64) -> f64 {
        match *self {
            XArc::Seg { left, right } => {
                if right.x == left.x {
                    return left.y.min(right.y);
                }
                if x <= left.x {
                    return left.y;
                }
                if x >= right.x {
                    return right.y;
                }
                let t = (x - left.x) / (right.x - left.x);
                left.y + t * (right.y - left.y)
            }
            XArc::Hyp {
                support,
                theta0,
                theta1,
                left,
                right,
            } => {
                if x <= left.x {
                    return left.y;
                }
                if x >= right.x {
                    return right.y;
                }
                let o = Point::new(x, 0.5 * (left.y + right.y));
                let d = Point::new(0.0, 1.0);
                let mut best: Option<(f64, f64, f64)> = None;
                for t in support.line_params(o, d) {
                    let p = o + d * t;
                    let th = support.theta_of(p);
                    let dev = angle_dev(th, theta0, theta1);
                    let res = support.residual(p).abs();
                    if best.is_none_or(|b| (dev, res) < (b.0, b.1)) {
                        best = Some((dev, res, p.y));
                    }
                }
                match best {
                    Some((dev, _, y)) if dev <= 1e-9 => y,
                    _ => self.y_by_bisection(x),
                }
            }
        }
    }

    fn y_by_bisection(&self, x: f64) -> f64 {
        let XArc::Hyp {
            support,
            theta0,
            theta1,
            ..
        } = *self
        else {
            return self.y_at(x);
        };
        let xf = |t: f64| support.point_at(t).map_or(support.focus_a.x, |p| p.x);
        let (mut a, mut b) = (theta0, theta1);
        let increasing = xf(b) >= xf(a);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            let left_side = (xf(m) < x) == increasing;
            if left_side {
                a = m;
            } else {
                b = m;
            }
        }
        support
            .point_at(0.5 * (a + b))
            .map_or(support.focus_a.y, |p| p.y)
    }

    /// All y-values of the piece on the vertical line at `x` (both ends of
    /// a vertical segment).
    pub fn ys_at(&self, x: f64) -> Vec<f64> {
        let (l, r) = (self.left(), self.right());
        if x < l.x || x > r.x {
            return Vec::new();
        }
        if self.is_vertical() {
            return vec![l.y.min(r.y), l.y.max(r.y)];
        }
        vec![self.y_at(x)]
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::of_points([self.left(), self.right()]);
        if let XArc::Hyp {
            support,
            theta0,
            theta1,
            ..
        } = *self
        {
            for t in support.horizontal_tangents(theta0, theta1) {
                if let Some(p) = support.point_at(t) {
                    b.add(p);
                }
            }
        }
        b
    }

    /// Point on the piece at parameter `u ∈ [0, 1]` (angle or length).
    pub fn point_at(&self, u: f64) -> Point {
        match *self {
            XArc::Seg { left, right } => left.lerp(right, u),
            XArc::Hyp {
                support,
                theta0,
                theta1,
                ..
            } => support
                .point_at(theta0 + (theta1 - theta0) * u)
                .unwrap_or(support.focus_a),
        }
    }

    pub fn to_conic(&self) -> ConicArc {
        match *self {
            XArc::Seg { left, right } => ConicArc::segment(left, right),
            XArc::Hyp {
                support,
                theta0,
                theta1,
                ..
            } => ConicArc::Hyperbola {
                support,
                theta0,
                theta1,
            },
        }
    }

    /// Whether both pieces lie on one common curve.
    pub fn same_support(&self, o: &XArc, tol: f64) -> bool {
        match (self, o) {
            (XArc::Seg { left, right }, XArc::Seg { left: l2, right: r2 }) => {
                orient(*left, *right, *l2) == 0 && orient(*left, *right, *r2) == 0
            }
            (XArc::Hyp { support: s1, .. }, XArc::Hyp { support: s2, .. }) => {
                s1.same_support(s2, tol)
            }
            _ => false,
        }
    }

    /// Transversal crossing points of two pieces; pieces on a common support
    /// report no points (their endpoints carry the events).
    pub fn crossings(&self, o: &XArc, tol: f64) -> Vec<Point> {
        if self.same_support(o, tol) {
            return Vec::new();
        }
        let bx = self.bbox();
        if !bx.overlaps(&o.bbox(), tol) {
            return Vec::new();
        }
        match arc_arc_intersections(&self.to_conic(), &o.to_conic()) {
            Ok(ArcIntersection::Points(p)) => p,
            _ => Vec::new(),
        }
    }
}

fn angle_dev(th: f64, t0: f64, t1: f64) -> f64 {
    let d = (th - t0).rem_euclid(TAU);
    let span = t1 - t0;
    if d <= span {
        0.0
    } else {
        (d - span).min(TAU - d)
    }
}
