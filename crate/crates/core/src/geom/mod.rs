//! Points, segments, conic arcs and the predicates the rest of the crate
//! builds on.

mod arc;
mod cell;
pub mod poly;

pub use arc::{
    arc_arc_intersections, arc_x_intersections, ArcIntersection, Bisector, ConicArc, XArc,
};
pub use cell::{pieces_contain, TarskiCell};
pub(crate) use cell::integrate;

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("arcs share an identical hyperbola support; perturb before intersecting")]
    OverlapUnsupported,
    #[error("degenerate arc: {0}")]
    Degenerate(&'static str),
}

/// A point in the plane. Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c, s)
    }

    /// Lexicographic (x, then y) comparison; the symbolic shear used wherever
    /// a pure x comparison could tie on vertical features.
    pub fn lex_cmp(self, o: Point) -> std::cmp::Ordering {
        self.x
            .total_cmp(&o.x)
            .then_with(|| self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// Distance from `p` to the closed segment.
    pub fn dist_to(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let l2 = d.dot(d);
        if l2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / l2).clamp(0.0, 1.0);
        p.dist(self.at(t))
    }

    /// True when `p` lies on the closed segment, decided exactly.
    pub fn contains_point(&self, p: Point) -> bool {
        orient(self.a, self.b, p) == 0 && in_box(self.a, self.b, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Open,
    Closed,
}

/// Sign of the doubled signed area of triangle `abc`, computed with an
/// adaptive filtered-exact predicate.
pub fn orient(a: Point, b: Point, c: Point) -> i32 {
    let v = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn in_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Whether two segments meet. `Open` asks whether the relative interiors
/// share a point; `Closed` also counts endpoint contact.
pub fn segments_intersect(s1: &Segment, s2: &Segment, mode: Mode) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);
    if o1 == 0 && o2 == 0 {
        return collinear_overlap(s1, s2, mode);
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    match mode {
        Mode::Open => false,
        Mode::Closed => {
            (o1 == 0 && in_box(s1.a, s1.b, s2.a))
                || (o2 == 0 && in_box(s1.a, s1.b, s2.b))
                || (o3 == 0 && in_box(s2.a, s2.b, s1.a))
                || (o4 == 0 && in_box(s2.a, s2.b, s1.b))
        }
    }
}

fn collinear_overlap(s1: &Segment, s2: &Segment, mode: Mode) -> bool {
    // Project on the dominant axis of the common line.
    let d = s1.b - s1.a;
    let d = if d.x == 0.0 && d.y == 0.0 { s2.b - s2.a } else { d };
    let key = |p: Point| if d.x.abs() >= d.y.abs() { p.x } else { p.y };
    let (a0, a1) = minmax(key(s1.a), key(s1.b));
    let (b0, b1) = minmax(key(s2.a), key(s2.b));
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    match mode {
        Mode::Open => lo < hi,
        Mode::Closed => lo <= hi,
    }
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Intersection point of the supporting lines of two segments, when they
/// cross within both closed segments.
pub fn segment_intersection_point(s1: &Segment, s2: &Segment) -> Option<Point> {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let den = d1.cross(d2);
    if den == 0.0 {
        return None;
    }
    let t = (s2.a - s1.a).cross(d2) / den;
    let u = (s2.a - s1.a).cross(d1) / den;
    let eps = 1e-12;
    if t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps {
        return None;
    }
    Some(s1.at(t.clamp(0.0, 1.0)))
}

/// Tolerances derived from the extent of the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// On-curve membership for derived hyperbola points.
    pub curve: f64,
    /// Relative tolerance for distance comparisons.
    pub dist_rel: f64,
    pub scale: f64,
    /// Smallest feature (edge length) of the input, when known.
    pub feature: f64,
}

impl Tolerance {
    pub fn for_diameter(diam: f64) -> Self {
        Tolerance {
            curve: 1e-9 * (1.0 + diam),
            dist_rel: 1e-9,
            scale: diam.max(1e-300),
            feature: f64::INFINITY,
        }
    }

    /// Caps the absolute tolerances well below the smallest input feature.
    pub fn with_feature(mut self, feature: f64) -> Self {
        self.feature = feature;
        self.curve = self.curve.min(1e-3 * feature);
        self
    }

    /// Tolerance used for structural classification (containment, conflict).
    /// Tighter than `curve` so that misclassified slivers stay far below the
    /// 1e-9 relative distance budget.
    pub fn geom(&self) -> f64 {
        (1e-11 * (1.0 + self.scale)).min(1e-5 * self.feature)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn empty() -> Self {
        BBox {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn of_points<I: IntoIterator<Item = Point>>(pts: I) -> Self {
        let mut b = BBox::empty();
        for p in pts {
            b.add(p);
        }
        b
    }

    pub fn add(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &BBox) -> BBox {
        let mut b = *self;
        b.add(o.min);
        b.add(o.max);
        b
    }

    pub fn inflate(&self, d: f64) -> BBox {
        BBox {
            min: Point::new(self.min.x - d, self.min.y - d),
            max: Point::new(self.max.x + d, self.max.y + d),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn overlaps(&self, o: &BBox, pad: f64) -> bool {
        self.min.x <= o.max.x + pad
            && o.min.x <= self.max.x + pad
            && self.min.y <= o.max.y + pad
            && o.min.y <= self.max.y + pad
    }

    pub fn contains_box(&self, o: &BBox, pad: f64) -> bool {
        self.min.x <= o.min.x + pad
            && self.min.y <= o.min.y + pad
            && self.max.x >= o.max.x - pad
            && self.max.y >= o.max.y - pad
    }

    pub fn contains(&self, p: Point, pad: f64) -> bool {
        p.x >= self.min.x - pad
            && p.x <= self.max.x + pad
            && p.y >= self.min.y - pad
            && p.y <= self.max.y + pad
    }
}

/// Area of a simple polygon (positive when counterclockwise).
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let Some(&o) = ring.first() else { return 0.0 };
    // Relative to the first vertex, so small rings far from the origin keep
    // their sign.
    let mut s = 0.0;
    for i in 1..n.saturating_sub(1) {
        s += (ring[i] - o).cross(ring[i + 1] - o);
    }
    0.5 * s
}

/// Normalizes an angle into `[0, 2π)`.
pub fn norm_angle(a: f64) -> f64 {
    let t = a.rem_euclid(std::f64::consts::TAU);
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0., 1.)), 1);
        assert_eq!(orient(p(0., 0.), p(1., 1.), p(2., 2.)), 0);
        assert_eq!(orient(p(0., 0.), p(0., 1.), p(1., 0.)), -1);
    }

    #[test]
    fn orient_is_exact_near_degeneracy() {
        // Naive evaluation gets this wrong; the adaptive predicate does not.
        let a = p(0.5, 0.5);
        let b = p(12.0, 12.0);
        let c = p(24.0, 24.0);
        assert_eq!(orient(a, b, c), 0);
        let c2 = p(24.0, 24.0 + 4.0 * f64::EPSILON * 24.0);
        assert_eq!(orient(a, b, c2), 1);
    }

    #[test]
    fn segment_intersection_examples() {
        let s = |a: (f64, f64), b: (f64, f64)| Segment::new(p(a.0, a.1), p(b.0, b.1));
        assert!(segments_intersect(
            &s((0., 0.), (2., 2.)),
            &s((0., 2.), (2., 0.)),
            Mode::Open
        ));
        assert!(!segments_intersect(
            &s((0., 0.), (1., 0.)),
            &s((1., 0.), (2., 0.)),
            Mode::Open
        ));
        assert!(segments_intersect(
            &s((0., 0.), (1., 0.)),
            &s((1., 0.), (2., 0.)),
            Mode::Closed
        ));
        // T-junction: only closed contact.
        assert!(!segments_intersect(
            &s((0., 0.), (2., 0.)),
            &s((1., 0.), (1., 1.)),
            Mode::Open
        ));
        assert!(segments_intersect(
            &s((0., 0.), (2., 0.)),
            &s((1., 0.), (1., 1.)),
            Mode::Closed
        ));
        // Collinear overlap of positive length counts as open contact.
        assert!(segments_intersect(
            &s((0., 0.), (2., 0.)),
            &s((1., 0.), (3., 0.)),
            Mode::Open
        ));
    }

    proptest! {
        #[test]
        fn orient_antisymmetric(ax in -1e3f64..1e3, ay in -1e3f64..1e3,
                                bx in -1e3f64..1e3, by in -1e3f64..1e3,
                                cx in -1e3f64..1e3, cy in -1e3f64..1e3) {
            let (a, b, c) = (p(ax, ay), p(bx, by), p(cx, cy));
            let o = orient(a, b, c);
            prop_assert_eq!(orient(b, a, c), -o);
            prop_assert_eq!(orient(a, c, b), -o);
            prop_assert_eq!(orient(c, b, a), -o);
            prop_assert_eq!(orient(b, c, a), o);
        }
    }
}
