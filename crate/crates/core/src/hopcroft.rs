//! Point-on-line detection by shortest paths: every point becomes a tiny
//! square hole, and a line hits a point iff the geodesic between the line's
//! ends on the outer square is longer than the straight segment.

use crate::domain::{DomainError, PolygonalDomain};
use crate::geodesic::Answer;
use crate::geom::Point;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Above this `L` the holes get close to double precision.
pub const MAX_SAFE_L: i64 = 16;

#[derive(Debug, Error)]
pub enum HopcroftError {
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Integer points and lines `y = a x + b`, all bounded by `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopcroftInstance {
    #[serde(rename = "L")]
    pub l: i64,
    pub points: Vec<[i64; 2]>,
    pub lines: Vec<[i64; 2]>,
}

impl HopcroftInstance {
    /// Exact integer test: does line `i` pass through some point?
    pub fn line_hits(&self, i: usize) -> bool {
        let [a, b] = self.lines[i];
        self.points.iter().any(|&[x, y]| a * x + b == y)
    }

    /// `n` distinct points with coordinates in `[-(L-1), L-1]` and `lines`
    /// lines, about half of them through a point.
    pub fn random(seed: u64, n: usize, l: i64, lines: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = l - 1;
        let mut all: Vec<[i64; 2]> = (-m..=m).flat_map(|x| (-m..=m).map(move |y| [x, y])).collect();
        all.shuffle(&mut rng);
        let points: Vec<[i64; 2]> = all.into_iter().take(n).collect();
        let mut out = Vec::with_capacity(lines);
        while out.len() < lines {
            let a = rng.gen_range(-l..=l);
            let b = if rng.gen_bool(0.5) {
                let [x, y] = points[rng.gen_range(0..points.len())];
                y - a * x
            } else {
                rng.gen_range(-l..=l)
            };
            if b.abs() <= l {
                out.push([a, b]);
            }
        }
        HopcroftInstance { l, points, lines: out }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionDomain {
    pub domain: PolygonalDomain,
    /// Hole side `L⁻⁵ / 4`.
    pub side: f64,
    /// Per line, its ends on the outer square, or `None` when it meets the
    /// square in at most one point.
    pub queries: Vec<Option<(Point, Point)>>,
    pub precision_warning: bool,
}

pub fn hole_side(l: i64) -> f64 {
    (l as f64).powi(-5) / 4.0
}

/// Where `y = a x + b` crosses the square `[-L, L]²`.
pub fn clip_line(a: i64, b: i64, l: i64) -> Option<(Point, Point)> {
    let (af, bf, lf) = (a as f64, b as f64, l as f64);
    let (mut x0, mut x1) = (-lf, lf);
    if a == 0 {
        if b.abs() > l {
            return None;
        }
    } else {
        let (u, v) = ((-lf - bf) / af, (lf - bf) / af);
        x0 = x0.max(u.min(v));
        x1 = x1.min(u.max(v));
    }
    if x1 <= x0 {
        return None;
    }
    let y = |x: f64| (af * x + bf).clamp(-lf, lf);
    Some((Point::new(x0, y(x0)), Point::new(x1, y(x1))))
}

pub fn build_reduction(inst: &HopcroftInstance) -> Result<ReductionDomain, HopcroftError> {
    let l = inst.l;
    if l < 1 {
        return Err(HopcroftError::DegenerateInstance(format!("L = {l} must be positive")));
    }
    let mut seen = BTreeSet::new();
    for &[x, y] in &inst.points {
        if !seen.insert((x, y)) {
            return Err(HopcroftError::DegenerateInstance(format!("duplicate point ({x}, {y})")));
        }
        // A hole around a point on the square's border would cut the border.
        if x.abs() >= l || y.abs() >= l {
            return Err(HopcroftError::DegenerateInstance(format!(
                "point ({x}, {y}) is not strictly inside the square of side 2L = {}",
                2 * l
            )));
        }
    }
    for &[a, b] in &inst.lines {
        if a.abs() > l || b.abs() > l {
            return Err(HopcroftError::DegenerateInstance(format!("line ({a}, {b}) exceeds L = {l}")));
        }
    }
    let lf = l as f64;
    let side = hole_side(l);
    let h = 0.5 * side;
    let outer = vec![Point::new(-lf, -lf), Point::new(lf, -lf), Point::new(lf, lf), Point::new(-lf, lf)];
    let holes = inst
        .points
        .iter()
        .map(|&[x, y]| {
            let (x, y) = (x as f64, y as f64);
            vec![
                Point::new(x - h, y - h),
                Point::new(x - h, y + h),
                Point::new(x + h, y + h),
                Point::new(x + h, y - h),
            ]
        })
        .collect();
    let domain = PolygonalDomain::new(outer, holes);
    let v = domain.validate();
    if !v.is_empty() {
        return Err(DomainError::Invalid(v).into());
    }
    let queries = inst.lines.iter().map(|&[a, b]| clip_line(a, b, l)).collect();
    Ok(ReductionDomain { domain, side, queries, precision_warning: l > MAX_SAFE_L })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub line: usize,
    pub hit: bool,
    pub geodesic: f64,
    pub euclidean: f64,
    /// `geodesic - euclidean`, computed segment by segment without
    /// cancellation.
    pub excess: f64,
}

/// Length of `path` minus the distance between its ends. Each segment adds
/// `|e| - e·u = (e×u)² / (|e| + e·u)` for the unit direction `u` of the
/// chord, which keeps tiny detours visible.
pub fn path_excess(path: &[Point]) -> f64 {
    if path.len() <= 2 {
        return 0.0;
    }
    let (s, t) = (path[0], path[path.len() - 1]);
    let chord = t - s;
    let len = chord.norm();
    if len == 0.0 {
        return path.windows(2).map(|w| w[0].dist(w[1])).sum();
    }
    let u = chord * (1.0 / len);
    path.windows(2)
        .map(|w| {
            let e = w[1] - w[0];
            let (n, proj) = (e.norm(), e.dot(u));
            let perp = e.cross(u);
            if proj > 0.0 {
                perp * perp / (n + proj)
            } else {
                n - proj
            }
        })
        .sum()
}

/// Decides line `i` with `engine`. A hit is a geodesic that bends: its
/// excess over the chord is positive.
pub fn decide_line(
    rd: &ReductionDomain,
    i: usize,
    engine: impl Fn(Point, Point) -> Result<Answer, DomainError>,
) -> Result<Decision, DomainError> {
    let Some((s, t)) = rd.queries[i] else {
        return Ok(Decision { line: i, hit: false, geodesic: 0.0, euclidean: 0.0, excess: 0.0 });
    };
    let a = engine(s, t)?;
    let excess = path_excess(&a.path);
    Ok(Decision { line: i, hit: excess > 0.0, geodesic: a.distance, euclidean: s.dist(t), excess })
}
