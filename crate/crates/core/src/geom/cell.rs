use super::{BBox, ConicArc, Point, XArc};

/// A region bounded by a few segment or hyperbola pieces in cyclic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TarskiCell {
    pub arcs: Vec<ConicArc>,
    pub interior_sample: Point,
}

/// Orients each arc so that consecutive pieces chain head to tail.
fn chained(arcs: &[ConicArc]) -> Vec<(Point, Point, ConicArc, bool)> {
    let mut out = Vec::with_capacity(arcs.len());
    let mut prev: Option<Point> = None;
    for (i, a) in arcs.iter().enumerate() {
        let (p, q) = a.endpoints();
        let rev = match prev {
            Some(e) => e.dist(q) < e.dist(p),
            None => {
                // Orient the first arc toward whichever end meets the next.
                match arcs.get(i + 1) {
                    Some(n) => {
                        let (np, nq) = n.endpoints();
                        p.dist(np).min(p.dist(nq)) < q.dist(np).min(q.dist(nq))
                    }
                    None => false,
                }
            }
        };
        let (s, e) = if rev { (q, p) } else { (p, q) };
        out.push((s, e, *a, rev));
        prev = Some(e);
    }
    out
}

impl TarskiCell {
    pub fn new(arcs: Vec<ConicArc>, interior_sample: Point) -> Self {
        TarskiCell {
            arcs,
            interior_sample,
        }
    }

    /// Largest gap between consecutive arc endpoints.
    pub fn closure_gap(&self) -> f64 {
        let ch = chained(&self.arcs);
        let n = ch.len();
        (0..n)
            .map(|i| ch[i].1.dist(ch[(i + 1) % n].0))
            .fold(0.0, f64::max)
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        for a in &self.arcs {
            for piece in a.x_monotone_pieces() {
                b = b.union(&piece.bbox());
            }
        }
        b
    }

    /// Even-odd test with an upward vertical ray. Points within `tol` of the
    /// boundary count as inside.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let pieces: Vec<XArc> = self.arcs.iter().flat_map(|a| a.x_monotone_pieces()).collect();
        pieces_contain(&pieces, p, tol)
    }

    /// Enclosed area via the boundary integral of `x dy`, with Gauss-Legendre
    /// quadrature on hyperbola pieces.
    pub fn area(&self) -> f64 {
        let mut acc = 0.0;
        for (s, e, arc, rev) in chained(&self.arcs) {
            match arc {
                ConicArc::Segment(_) => acc += 0.5 * (s.x + e.x) * (e.y - s.y),
                ConicArc::Hyperbola {
                    support,
                    theta0,
                    theta1,
                } => {
                    let v = line_integral_x_dy(
                        |t| support.point_at(t).unwrap_or(support.focus_a),
                        theta0,
                        theta1,
                    );
                    acc += if rev { -v } else { v };
                }
            }
        }
        acc.abs()
    }
}

/// `TarskiCell::contains` on the x-monotone pieces of the boundary.
pub fn pieces_contain(pieces: &[XArc], p: Point, tol: f64) -> bool {
    let mut inside = false;
    for piece in pieces {
        if piece.is_vertical() {
            let (l, r) = (piece.left(), piece.right());
            if (p.x - l.x).abs() <= tol && p.y >= l.y.min(r.y) - tol && p.y <= l.y.max(r.y) + tol {
                return true;
            }
            continue;
        }
        let (x0, x1) = (piece.x_lo(), piece.x_hi());
        if p.x >= x0 - tol && p.x <= x1 + tol {
            let y = piece.y_at(p.x.clamp(x0, x1));
            if (y - p.y).abs() <= tol && p.x >= x0 && p.x <= x1 {
                return true;
            }
        }
        // Half-open rule so shared endpoints are counted once.
        if p.x >= x0 && p.x < x1 && piece.y_at(p.x) > p.y {
            inside = !inside;
        }
    }
    inside
}

const GL_NODES: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// `∫ f` on `[a, b]` by composite 8-point Gauss-Legendre.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..pieces {
        let lo = a + (b - a) * i as f64 / pieces as f64;
        let hi = a + (b - a) * (i + 1) as f64 / pieces as f64;
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in GL_NODES {
            acc += w * h * f(m + h * x);
        }
    }
    acc
}

/// `∫ x dy` along a parametrized curve on `[a, b]`.
pub(crate) fn line_integral_x_dy(f: impl Fn(f64) -> Point, a: f64, b: f64) -> f64 {
    let pieces = 16;
    let mut acc = 0.0;
    for i in 0..pieces {
        let lo = a + (b - a) * i as f64 / pieces as f64;
        let hi = a + (b - a) * (i + 1) as f64 / pieces as f64;
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in GL_NODES {
            let t = m + h * x;
            let d = 1e-6 * (hi - lo);
            let p = f(t);
            let dy = (f(t + d).y - f(t - d).y) / (2.0 * d);
            acc += w * h * p.x * dy;
        }
    }
    acc
}
