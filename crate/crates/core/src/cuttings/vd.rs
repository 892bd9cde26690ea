//! Vertical decomposition of x-monotone pieces inside one pseudo-trapezoid,
//! computed slab by slab between event abscissae and then merged across
//! walls that no event blocks.

use crate::geom::{integrate, BBox, Point, XArc};

/// A pseudo-trapezoid: an x-range with a bottom and a top piece, both
/// defined over the whole range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trap {
    pub x_lo: f64,
    pub x_hi: f64,
    pub bottom: XArc,
    pub top: XArc,
}

impl Trap {
    pub fn from_bbox(b: &BBox) -> Self {
        Trap {
            x_lo: b.min.x,
            x_hi: b.max.x,
            bottom: XArc::seg(b.min, Point::new(b.max.x, b.min.y)),
            top: XArc::seg(Point::new(b.min.x, b.max.y), b.max),
        }
    }

    pub fn bottom_at(&self, x: f64) -> f64 {
        self.bottom.y_at(x)
    }

    pub fn top_at(&self, x: f64) -> f64 {
        self.top.y_at(x)
    }

    pub fn bbox(&self) -> BBox {
        let mut b = self.bottom.bbox().union(&self.top.bbox());
        b.min.x = self.x_lo;
        b.max.x = self.x_hi;
        b
    }

    pub fn sample(&self) -> Point {
        let x = 0.5 * (self.x_lo + self.x_hi);
        Point::new(x, 0.5 * (self.bottom_at(x) + self.top_at(x)))
    }

    pub fn area(&self) -> f64 {
        let pieces = match (self.bottom, self.top) {
            (XArc::Seg { .. }, XArc::Seg { .. }) => 1,
            _ => 16,
        };
        integrate(|x| self.top_at(x) - self.bottom_at(x), self.x_lo, self.x_hi, pieces)
    }

    /// Closed containment, with slack `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        if p.x < self.x_lo - tol || p.x > self.x_hi + tol {
            return false;
        }
        let x = p.x.clamp(self.x_lo, self.x_hi);
        p.y >= self.bottom_at(x) - tol && p.y <= self.top_at(x) + tol
    }

    /// Whether `piece` meets the open interior by more than `tol`.
    pub fn piece_enters(&self, piece: &XArc, tol: f64) -> bool {
        if piece.is_vertical() {
            let x = piece.left().x;
            if x <= self.x_lo + tol || x >= self.x_hi - tol {
                return false;
            }
            let (l, r) = (piece.left().y, piece.right().y);
            return l.min(r) < self.top_at(x) - tol && l.max(r) > self.bottom_at(x) + tol;
        }
        let a = piece.x_lo().max(self.x_lo);
        let b = piece.x_hi().min(self.x_hi);
        if b - a <= tol {
            return false;
        }
        let mut xs = vec![a, b];
        for c in piece.crossings(&self.top, tol).into_iter().chain(piece.crossings(&self.bottom, tol)) {
            if c.x > a && c.x < b {
                xs.push(c.x);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.windows(2).any(|w| {
            if w[1] <= w[0] {
                return false;
            }
            let xm = 0.5 * (w[0] + w[1]);
            let y = piece.y_at(xm);
            y > self.bottom_at(xm) + tol && y < self.top_at(xm) - tol
        })
    }
}

/// A boundary piece and the input it came from (`None` for frame pieces).
#[derive(Debug, Clone, Copy)]
pub struct Curve {
    pub arc: XArc,
    pub owner: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RawCell {
    pub trap: Trap,
    /// Inputs whose pieces bound the cell from above or below.
    pub defining: Vec<usize>,
}

/// The piece over `[xa, xb]` of the curve that `a` starts and `b` ends.
fn join(a: &XArc, b: &XArc, xa: f64, xb: f64) -> XArc {
    let pa = Point::new(xa, a.y_at(xa));
    let pb = Point::new(xb, b.y_at(xb));
    match *a {
        XArc::Seg { .. } => XArc::seg(pa, pb),
        XArc::Hyp { support, .. } => {
            let (t0, t1) = (support.theta_of(pa), support.theta_of(pb));
            XArc::hyp(support, t0.min(t1), t0.max(t1))
        }
    }
}

struct Open {
    x_lo: f64,
    bottom: Vec<usize>,
    top: Vec<usize>,
}

/// Cells of the decomposition of `frame` by `curves`.
pub fn decompose(frame: &Trap, curves: &[Curve], tol: f64) -> Vec<RawCell> {
    let (x_lo, x_hi) = (frame.x_lo, frame.x_hi);
    let fb = frame.bbox();
    let mut cs = vec![
        Curve { arc: frame.bottom, owner: None },
        Curve { arc: frame.top, owner: None },
    ];
    cs.extend(curves.iter().filter(|c| {
        c.arc.x_hi() > x_lo - tol && c.arc.x_lo() < x_hi + tol && c.arc.bbox().overlaps(&fb, tol)
    }));

    let mut pts: Vec<Point> = Vec::new();
    for c in &cs[2..] {
        pts.push(c.arc.left());
        pts.push(c.arc.right());
    }
    for i in 0..cs.len() {
        for j in (i + 1).max(2)..cs.len() {
            pts.extend(cs[i].arc.crossings(&cs[j].arc, tol));
        }
    }
    pts.retain(|p| p.x > x_lo + tol && p.x < x_hi - tol);
    pts.sort_by(|a, b| a.x.total_cmp(&b.x));

    // Walls, each with the event points clustered onto it.
    let mut walls: Vec<(f64, Vec<Point>)> = vec![(x_lo, Vec::new())];
    for p in pts {
        let last = walls.len() - 1;
        if last > 0 && p.x - walls[last].0 <= tol {
            walls[last].1.push(p);
        } else {
            walls.push((p.x, vec![p]));
        }
    }
    walls.push((x_hi, Vec::new()));
    if walls.len() > 2 && walls[walls.len() - 1].0 - walls[walls.len() - 2].0 <= tol {
        let last = walls.len() - 2;
        walls.remove(last);
    }
    let verticals: Vec<usize> = (2..cs.len()).filter(|&i| cs[i].arc.is_vertical()).collect();

    let same = |a: usize, b: usize, x: f64| {
        a == b
            || (cs[a].arc.same_support(&cs[b].arc, tol)
                && (cs[a].arc.y_at(x) - cs[b].arc.y_at(x)).abs() <= tol)
    };
    let blocked = |bot: usize, top: usize, k: usize| {
        let (xw, ev) = (&walls[k].0, &walls[k].1);
        let (yb, yt) = (cs[bot].arc.y_at(*xw) + tol, cs[top].arc.y_at(*xw) - tol);
        ev.iter().any(|p| p.y > yb && p.y < yt)
            || verticals.iter().any(|&v| {
                let (l, r) = (cs[v].arc.left(), cs[v].arc.right());
                (l.x - xw).abs() <= tol && l.y.min(r.y) < yt && l.y.max(r.y) > yb
            })
    };

    let mut out = Vec::new();
    let finish = |o: Open, x_hi: f64, out: &mut Vec<RawCell>| {
        let bottom = join(&cs[o.bottom[0]].arc, &cs[*o.bottom.last().unwrap()].arc, o.x_lo, x_hi);
        let top = join(&cs[o.top[0]].arc, &cs[*o.top.last().unwrap()].arc, o.x_lo, x_hi);
        let mut defining: Vec<usize> =
            o.bottom.iter().chain(&o.top).filter_map(|&i| cs[i].owner).collect();
        defining.sort_unstable();
        defining.dedup();
        out.push(RawCell {
            trap: Trap { x_lo: o.x_lo, x_hi, bottom, top },
            defining,
        });
    };

    let mut open: Vec<Open> = Vec::new();
    for k in 0..walls.len() - 1 {
        let (xa, xb) = (walls[k].0, walls[k + 1].0);
        let xm = 0.5 * (xa + xb);
        let (yb, yt) = (frame.bottom_at(xm), frame.top_at(xm));
        let mut ent: Vec<(f64, usize)> = (2..cs.len())
            .filter(|&i| {
                let a = &cs[i].arc;
                !a.is_vertical() && a.x_lo() < xm && xm < a.x_hi()
            })
            .map(|i| (cs[i].arc.y_at(xm), i))
            .filter(|&(y, _)| y > yb + tol && y < yt - tol)
            .collect();
        ent.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ent.dedup_by(|b, a| b.0 - a.0 <= tol);
        let mut seq = vec![0];
        seq.extend(ent.iter().map(|e| e.1));
        seq.push(1);

        let mut prev: Vec<Option<Open>> = std::mem::take(&mut open).into_iter().map(Some).collect();
        for w in seq.windows(2) {
            let (bot, top) = (w[0], w[1]);
            let hit = prev.iter().position(|o| {
                o.as_ref().is_some_and(|o| {
                    same(*o.bottom.last().unwrap(), bot, xa)
                        && same(*o.top.last().unwrap(), top, xa)
                        && !blocked(*o.bottom.last().unwrap(), *o.top.last().unwrap(), k)
                })
            });
            match hit {
                Some(i) => {
                    let mut o = prev[i].take().unwrap();
                    if *o.bottom.last().unwrap() != bot {
                        o.bottom.push(bot);
                    }
                    if *o.top.last().unwrap() != top {
                        o.top.push(top);
                    }
                    open.push(o);
                }
                None => open.push(Open { x_lo: xa, bottom: vec![bot], top: vec![top] }),
            }
        }
        for o in prev.into_iter().flatten() {
            finish(o, xa, &mut out);
        }
    }
    for o in open {
        finish(o, x_hi, &mut out);
    }
    out
}
