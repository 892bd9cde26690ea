//! Lower envelope of the functions `f_ST(s, t) = |s v_S| + d(v_S, v_T) + |v_T t|`
//! over relevant region pairs, answered by an exact scan.

use crate::geodesic::GeodesicMatrix;
use crate::geom::Point;
use crate::spm::RegionMultiset;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("regions {0} and {1} come from different sources")]
    NonRelevantPair(usize, usize),
}

/// Which arguments of the functions are free; the scan ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VariateKind {
    Free,
    SOnBoundary,
    BothOnBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePair {
    pub v_s: usize,
    pub v_t: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeIndex {
    /// Sorted by `(v_s, v_t)`, one entry per apex pair.
    pub pairs: Vec<EnvelopePair>,
    pub kind: VariateKind,
}

/// `|s a| + w + |b t|`, evaluated in one fixed order everywhere.
pub fn path_value(s: Point, a: Point, w: f64, b: Point, t: Point) -> f64 {
    s.dist(a) + w + b.dist(t)
}

/// Running minimum with the tie rule: smaller value, then the
/// lexicographically smaller witness.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Best(pub Option<(f64, (usize, usize))>);

impl Best {
    pub fn offer(&mut self, value: f64, witness: (usize, usize)) {
        let better = match self.0 {
            None => true,
            Some((v, w)) => value < v || (value == v && witness < w),
        };
        if better {
            self.0 = Some((value, witness));
        }
    }

    pub fn merge(&mut self, o: Best) {
        if let Some((v, w)) = o.0 {
            self.offer(v, w);
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.0.map(|b| b.0)
    }
}

pub fn build_envelope(
    t: &RegionMultiset,
    gm: &GeodesicMatrix,
    rel: &[(usize, usize)],
    kind: VariateKind,
) -> Result<EnvelopeIndex, EnvelopeError> {
    let mut keys = Vec::with_capacity(rel.len());
    for &(a, b) in rel {
        let (ra, rb) = (&t.regions[a], &t.regions[b]);
        if ra.source != rb.source {
            return Err(EnvelopeError::NonRelevantPair(a, b));
        }
        keys.push((ra.apex, rb.apex));
    }
    keys.sort_unstable();
    keys.dedup();
    let pairs = keys
        .into_iter()
        .map(|(v_s, v_t)| EnvelopePair { v_s, v_t, w: gm.d(v_s, v_t) })
        .collect();
    Ok(EnvelopeIndex { pairs, kind })
}

impl EnvelopeIndex {
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// Minimum over all pairs, or `None` when there are none.
    pub fn query(&self, vertices: &[Point], s: Point, t: Point) -> Best {
        let mut best = Best::default();
        for p in &self.pairs {
            best.offer(path_value(s, vertices[p.v_s], p.w, vertices[p.v_t], t), (p.v_s, p.v_t));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Location, PolygonalDomain};
    use crate::geodesic::Geodesic;
    use crate::spm::relevant_pairs;
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

    #[test]
    fn d0_examples() {
        let g = d0();
        let t = RegionMultiset::build(&g);
        let (s, q) = (p(1., 5.), p(9., 5.));
        let one = EnvelopeIndex {
            pairs: vec![EnvelopePair { v_s: 5, v_t: 6, w: g.gm.d(5, 6) }],
            kind: VariateKind::Free,
        };
        let want = 2.0 + 2.0 * 10f64.sqrt();
        assert!((one.query(&g.vis.vertices, s, q).value().unwrap() - want).abs() < 1e-12);

        let ts = t.regions_containing(&g, s).unwrap();
        let tt = t.regions_containing(&g, q).unwrap();
        let rel = relevant_pairs(&t, &ts, &tt);
        assert_eq!(rel.len(), 8);
        let env = build_envelope(&t, &g.gm, &rel, VariateKind::Free).unwrap();
        assert!(env.m() <= 8);
        let got = env.query(&g.vis.vertices, s, q);
        assert_eq!(got.value().unwrap(), g.oracle_distance(s, q).unwrap().distance);

        let empty = build_envelope(&t, &g.gm, &[], VariateKind::Free).unwrap();
        assert_eq!(empty.m(), 0);
        assert_eq!(empty.query(&g.vis.vertices, s, q), Best(None));

        let a = t.of_source(0)[0].id;
        let b = t.of_source(1)[0].id;
        assert_eq!(
            build_envelope(&t, &g.gm, &[(a, b)], VariateKind::Free),
            Err(EnvelopeError::NonRelevantPair(a, b))
        );
    }

    #[test]
    fn full_sets_match_oracle_and_bound_it() {
        let g = Geodesic::new(PolygonalDomain::generate(8, 24, 2).unwrap()).unwrap();
        let t = RegionMultiset::build(&g);
        let bb = g.domain.bbox();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut sample = || loop {
            let q = p(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y));
            if g.domain.contains(q) == Location::Interior {
                return q;
            }
        };
        for _ in 0..200 {
            let (s, q) = (sample(), sample());
            let oracle = g.oracle_distance(s, q).unwrap().distance;
            let rel = relevant_pairs(
                &t,
                &t.regions_containing(&g, s).unwrap(),
                &t.regions_containing(&g, q).unwrap(),
            );
            let env = build_envelope(&t, &g.gm, &rel, VariateKind::Free).unwrap();
            for pr in &env.pairs {
                let f = path_value(s, g.vertex(pr.v_s), pr.w, g.vertex(pr.v_t), q);
                assert!(f >= oracle - 1e-9 * oracle);
            }
            let v = env.query(&g.vis.vertices, s, q).value().unwrap();
            if !g.sees(s, q) {
                assert!((v - oracle).abs() <= 1e-9 * oracle, "{v} {oracle}");
            }
        }
    }

    #[test]
    fn ties_prefer_smaller_witness() {
        let mut b = Best::default();
        b.offer(1.0, (3, 4));
        b.offer(1.0, (2, 9));
        b.offer(1.0, (2, 10));
        assert_eq!(b.0, Some((1.0, (2, 9))));
    }
}
