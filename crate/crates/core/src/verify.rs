//! Structure-versus-oracle checks over one domain.

use crate::geodesic::{path_length, Answer};
use crate::geom::Point;
use crate::querytree::{BoundaryVariant, BuildConfig, BuildError, Instance, Structure, StructureKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative tolerance of every distance comparison.
pub const REL_TOL: f64 = 1e-9;

/// `|a - o| / o`, or the absolute difference when `o = 0`.
pub fn rel_error(a: f64, o: f64) -> f64 {
    let d = (a - o).abs();
    if o > 0.0 {
        d / o
    } else {
        d
    }
}

/// A path is valid when it runs from `s` to `t` through mutually visible
/// points and its length matches the reported distance.
pub fn path_is_valid(inst: &Instance, s: Point, t: Point, a: &Answer) -> bool {
    let p = &a.path;
    !p.is_empty()
        && p[0] == s
        && p[p.len() - 1] == t
        && p.windows(2).all(|w| inst.g.sees(w[0], w[1]))
        && rel_error(path_length(p), a.distance) <= REL_TOL
}

/// The structures `verify` checks on a domain with `n` vertices.
pub fn default_kinds(n: usize) -> Vec<StructureKind> {
    let sq = (n as f64).sqrt().ceil() as usize;
    let mut ells = vec![1, 2, sq, n];
    ells.dedup();
    let mut v = vec![StructureKind::Outer];
    v.extend(ells.into_iter().map(StructureKind::Grouped));
    v.push(StructureKind::Boundary(BoundaryVariant::SOnly));
    v.push(StructureKind::Boundary(BoundaryVariant::SAndT));
    v
}

/// `k` query pairs for `kind`: interior pairs, or a boundary `s` (and `t`)
/// for the boundary variants.
pub fn sample_queries(inst: &Instance, kind: StructureKind, k: usize, seed: u64) -> Vec<(Point, Point)> {
    let d = &inst.g.domain;
    let (salt, bs, bt) = match kind {
        StructureKind::Boundary(BoundaryVariant::SOnly) => (1, true, false),
        StructureKind::Boundary(BoundaryVariant::SAndT) => (2, true, true),
        _ => (0, false, false),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(3).wrapping_add(salt));
    let mut pick = |on_boundary: bool| {
        if on_boundary {
            d.sample_boundary(&mut rng).point
        } else {
            d.sample_interior(&mut rng)
        }
    };
    (0..k).map(|_| (pick(bs), pick(bt))).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StructureCheck {
    pub structure: String,
    pub queries: usize,
    pub max_rel_error: f64,
    /// Queries that errored, missed the tolerance or gave an invalid path.
    pub failures: usize,
    /// The first failing query, if any.
    pub first_failure: Option<(Point, Point)>,
}

impl StructureCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Builds `kind` and compares `k` seeded queries with the oracle.
pub fn check_structure(
    inst: &Instance,
    kind: StructureKind,
    k: usize,
    cfg: &BuildConfig,
) -> Result<(Structure, StructureCheck), BuildError> {
    let st = Structure::build(inst, kind, cfg)?;
    let mut c = StructureCheck {
        structure: kind.to_string(),
        queries: k,
        max_rel_error: 0.0,
        failures: 0,
        first_failure: None,
    };
    for (s, t) in sample_queries(inst, kind, k, cfg.seed) {
        let ok = match (st.query(inst, s, t), inst.g.oracle_distance(s, t)) {
            (Ok(a), Ok(o)) => {
                let e = rel_error(a.distance, o.distance);
                c.max_rel_error = c.max_rel_error.max(e);
                e <= REL_TOL && path_is_valid(inst, s, t, &a)
            }
            _ => false,
        };
        if !ok {
            c.failures += 1;
            c.first_failure.get_or_insert((s, t));
        }
    }
    Ok((st, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PolygonalDomain;

    #[test]
    fn relative_error_and_kinds() {
        assert_eq!(rel_error(2.0, 2.0), 0.0);
        assert!((rel_error(2.0 + 2e-9, 2.0) - 1e-9).abs() < 1e-15);
        assert_eq!(rel_error(1e-3, 0.0), 1e-3);
        let k: Vec<String> = default_kinds(16).iter().map(|k| k.to_string()).collect();
        assert_eq!(
            k,
            ["outer", "grouped:1", "grouped:2", "grouped:4", "grouped:16", "boundary:s-only", "boundary:s-and-t"]
        );
        assert_eq!(default_kinds(2).len(), 5);
    }

    #[test]
    fn structures_pass_on_a_small_domain() {
        let inst = Instance::new(PolygonalDomain::generate(3, 12, 1).unwrap()).unwrap();
        let cfg = BuildConfig::with_seed(2);
        for kind in default_kinds(inst.g.n()) {
            let (_, c) = check_structure(&inst, kind, 40, &cfg).unwrap();
            assert!(c.passed(), "{c:?}");
        }
        let q = sample_queries(&inst, StructureKind::Boundary(BoundaryVariant::SOnly), 5, 2);
        assert!(q.iter().all(|&(s, _)| inst.g.domain.boundary_locate(s).is_ok()));
        assert_eq!(q, sample_queries(&inst, StructureKind::Boundary(BoundaryVariant::SOnly), 5, 2));
    }
}
