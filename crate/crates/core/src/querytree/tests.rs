use super::*;
use crate::domain::{DomainError, PolygonalDomain};
use crate::geodesic::path_length;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn d0() -> Instance {
    Instance::new(PolygonalDomain::new(
        vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)],
        vec![vec![p(4., 4.), p(4., 6.), p(6., 6.), p(6., 4.)]],
    ))
    .unwrap()
}

fn small() -> Instance {
    Instance::new(PolygonalDomain::generate(3, 16, 2).unwrap()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.max(1.0)
}

fn assert_valid(inst: &Instance, a: &Answer) {
    for w in a.path.windows(2) {
        assert!(inst.g.sees(w[0], w[1]), "{:?}", a.path);
    }
    let len = path_length(&a.path);
    assert!((len - a.distance).abs() <= 1e-12 * a.distance.max(1.0), "{len} {}", a.distance);
}

#[test]
fn d0_outer_examples() {
    let inst = d0();
    let o = build_outer(&inst, &BuildConfig::default()).unwrap();
    let a = o.query(&inst, p(1., 5.), p(9., 5.)).unwrap();
    assert!((a.distance - 8.3245553).abs() < 1e-7);
    assert_eq!(a.distance, inst.g.oracle_distance(p(1., 5.), p(9., 5.)).unwrap().distance);
    let top = vec![p(1., 5.), p(4., 6.), p(6., 6.), p(9., 5.)];
    let bottom = vec![p(1., 5.), p(4., 4.), p(6., 4.), p(9., 5.)];
    assert!(a.path == top || a.path == bottom, "{:?}", a.path);
    assert_valid(&inst, &a);

    let b = o.query(&inst, p(1., 1.), p(2., 2.)).unwrap();
    assert_eq!(b.distance, 2f64.sqrt());
    assert_eq!(b.path, vec![p(1., 1.), p(2., 2.)]);
    assert_eq!(o.query(&inst, p(3., 3.), p(3., 3.)).unwrap().distance, 0.0);
    assert!(matches!(
        o.query(&inst, p(5., 5.), p(1., 1.)),
        Err(DomainError::PointOutsideDomain(..))
    ));
    // From a vertex the answer comes straight from its map.
    let c = o.query(&inst, p(4., 4.), p(6., 7.)).unwrap();
    assert!(close(c.distance, inst.g.oracle_distance(p(4., 4.), p(6., 7.)).unwrap().distance));
}

#[test]
fn inner_tree_shape_on_d0() {
    let inst = d0();
    let cfg = BuildConfig { leaf_cap: 4, max_depth: 8, ..BuildConfig::default() };
    let tree = CuttingTree::build((0..inst.t.len()).collect(), &inst.prep, &inst.frame, &cfg, 0).unwrap();
    let st = tree.stats(&cfg);
    assert!(st.one_over_r);
    let n = inst.t.len() as f64;
    let r = cfg.r_for(inst.t.len()) as f64;
    assert!(st.depth <= (n.ln() / r.ln()).ceil() as usize + 1, "depth {}", st.depth);
}

/// Every region containing a point of a cell either covers the cell or
/// crosses it.
#[test]
fn covering_or_conflict_at_every_cell() {
    let inst = d0();
    let cfg = BuildConfig { leaf_cap: 4, max_depth: 1, ..BuildConfig::default() };
    let tree = CuttingTree::build((0..inst.t.len()).collect(), &inst.prep, &inst.frame, &cfg, 5).unwrap();
    let Node::Internal { cutting, cells, .. } = &tree.nodes[0] else { panic!("root is a leaf") };
    for (k, info) in cells.iter().enumerate() {
        let Node::Leaf { ids: conflicts, .. } = &tree.nodes[info.child] else { panic!() };
        let trap = &cutting.cells[k].trap;
        for i in 1..5 {
            let x = trap.x_lo + (trap.x_hi - trap.x_lo) * i as f64 / 5.0;
            for j in 1..5 {
                let y = trap.bottom_at(x) + (trap.top_at(x) - trap.bottom_at(x)) * j as f64 / 5.0;
                for r in &inst.t.regions {
                    if r.contains(p(x, y), 0.0) {
                        assert!(info.covering.contains(&r.id) || conflicts.contains(&r.id), "{} {k}", r.id);
                    }
                }
            }
        }
    }
}

#[test]
fn canonical_sets_partition_the_containing_regions() {
    let inst = small();
    let tree =
        CuttingTree::build((0..inst.t.len()).collect(), &inst.prep, &inst.frame, &BuildConfig::default(), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let q = inst.g.domain.sample_interior(&mut rng);
        let mut seen = BTreeSet::new();
        tree.visit(q, &inst, |set| {
            for &x in set {
                assert!(seen.insert(x), "region {x} met twice");
            }
        });
        let want: BTreeSet<usize> =
            inst.t.regions.iter().filter(|r| r.contains(q, inst.t.tol)).map(|r| r.id).collect();
        assert_eq!(seen, want);
    }
}

#[test]
fn outer_and_groups_match_the_oracle() {
    let inst = small();
    let n = inst.g.n();
    let cfg = BuildConfig::with_seed(4);
    let outer = build_outer(&inst, &cfg).unwrap();
    let one = build_grouped(&inst, 1, &cfg).unwrap();
    let others: Vec<GroupedStructure> = [2, (n as f64).sqrt().ceil() as usize, n]
        .into_iter()
        .map(|l| build_grouped(&inst, l, &cfg).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let s = inst.g.domain.sample_interior(&mut rng);
        let q = inst.g.domain.sample_interior(&mut rng);
        let want = inst.g.oracle_distance(s, q).unwrap().distance;
        let a = outer.query(&inst, s, q).unwrap();
        assert!(close(a.distance, want), "{s:?} {q:?} {} {want}", a.distance);
        assert_valid(&inst, &a);
        assert_eq!(one.query(&inst, s, q).unwrap(), a);
        for g in &others {
            assert!(close(g.query(&inst, s, q).unwrap().distance, want));
        }
    }
}

#[test]
fn grouping_d0_and_bad_counts() {
    let inst = d0();
    let g = build_grouped(&inst, 2, &BuildConfig::default()).unwrap();
    assert!((g.query(&inst, p(1., 5.), p(9., 5.)).unwrap().distance - 8.3245553).abs() < 1e-7);
    assert!(build_grouped(&inst, 0, &BuildConfig::default()).is_err());
    assert!(build_grouped(&inst, 9, &BuildConfig::default()).is_err());
}

#[test]
fn fewer_pairs_with_two_groups() {
    let inst = small();
    let cfg = BuildConfig::default();
    let one = build_grouped(&inst, 1, &cfg).unwrap().stats(&inst);
    let two = build_grouped(&inst, 2, &cfg).unwrap().stats(&inst);
    assert!(two.envelope_pairs < one.envelope_pairs, "{} {}", two.envelope_pairs, one.envelope_pairs);
    let v = serde_json::to_value(&one).unwrap();
    assert_eq!(v["structure"], "grouped:1");
    assert!(v["groups"][0]["outer"]["per_node"].is_array());
}

#[test]
fn config_rules() {
    let c = BuildConfig::default();
    assert_eq!(c.r_for(100), 4);
    assert_eq!(c.r_for(10_000), 10);
    assert_eq!(c.r_for(3), 3);
    assert!(BuildConfig { r_min: 1, ..c }.validate().is_err());
    assert!(BuildConfig { leaf_cap: 0, ..c }.validate().is_err());
    let steep = BuildConfig { c_cut: 64.0, a_exponent: 5.0, ..c };
    assert_eq!(steep.r_for(100), 8);
}

#[test]
fn d0_boundary_examples() {
    let inst = d0();
    let cfg = BuildConfig::default();
    for v in [BoundaryVariant::SOnly, BoundaryVariant::SAndT] {
        let b = build_boundary(&inst, v, &cfg).unwrap();
        let a = b.query(&inst, p(0., 5.), p(10., 5.)).unwrap();
        assert!(close(a.distance, inst.g.oracle_distance(p(0., 5.), p(10., 5.)).unwrap().distance));
        let h = b.query(&inst, p(4., 5.), p(6., 5.)).unwrap();
        assert!(close(h.distance, 4.0), "{}", h.distance);
        assert_eq!(b.query(&inst, p(0., 5.), p(0., 5.)).unwrap().distance, 0.0);
        assert!(matches!(b.query(&inst, p(1., 5.), p(10., 5.)), Err(DomainError::NotOnBoundary(..))));
    }
    let so = build_boundary(&inst, BoundaryVariant::SOnly, &cfg).unwrap();
    let want = inst.g.oracle_distance(p(0., 5.), p(9., 5.)).unwrap().distance;
    assert!(close(so.query(&inst, p(0., 5.), p(9., 5.)).unwrap().distance, want));
    assert!(matches!(
        build_boundary(&inst, BoundaryVariant::SAndT, &cfg).unwrap().query(&inst, p(0., 5.), p(9., 5.)),
        Err(DomainError::NotOnBoundary(..))
    ));
}

#[test]
fn stabbing_returns_the_containing_regions() {
    let inst = small();
    let b = build_boundary(&inst, BoundaryVariant::SAndT, &BuildConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let bp = inst.g.domain.sample_boundary(&mut rng);
        let x = inst.g.domain.boundary_coord(&bp);
        let mut seen = BTreeSet::new();
        b.trees[bp.cycle].stab(x, inst.t.tol, |set| {
            for &i in set {
                assert!(seen.insert(i));
            }
        });
        let want: BTreeSet<usize> =
            inst.t.regions.iter().filter(|r| r.contains(bp.point, inst.t.tol)).map(|r| r.id).collect();
        assert_eq!(seen, want, "{bp:?}");
    }
}

#[test]
fn boundary_variants_match_the_oracle() {
    let inst = small();
    let cfg = BuildConfig::default();
    let so = build_boundary(&inst, BoundaryVariant::SOnly, &cfg).unwrap();
    let st = build_boundary(&inst, BoundaryVariant::SAndT, &cfg).unwrap();
    let d = &inst.g.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let s = d.sample_boundary(&mut rng).point;
        let q = d.sample_interior(&mut rng);
        let qb = d.sample_boundary(&mut rng).point;
        let a = so.query(&inst, s, q).unwrap();
        let o = inst.g.oracle_distance(s, q).unwrap();
        assert!(close(a.distance, o.distance), "{s:?} {q:?} {a:?} {o:?}");
        assert_valid(&inst, &a);
        let b = st.query(&inst, s, qb).unwrap();
        assert!(close(b.distance, inst.g.oracle_distance(s, qb).unwrap().distance));
    }
    assert!(st.stats(&inst).envelope_pairs > 0);
}
