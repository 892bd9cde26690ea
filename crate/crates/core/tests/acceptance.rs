//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are the
//! constants below.

use geodesic_twopoint::corpus::{file_name, CORPUS};
use geodesic_twopoint::cuttings::{
    build_cutting, conflict_bound, random_cells, vertical_decomposition, Frame, PseudoTrapezoid, Trap,
};
use geodesic_twopoint::domain::PolygonalDomain;
use geodesic_twopoint::envelope::{build_envelope, path_value, Best, VariateKind};
use geodesic_twopoint::geodesic::Geodesic;
use geodesic_twopoint::geom::{BBox, ConicArc, Point, TarskiCell};
use geodesic_twopoint::hopcroft::{build_reduction, decide_line, HopcroftInstance};
use geodesic_twopoint::querytree::{build_outer, BoundaryVariant, BuildConfig, Instance, StructureKind};
use geodesic_twopoint::report::strip_timings;
use geodesic_twopoint::spm::relevant_pairs;
use geodesic_twopoint::verify::{check_structure, sample_queries};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

const QUERIES: usize = 1000;
const REL_TOL: f64 = 1e-9;
const AREA_TOL: f64 = 1e-6;
const CRIT1_BUDGET_S: f64 = 600.0;
const SPM_POINTS: usize = 200;
const C_SPM_TARGET: f64 = 12.0;
const C_REL_TARGET: f64 = 4.0;
const SQUARE_SUM_FACTOR: f64 = 8.0;
const CUT_INSTANCES: u64 = 50;
const CUT_N: usize = 64;
const PARTITIONS: usize = 100;
const HOPCROFT_INSTANCES: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Runs `f`, turning a panic into a failed outcome.
fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        }
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn rel(a: f64, o: f64) -> f64 {
    if o > 0.0 {
        (a - o).abs() / o
    } else {
        (a - o).abs()
    }
}

/// Per-domain results feeding criteria 1, 2, 4, 5 and 8.
#[derive(Default)]
struct DomainRun {
    name: String,
    n: usize,
    outer_err: f64,
    outer_fail: usize,
    variant_err: f64,
    variant_fail: Vec<String>,
    ell1_exact: bool,
    spm_label_fail: usize,
    spm_area_defect: f64,
    spm_per_source_over_n: f64,
    rel_over_n: f64,
    pairs_ell1: u64,
    pairs_ell2: u64,
    outer_s: f64,
    error: Option<String>,
}

/// Weighted distance from `q` to `source` by brute force over visible
/// vertices, independent of the shortest path maps.
fn brute_min(g: &Geodesic, source: usize, q: Point) -> f64 {
    g.visible_vertices(q)
        .into_iter()
        .map(|w| q.dist(g.vertex(w)) + g.gm.d(w, source))
        .fold(f64::INFINITY, f64::min)
}

fn run_domain(name: &str, d: PolygonalDomain, seed: u64) -> DomainRun {
    let mut out = DomainRun { name: name.into(), n: d.n(), ell1_exact: true, ..DomainRun::default() };
    let t0 = Instant::now();
    let inst = Instance::new(d).expect("corpus domain is valid");
    let n = inst.g.n();
    let cfg = BuildConfig::with_seed(seed);

    // Criterion 1.
    let (outer, c) = check_structure(&inst, StructureKind::Outer, QUERIES, &cfg).expect("outer builds");
    out.outer_err = c.max_rel_error;
    out.outer_fail = c.failures;
    out.outer_s = t0.elapsed().as_secs_f64();

    // Criterion 2, keeping the groupings' envelope counts for criterion 8.
    let sq = (n as f64).sqrt().ceil() as usize;
    let interior = sample_queries(&inst, StructureKind::Outer, QUERIES, seed);
    for ell in [1, 2, sq, n] {
        let kind = StructureKind::Grouped(ell);
        let (st, c) = check_structure(&inst, kind, QUERIES, &cfg).expect("grouped builds");
        out.variant_err = out.variant_err.max(c.max_rel_error);
        if !c.passed() {
            out.variant_fail.push(format!("{kind}: {} failures", c.failures));
        }
        let pairs = st.stats_json(&inst)["envelope_pairs"].as_u64().unwrap_or(0);
        if ell == 1 {
            out.pairs_ell1 = pairs;
            out.ell1_exact = interior.iter().all(|&(s, t)| st.query(&inst, s, t).ok() == outer.query(&inst, s, t).ok());
        }
        if ell == 2 {
            out.pairs_ell2 = pairs;
        }
    }
    for v in [BoundaryVariant::SOnly, BoundaryVariant::SAndT] {
        let kind = StructureKind::Boundary(v);
        let qs = sample_queries(&inst, kind, QUERIES, seed);
        let on_holes = qs.iter().filter(|&&(s, _)| inst.g.domain.boundary_locate(s).is_ok_and(|b| b.cycle > 0)).count();
        assert!(inst.g.domain.h() == 0 || on_holes > 0, "no hole-boundary queries for {kind}");
        let (_, c) = check_structure(&inst, kind, QUERIES, &cfg).expect("boundary builds");
        out.variant_err = out.variant_err.max(c.max_rel_error);
        if !c.passed() {
            out.variant_fail.push(format!("{kind}: {} failures", c.failures));
        }
    }
    drop(outer);

    // Criterion 4.
    let g = &inst.g;
    let area = g.domain.area();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for v in 0..n {
        let regs = inst.t.of_source(v);
        let sum: f64 = regs.iter().map(|r| r.area()).sum();
        out.spm_area_defect = out.spm_area_defect.max((sum - area).abs() / area);
        out.spm_per_source_over_n = out.spm_per_source_over_n.max(regs.len() as f64 / n as f64);
        for _ in 0..SPM_POINTS {
            let q = g.domain.sample_interior(&mut rng);
            let r = &inst.t.regions[inst.t.locate_in_source(g, v, q)];
            if rel(r.value_at(q), brute_min(g, v, q)) > REL_TOL {
                out.spm_label_fail += 1;
            }
        }
    }

    // Criterion 5, with T_p every region whose closure holds p.
    let holding = |p: Point| -> Vec<usize> {
        inst.t.regions.iter().filter(|r| r.contains(p, inst.t.tol)).map(|r| r.id).collect()
    };
    for (s, t) in interior {
        let k = relevant_pairs(&inst.t, &holding(s), &holding(t)).len();
        out.rel_over_n = out.rel_over_n.max(k as f64 / n as f64);
    }
    out
}

/// Brute force: dense samples of every boundary arc against the open cell.
fn conflicts_by_sampling(t: &Trap, cell: &TarskiCell, tol: f64) -> bool {
    if !cell.bbox().overlaps(&t.bbox(), tol) {
        return false;
    }
    cell.arcs.iter().any(|a| {
        let pts: Vec<Point> = match a {
            ConicArc::Segment(s) => (0..=2000).map(|i| s.a.lerp(s.b, i as f64 / 2000.0)).collect(),
            _ => a.polyline(2000),
        };
        pts.iter().any(|p| {
            p.x > t.x_lo + tol && p.x < t.x_hi - tol && p.y > t.bottom_at(p.x) + tol && p.y < t.top_at(p.x) - tol
        })
    })
}

fn criterion3() -> Outcome {
    let b = BBox::of_points([Point::new(0.0, 0.0), Point::new(100.0, 100.0)]);
    let f = Frame::new(b.inflate(10.0), 1e-9);
    let box_area = f.bbox.area();
    let (mut over, mut mismatched, mut defect) = (0usize, 0usize, 0f64);
    let mut square_sums = Vec::new();
    for r in [2usize, 4, 8] {
        let mut sq = 0usize;
        for seed in 0..CUT_INSTANCES {
            let cells = random_cells(1000 + seed, CUT_N, true);
            let refs: Vec<&TarskiCell> = cells.iter().collect();
            let c = build_cutting(&refs, r, seed, &f).expect("cutting builds");
            let cut: &[PseudoTrapezoid] = &c.cells;
            over += cut.iter().filter(|x| x.conflicts.len() > conflict_bound(CUT_N, r)).count();
            defect = defect.max((c.total_area() - box_area).abs() / box_area);
            for x in cut {
                let want: Vec<usize> =
                    (0..cells.len()).filter(|&i| conflicts_by_sampling(&x.trap, &cells[i], f.tol)).collect();
                mismatched += (x.conflicts != want) as usize;
            }
            let vd = vertical_decomposition(&refs, r, seed, &f);
            sq += vd.iter().map(|x| x.conflicts.len().pow(2)).sum::<usize>();
        }
        let mean = sq as f64 / CUT_INSTANCES as f64;
        let band = SQUARE_SUM_FACTOR * (r * r) as f64 * (CUT_N as f64 / r as f64).powi(2);
        square_sums.push((r, mean, band));
    }
    let sums_ok = square_sums.iter().all(|&(_, m, b)| m <= b);
    let sums: Vec<String> = square_sums.iter().map(|(r, m, b)| format!("r={r}: {m:.0} <= {b:.0}")).collect();
    Outcome::new(
        over == 0 && mismatched == 0 && defect < AREA_TOL && sums_ok,
        format!(
            "{CUT_INSTANCES} instances x r in {{2,4,8}}, N={CUT_N}; cells over bound {over}, brute-force mismatches {mismatched}, \
             max area defect {defect:.1e}; mean sum |C|^2 {}",
            sums.join(", ")
        ),
    )
}

fn criterion6(domains: &[(String, PolygonalDomain)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    let mut parts_total = 0;
    let per = PARTITIONS / domains.len().min(4);
    let mut done = 0;
    for (_, d) in domains.iter().take(4) {
        let inst = Instance::new(d.clone()).expect("valid");
        let verts = inst.g.domain.vertices();
        for _ in 0..per {
            let s = inst.g.domain.sample_interior(&mut rng);
            let t = inst.g.domain.sample_interior(&mut rng);
            let m = inst.t.len();
            let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
                let mut ids: Vec<usize> = (0..m).collect();
                ids.shuffle(rng);
                ids.truncate(rng.gen_range(1..=m));
                ids.sort_unstable();
                ids
            };
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            // Whole-set minimum by a direct scan.
            let mut whole = Best::default();
            for (x, y) in relevant_pairs(&inst.t, &a, &b) {
                let (rx, ry) = (&inst.t.regions[x], &inst.t.regions[y]);
                whole.offer(path_value(s, rx.apex_point, inst.g.gm.d(rx.apex, ry.apex), ry.apex_point, t), (rx.apex, ry.apex));
            }
            let split = |v: &[usize], rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
                let k = rng.gen_range(1..=v.len().min(6));
                let mut parts = vec![Vec::new(); k];
                for &x in v {
                    parts[rng.gen_range(0..k)].push(x);
                }
                parts.retain(|p| !p.is_empty());
                parts
            };
            let (pa, pb) = (split(&a, &mut rng), split(&b, &mut rng));
            parts_total += pa.len() * pb.len();
            let mut joined = Best::default();
            for x in &pa {
                for y in &pb {
                    let env = build_envelope(&inst.t, &inst.g.gm, &relevant_pairs(&inst.t, x, y), VariateKind::Free)
                        .expect("same-source pairs");
                    joined.merge(env.query(&verts, s, t));
                }
            }
            bad += (whole.value() != joined.value()) as usize;
            done += 1;
        }
    }
    Outcome::new(
        bad == 0 && done == PARTITIONS,
        format!("{done} random (A, B) partitions into {parts_total} part pairs; {bad} minima differ"),
    )
}

/// `(n, L)` of Hopcroft instance `i`.
fn hopcroft_size(i: u64) -> (usize, i64) {
    ([2usize, 4, 6, 8][(i % 4) as usize], [4i64, 8, 16][(i % 3) as usize])
}

fn criterion7() -> Outcome {
    let (mut lines, mut hits, mut bad) = (0, 0, 0);
    for i in 0..HOPCROFT_INSTANCES {
        let (n, l) = hopcroft_size(i);
        let hi = HopcroftInstance::random(700 + i, n, l, 12);
        let rd = build_reduction(&hi).expect("instance is valid");
        let inst = Instance::new(rd.domain.clone()).expect("reduction domain is valid");
        let outer = build_outer(&inst, &BuildConfig::with_seed(i)).expect("outer builds");
        for k in 0..hi.lines.len() {
            let want = hi.line_hits(k);
            let a = decide_line(&rd, k, |s, t| inst.g.oracle_distance(s, t)).map(|d| d.hit);
            let b = decide_line(&rd, k, |s, t| outer.query(&inst, s, t)).map(|d| d.hit);
            bad += (a.ok() != Some(want)) as usize + (b.ok() != Some(want)) as usize;
            lines += 1;
            hits += want as usize;
        }
    }
    Outcome::new(
        bad == 0,
        format!("{HOPCROFT_INSTANCES} instances (n <= 8, L in {{4,8,16}}), {lines} lines ({hits} hits); {bad} mismatches over both engines"),
    )
}

fn geoq(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_geoq"))
        .args(args)
        .env_remove("GEODESIC_SEED")
        .output()
        .expect("geoq runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn bench_curve(domain: &Path, n: usize) -> Result<String, String> {
    let sq = (n as f64).sqrt().ceil() as usize;
    let list = format!("grouped:1,grouped:2,grouped:4,grouped:{sq}");
    let (code, out) = geoq(&["bench", "--domain", domain.to_str().unwrap(), "--structure", &list, "--queries", "5"]);
    if code != 0 {
        return Err(format!("bench exited {code}"));
    }
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let curve: Vec<String> = v["curve"]
        .as_array()
        .ok_or("no curve")?
        .iter()
        .map(|c| format!("{}={}", c["structure"].as_str().unwrap_or("?"), c["space"]["envelope_pairs"]))
        .collect();
    Ok(curve.join(" "))
}

fn criterion9(tmp: &Path) -> Outcome {
    let fx = fixtures();
    let d0 = fx.join("d0.json");
    let d01 = fx.join("corpus").join(file_name(CORPUS[0].0, CORPUS[0].1, CORPUS[0].2));
    let small = tmp.join("small");
    std::fs::create_dir_all(&small).unwrap();
    std::fs::copy(&d01, small.join("d01.json")).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (g1, g2, svg1, svg2) = (tmp.join("g1.json"), tmp.join("g2.json"), tmp.join("a.svg"), tmp.join("b.svg"));
    let runs: Vec<(&str, Vec<String>, Vec<String>, bool)> = vec![
        ("gen", vec!["gen", "--seed", "4", "--n", "20", "--holes", "2", "--out", &s(&g1)].into_iter().map(String::from).collect(),
            vec!["gen", "--seed", "4", "--n", "20", "--holes", "2", "--out", &s(&g2)].into_iter().map(String::from).collect(), false),
        ("query", vec!["query", "--domain", &s(&d0), "--structure", "grouped:2", "--s", "1,5", "--t", "9,5", "--svg", &s(&svg1), "--spm"].into_iter().map(String::from).collect(),
            vec!["query", "--domain", &s(&d0), "--structure", "grouped:2", "--s", "1,5", "--t", "9,5", "--svg", &s(&svg2), "--spm"].into_iter().map(String::from).collect(), false),
        ("bench", vec!["bench", "--domain", &s(&d01), "--structure", "outer,boundary:s-only", "--queries", "20", "--seed", "3"].into_iter().map(String::from).collect(),
            vec![], true),
        ("hopcroft", vec!["hopcroft", "--instance", &s(&fx.join("hopcroft_small.json")), "--engine", "outer"].into_iter().map(String::from).collect(),
            vec![], false),
        ("verify", vec!["verify", "--corpus", &s(&small), "--queries", "20", "--seed", "1"].into_iter().map(String::from).collect(),
            vec![], false),
    ];
    let mut diffs = Vec::new();
    for (name, a, b, timed) in runs {
        let b = if b.is_empty() { a.clone() } else { b };
        let a: Vec<&str> = a.iter().map(|x| x.as_str()).collect();
        let b: Vec<&str> = b.iter().map(|x| x.as_str()).collect();
        let ((ca, oa), (cb, ob)) = (geoq(&a), geoq(&b));
        let same = if timed {
            let mut va: serde_json::Value = serde_json::from_slice(&oa).unwrap_or_default();
            let mut vb: serde_json::Value = serde_json::from_slice(&ob).unwrap_or_default();
            strip_timings(&mut va);
            strip_timings(&mut vb);
            va == vb && !va.is_null()
        } else if name == "gen" {
            std::fs::read(&g1).ok() == std::fs::read(&g2).ok()
        } else {
            oa == ob && !oa.is_empty()
        };
        if ca != 0 || cb != 0 || !same {
            diffs.push(format!("{name} (exit {ca}/{cb})"));
        }
    }
    if std::fs::read(&svg1).ok() != std::fs::read(&svg2).ok() {
        diffs.push("query svg".into());
    }
    Outcome::new(
        diffs.is_empty(),
        if diffs.is_empty() {
            "gen, query (+svg), bench (timings stripped), hopcroft and verify repeat byte-identically".to_string()
        } else {
            format!("differing runs: {}", diffs.join(", "))
        },
    )
}

fn main() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = fixtures().join("corpus");
    let mut domains = Vec::new();
    let mut fixture_mismatch = Vec::new();
    for &(seed, n, h) in &CORPUS {
        let name = file_name(seed, n, h);
        let d = PolygonalDomain::load(&dir.join(&name)).expect("corpus fixture loads");
        if PolygonalDomain::generate(seed, n, h).ok().as_ref() != Some(&d) {
            fixture_mismatch.push(name.clone());
        }
        domains.push((name, d));
    }

    let mut runs = Vec::new();
    for (k, (name, d)) in domains.iter().enumerate() {
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(|| run_domain(name, d.clone(), k as u64)));
        let r = r.unwrap_or_else(|e| DomainRun {
            name: name.clone(),
            error: Some(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panic".into())),
            ..DomainRun::default()
        });
        eprintln!("  {name}: {:.1} s (spm + outer {:.1} s)", t0.elapsed().as_secs_f64(), r.outer_s);
        runs.push(r);
    }
    let errors: Vec<String> = runs.iter().filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.name))).collect();
    let ok = errors.is_empty();

    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let crit1_s: f64 = runs.iter().map(|r| r.outer_s).sum();
    let outer_fail: usize = runs.iter().map(|r| r.outer_fail).sum();
    let outer_err = runs.iter().map(|r| r.outer_err).fold(0.0, f64::max);
    results.push((
        1,
        "outer structure equals the oracle",
        Outcome::new(
            ok && fixture_mismatch.is_empty() && outer_fail == 0 && outer_err <= REL_TOL && crit1_s < CRIT1_BUDGET_S,
            format!(
                "{} domains x {QUERIES} queries; {outer_fail} failures, max rel error {outer_err:.1e}, {crit1_s:.0} s{}{}",
                runs.len(),
                if fixture_mismatch.is_empty() { String::new() } else { format!("; fixtures differ from seeds: {fixture_mismatch:?}") },
                if ok { String::new() } else { format!("; errors: {errors:?}") },
            ),
        ),
    ));
    let vfail: Vec<String> = runs.iter().flat_map(|r| r.variant_fail.iter().map(move |f| format!("{} {f}", r.name))).collect();
    let inexact: Vec<&str> = runs.iter().filter(|r| !r.ell1_exact).map(|r| r.name.as_str()).collect();
    let verr = runs.iter().map(|r| r.variant_err).fold(0.0, f64::max);
    results.push((
        2,
        "grouped and boundary structures equal the oracle",
        Outcome::new(
            ok && vfail.is_empty() && inexact.is_empty(),
            format!(
                "grouped l in {{1,2,ceil(sqrt n),n}}, boundary s-only and s-and-t, {QUERIES} queries each; max rel error {verr:.1e}; \
                 failures {vfail:?}; l=1 differs from outer on {inexact:?}"
            ),
        ),
    ));
    results.push((3, "cutting invariants", guarded(criterion3)));
    let lab: usize = runs.iter().map(|r| r.spm_label_fail).sum();
    let area = runs.iter().map(|r| r.spm_area_defect).fold(0.0, f64::max);
    let c_spm = runs.iter().map(|r| r.spm_per_source_over_n).fold(0.0, f64::max);
    let sources: usize = runs.iter().map(|r| r.n).sum();
    results.push((
        4,
        "shortest path maps",
        Outcome::new(
            ok && lab == 0 && area < AREA_TOL && c_spm <= C_SPM_TARGET,
            format!(
                "{sources} sources x {SPM_POINTS} points; {lab} wrong labels; max area defect {area:.1e}; \
                 max regions per source / n = {c_spm:.2} (target <= {C_SPM_TARGET})"
            ),
        ),
    ));
    let c_rel = runs.iter().map(|r| r.rel_over_n).fold(0.0, f64::max);
    results.push((
        5,
        "relevant pairs are linear",
        Outcome::new(
            ok && c_rel <= C_REL_TARGET,
            format!("{QUERIES} pairs per domain; C_rel = max |Rel(T_s x T_t)| / n = {c_rel:.3} (target <= {C_REL_TARGET})"),
        ),
    ));
    results.push((6, "decomposability", guarded(|| criterion6(&domains))));
    results.push((7, "point-on-line reduction", guarded(criterion7)));
    let not_less: Vec<&str> = runs.iter().filter(|r| r.pairs_ell2 >= r.pairs_ell1).map(|r| r.name.as_str()).collect();
    let (t1, t2): (u64, u64) = (runs.iter().map(|r| r.pairs_ell1).sum(), runs.iter().map(|r| r.pairs_ell2).sum());
    let (cname, cd) = &domains[2];
    let curve = bench_curve(&dir.join(cname), cd.n());
    results.push((
        8,
        "two groups store fewer envelope pairs than one",
        Outcome::new(
            ok && not_less.is_empty() && t2 < t1 && curve.is_ok(),
            format!(
                "corpus totals l=1 {t1}, l=2 {t2}; not smaller on {not_less:?}; bench curve on {cname}: {}",
                curve.unwrap_or_else(|e| e)
            ),
        ),
    ));
    results.push((9, "determinism", guarded(|| criterion9(tmp.path()))));

    let mut failed = 0;
    for (k, title, o) in &results {
        println!("criterion {k} {}: {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as usize;
    }
    println!(
        "acceptance: {} of {} criteria pass in {:.0} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
