//! `geoq`: generate domains, answer and verify two-point shortest path
//! queries, benchmark the structures and run the point-on-line reduction.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 input error.

use clap::{Parser, Subcommand, ValueEnum};
use geodesic_twopoint::domain::{DomainError, PolygonalDomain};
use geodesic_twopoint::geodesic::Geodesic;
use geodesic_twopoint::geom::Point;
use geodesic_twopoint::hopcroft::{build_reduction, decide_line, HopcroftError, HopcroftInstance};
use geodesic_twopoint::querytree::{build_outer, BuildConfig, BuildError, Instance, Structure, StructureKind};
use geodesic_twopoint::report::{answer_json, canonical, fingerprint, timed, QueryRecord, RunReport, Space};
use geodesic_twopoint::svg;
use geodesic_twopoint::verify::{check_structure, default_kinds, sample_queries};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "geoq", about = "Two-point geodesic shortest path queries in polygonal domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded random domain as JSON.
    Gen {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        holes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer one query and print {distance, witness, path}.
    Query {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        structure: StructureKind,
        #[arg(long, value_parser = parse_point)]
        s: Point,
        #[arg(long, value_parser = parse_point)]
        t: Point,
        #[arg(long)]
        seed: Option<u64>,
        /// Draw the domain and the path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also draw the shortest path map of the first witness vertex.
        #[arg(long, requires = "svg")]
        spm: bool,
    },
    /// Check every structure against the oracle on each domain of a corpus.
    Verify {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        queries: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build structures and time seeded queries. A comma-separated list of
    /// structures also prints the space curve across them.
    Bench {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        structure: Vec<StructureKind>,
        #[arg(long)]
        queries: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decide every line of a point-on-line instance by shortest paths.
    Hopcroft {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Oracle)]
        engine: Engine,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Oracle,
    Outer,
}

/// A failed command with its exit code.
struct Fail(u8, String);

impl From<DomainError> for Fail {
    fn from(e: DomainError) -> Self {
        Fail(3, e.to_string())
    }
}

impl From<HopcroftError> for Fail {
    fn from(e: HopcroftError) -> Self {
        Fail(3, e.to_string())
    }
}

impl From<BuildError> for Fail {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Config(m) => Fail(2, m),
            e => Fail(1, format!("build failed: {e}")),
        }
    }
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected \"x,y\", got '{s}'"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    let p = Point::new(num(x)?, num(y)?);
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(format!("'{s}' is not a finite point"));
    }
    Ok(p)
}

/// The flag, else `GEODESIC_SEED`, else 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, Fail> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("GEODESIC_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Fail(2, format!("GEODESIC_SEED='{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn load_domain(p: &Path) -> Result<PolygonalDomain, Fail> {
    PolygonalDomain::load(p).map_err(|e| Fail(3, format!("{}: {e}", p.display())))
}

fn print(v: &Value) {
    print!("{}", canonical(v));
}

fn gen(seed: u64, n: usize, holes: usize, out: &Path) -> Result<(), Fail> {
    let d = PolygonalDomain::generate(seed, n, holes)?;
    d.save(out).map_err(|e| Fail(3, format!("{}: {e}", out.display())))?;
    print(&json!({"out": out.display().to_string(), "n": d.n(), "holes": d.h(), "fingerprint": fingerprint(&d)}));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn query(
    domain: &Path,
    kind: StructureKind,
    s: Point,
    t: Point,
    seed: u64,
    svg_out: Option<&Path>,
    spm: bool,
) -> Result<(), Fail> {
    let d = load_domain(domain)?;
    let (answer, g) = if kind == StructureKind::Oracle {
        let g = Geodesic::new(d)?;
        (g.oracle_distance(s, t)?, g)
    } else {
        let inst = Instance::new(d)?;
        let st = Structure::build(&inst, kind, &BuildConfig::with_seed(seed))?;
        (st.query(&inst, s, t)?, inst.g)
    };
    if let Some(out) = svg_out {
        let regions = match (spm, answer.witness) {
            (true, Some((u, _))) => geodesic_twopoint::spm::build_spm(&g, u),
            _ => Vec::new(),
        };
        let text = svg::render(&g.domain, &regions, Some(&answer.path));
        std::fs::write(out, text).map_err(|e| Fail(3, format!("{}: {e}", out.display())))?;
    }
    print(&answer_json(&answer));
    Ok(())
}

fn verify(corpus: &Path, k: usize, seed: u64) -> Result<(), Fail> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)
        .map_err(|e| Fail(3, format!("{}: {e}", corpus.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Fail(3, format!("{}: no .json fixtures", corpus.display())));
    }
    let cfg = BuildConfig::with_seed(seed);
    let mut all_ok = true;
    let mut out = Vec::new();
    for f in &files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let loaded = PolygonalDomain::load(f).and_then(Instance::new);
        let inst = match loaded {
            Ok(i) => i,
            Err(e) => {
                all_ok = false;
                eprintln!("{name}: invalid fixture: {e}");
                out.push(json!({"fixture": name, "ok": false, "error": e.to_string()}));
                continue;
            }
        };
        let mut checks = Vec::new();
        let mut max_err: f64 = 0.0;
        let mut ok = true;
        if k > 0 {
            for kind in default_kinds(inst.g.n()) {
                match check_structure(&inst, kind, k, &cfg) {
                    Ok((_, c)) => {
                        max_err = max_err.max(c.max_rel_error);
                        ok &= c.passed();
                        checks.push(serde_json::to_value(&c).expect("check serializes"));
                    }
                    Err(e) => {
                        ok = false;
                        checks.push(json!({"structure": kind.to_string(), "error": e.to_string()}));
                    }
                }
            }
        }
        if !ok {
            eprintln!("{name}: structures disagree with the oracle");
        }
        all_ok &= ok;
        out.push(json!({
            "fixture": name,
            "ok": ok,
            "n": inst.g.n(),
            "max_rel_error": max_err,
            "checks": checks,
        }));
    }
    print(&json!({"queries": k, "seed": seed, "ok": all_ok, "domains": out}));
    if all_ok {
        Ok(())
    } else {
        Err(Fail(1, "verification failed".into()))
    }
}

fn bench_one(inst: &Instance, kind: StructureKind, k: usize, seed: u64, fp: &str, spm_ms: f64) -> Result<RunReport, Fail> {
    let cfg = BuildConfig::with_seed(seed);
    let (st, build_ms) = timed(|| Structure::build(inst, kind, &cfg));
    let st = st?;
    let mut queries = Vec::with_capacity(k);
    for (index, (s, t)) in sample_queries(inst, kind, k, seed).into_iter().enumerate() {
        let (a, ms) = timed(|| st.query(inst, s, t));
        let a = a?;
        queries.push(QueryRecord { index, s, t, distance: a.distance, witness: a.witness.map(|(u, w)| [u, w]), ms });
    }
    let mut timings = BTreeMap::new();
    timings.insert("spm".to_string(), spm_ms);
    timings.insert("build".to_string(), build_ms);
    let mut r = RunReport {
        command: "bench".into(),
        seed,
        domain: fp.to_string(),
        structure: kind.to_string(),
        timings,
        space: Space::of(inst, &st),
        stats: st.stats_json(inst),
        queries,
    };
    r.summarize_queries();
    Ok(r)
}

fn bench(domain: &Path, kinds: &[StructureKind], k: usize, seed: u64) -> Result<(), Fail> {
    let d = load_domain(domain)?;
    let fp = fingerprint(&d);
    let (inst, spm_ms) = timed(|| Instance::new(d));
    let inst = inst?;
    let reports: Vec<RunReport> =
        kinds.iter().map(|&kind| bench_one(&inst, kind, k, seed, &fp, spm_ms)).collect::<Result<_, _>>()?;
    if let [one] = reports.as_slice() {
        print(&serde_json::to_value(one).expect("report serializes"));
    } else {
        let curve: Vec<Value> =
            reports.iter().map(|r| json!({"structure": r.structure, "space": r.space})).collect();
        print(&json!({"curve": curve, "reports": reports}));
    }
    Ok(())
}

fn hopcroft(instance: &Path, engine: Engine, seed: u64) -> Result<(), Fail> {
    let text = std::fs::read_to_string(instance).map_err(|e| Fail(3, format!("{}: {e}", instance.display())))?;
    let hi: HopcroftInstance =
        serde_json::from_str(&text).map_err(|e| Fail(3, format!("{}: {e}", instance.display())))?;
    let rd = build_reduction(&hi)?;
    if rd.precision_warning {
        eprintln!("warning: L = {} makes the holes (side {:e}) close to double precision", hi.l, rd.side);
    }
    let decisions = match engine {
        Engine::Oracle => {
            let g = Geodesic::new(rd.domain.clone())?;
            (0..hi.lines.len()).map(|i| decide_line(&rd, i, |s, t| g.oracle_distance(s, t))).collect::<Result<Vec<_>, _>>()?
        }
        Engine::Outer => {
            let inst = Instance::new(rd.domain.clone())?;
            let o = build_outer(&inst, &BuildConfig::with_seed(seed))?;
            (0..hi.lines.len()).map(|i| decide_line(&rd, i, |s, t| o.query(&inst, s, t))).collect::<Result<Vec<_>, _>>()?
        }
    };
    print(&serde_json::to_value(decisions).expect("decisions serialize"));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Gen { seed, n, holes, out } => gen(resolve_seed(seed)?, n, holes, &out),
        Cmd::Query { domain, structure, s, t, seed, svg, spm } => {
            query(&domain, structure, s, t, resolve_seed(seed)?, svg.as_deref(), spm)
        }
        Cmd::Verify { corpus, queries, seed } => verify(&corpus, queries, resolve_seed(seed)?),
        Cmd::Bench { domain, structure, queries, seed } => bench(&domain, &structure, queries, resolve_seed(seed)?),
        Cmd::Hopcroft { instance, engine, seed } => hopcroft(&instance, engine, resolve_seed(seed)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
