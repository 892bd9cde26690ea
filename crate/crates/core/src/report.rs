//! Machine-readable run reports. Every number except wall-clock timings is
//! a function of the inputs and the seed, and keys come out sorted.

use crate::domain::PolygonalDomain;
use crate::geodesic::Answer;
use crate::geom::Point;
use crate::querytree::{BoundaryStats, Instance, Structure, StructureStats, TreeStats};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::time::Instant;

/// Keys holding wall-clock measurements; everything else is reproducible.
pub const TIMING_KEYS: [&str; 2] = ["timings", "ms"];

/// SHA-256 of the domain's canonical JSON, as lowercase hex.
pub fn fingerprint(d: &PolygonalDomain) -> String {
    Sha256::digest(d.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical<T: Serialize>(v: &T) -> String {
    let v = serde_json::to_value(v).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// Removes every timing field, leaving the reproducible part of a report.
pub fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for k in TIMING_KEYS {
                m.remove(k);
            }
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub fn answer_json(a: &Answer) -> Value {
    json!({
        "distance": a.distance,
        "witness": a.witness.map(|(u, w)| [u, w]),
        "path": a.path,
    })
}

/// Runs `f` and returns its result with the elapsed milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    pub index: usize,
    pub s: Point,
    pub t: Point,
    pub distance: f64,
    pub witness: Option<[usize; 2]>,
    pub ms: f64,
}

/// Totals over the cutting trees of a structure.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Space {
    pub regions: usize,
    pub nodes: usize,
    pub cells: usize,
    pub conflict_total: usize,
    pub covering_total: usize,
    pub stuck_leaves: usize,
    pub envelope_pairs: u64,
}

impl Space {
    fn add_tree(&mut self, t: &TreeStats) {
        self.nodes += t.nodes;
        self.cells += t.cells;
        self.conflict_total += t.conflict_total;
        self.covering_total += t.covering_total;
        self.stuck_leaves += t.stuck_leaves;
    }

    pub fn of_structure(regions: usize, st: &StructureStats) -> Self {
        let mut s = Space { regions, envelope_pairs: st.envelope_pairs, ..Space::default() };
        for g in &st.groups {
            s.add_tree(&g.outer);
            s.add_tree(&g.inner);
        }
        s
    }

    pub fn of(inst: &Instance, st: &Structure) -> Self {
        let n = inst.t.len();
        match st {
            Structure::Oracle => Space { regions: n, ..Space::default() },
            Structure::Outer(o) => Self::of_structure(n, &o.stats(inst)),
            Structure::Grouped(g) => Self::of_structure(n, &g.stats(inst)),
            Structure::Boundary(b) => Self::of_boundary(n, &b.stats(inst)),
        }
    }

    pub fn of_boundary(regions: usize, st: &BoundaryStats) -> Self {
        let mut s = Space { regions, envelope_pairs: st.envelope_pairs, ..Space::default() };
        s.nodes += st.segment_nodes;
        s.covering_total += st.canonical_total;
        if let Some(t) = &st.inner {
            s.add_tree(t);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub domain: String,
    pub structure: String,
    pub timings: BTreeMap<String, f64>,
    pub space: Space,
    /// Full structure statistics, per node.
    pub stats: Value,
    pub queries: Vec<QueryRecord>,
}

impl RunReport {
    /// Adds `min`, `median`, `mean` and `max` of the per-query times.
    pub fn summarize_queries(&mut self) {
        let mut ms: Vec<f64> = self.queries.iter().map(|q| q.ms).collect();
        if ms.is_empty() {
            return;
        }
        ms.sort_by(f64::total_cmp);
        let k = ms.len();
        self.timings.insert("query_min".into(), ms[0]);
        self.timings.insert("query_median".into(), ms[k / 2]);
        self.timings.insert("query_mean".into(), ms.iter().sum::<f64>() / k as f64);
        self.timings.insert("query_max".into(), ms[k - 1]);
    }
}
