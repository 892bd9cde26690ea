//! Two-point query structures on top of the region multiset: a cutting tree
//! over the regions containing `s`, joined with one over the regions
//! containing `t`; the vertex-grouped version; and the boundary versions.

mod boundary;
mod structure;
mod tree;

pub use boundary::{boundary_intervals, build_boundary, BoundaryStats, BoundaryStructure, BoundaryVariant, Interval, SegmentTree};
pub use structure::{Structure, StructureKind};
pub use tree::{CellInfo, CuttingTree, Node, NodeStats, TreeStats};

use crate::cuttings::{CuttingError, Frame, Prepared};
use crate::domain::{DomainError, PolygonalDomain};
use crate::envelope::{path_value, Best};
use crate::geodesic::{Answer, Geodesic};
use crate::geom::Point;
use crate::spm::RegionMultiset;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("{0}")]
    Cutting(#[from] CuttingError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Build parameters. `r` at a node over `m` regions is
/// `max(⌈m^δ⌉, r_min, ⌈2 c^(1/(a-2))⌉)`, capped at `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuildConfig {
    pub delta: f64,
    pub r_min: usize,
    pub c_cut: f64,
    pub a_exponent: f64,
    pub leaf_cap: usize,
    /// Nodes at this depth are leaves whatever their size.
    pub max_depth: usize,
    pub fanout: usize,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { delta: 0.25, r_min: 4, c_cut: 1.0, a_exponent: 4.0, leaf_cap: 8, max_depth: 2, fanout: 4, seed: 0 }
    }
}

impl BuildConfig {
    pub fn with_seed(seed: u64) -> Self {
        BuildConfig { seed, ..Self::default() }
    }

    pub fn r_for(&self, m: usize) -> usize {
        let by_delta = (m as f64).powf(self.delta).ceil() as usize;
        let by_cost = if self.a_exponent > 2.0 && self.c_cut > 0.0 {
            (2.0 * self.c_cut.powf(1.0 / (self.a_exponent - 2.0))).ceil() as usize
        } else {
            0
        };
        by_delta.max(self.r_min).max(by_cost).max(2).min(m.max(2))
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        if self.r_min < 2 {
            return Err(BuildError::Config("r_min must be at least 2".into()));
        }
        if self.leaf_cap < 1 {
            return Err(BuildError::Config("leaf_cap must be at least 1".into()));
        }
        if self.fanout < 2 {
            return Err(BuildError::Config("fanout must be at least 2".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(BuildError::Config("delta must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Everything the structures are built over: the domain, its vertex
/// distances, all augmented SPM regions and their prepared boundaries.
#[derive(Debug, Clone)]
pub struct Instance {
    pub g: Geodesic,
    pub t: RegionMultiset,
    pub prep: Vec<Prepared>,
    pub frame: Frame,
}

impl Instance {
    pub fn new(domain: PolygonalDomain) -> Result<Self, DomainError> {
        let g = Geodesic::new(domain)?;
        let t = RegionMultiset::build(&g);
        let prep = t.regions.iter().map(|r| Prepared::new(&r.cell)).collect();
        let frame = Frame::for_domain(&g.domain);
        Ok(Instance { g, t, prep, frame })
    }

    /// Offers every same-source pair of `a × b` (both ascending) to `best`.
    pub(crate) fn join(&self, a: &[usize], b: &[usize], s: Point, q: Point, best: &mut Best) {
        let src = |x: usize| self.t.regions[x].source;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (sa, sb) = (src(a[i]), src(b[j]));
            if sa < sb {
                i += 1;
            } else if sa > sb {
                j += 1;
            } else {
                let ie = i + a[i..].iter().take_while(|&&x| src(x) == sa).count();
                let je = j + b[j..].iter().take_while(|&&x| src(x) == sb).count();
                for &x in &a[i..ie] {
                    let rs = &self.t.regions[x];
                    for &y in &b[j..je] {
                        let rt = &self.t.regions[y];
                        let w = self.g.gm.d(rs.apex, rt.apex);
                        best.offer(path_value(s, rs.apex_point, w, rt.apex_point, q), (rs.apex, rt.apex));
                    }
                }
                i = ie;
                j = je;
            }
        }
    }

    /// The shared query pipeline: containment checks, `s = t`, the
    /// visibility short-circuit, the vertex shortcut, then `core`, then
    /// the path through the witness pair.
    pub(crate) fn answer(&self, s: Point, q: Point, core: impl FnOnce() -> Best) -> Result<Answer, DomainError> {
        let g = &self.g;
        g.check_in(s)?;
        g.check_in(q)?;
        if s == q {
            return Ok(Answer { distance: 0.0, witness: None, path: vec![s] });
        }
        if g.sees(s, q) {
            return Ok(Answer { distance: s.dist(q), witness: None, path: vec![s, q] });
        }
        let best = if let Some(v) = g.vertex_at(s) {
            let r = &self.t.regions[self.t.locate_in_source(g, v, q)];
            let mut b = Best::default();
            b.offer(path_value(s, s, g.gm.d(v, r.apex), r.apex_point, q), (v, r.apex));
            b
        } else if let Some(v) = g.vertex_at(q) {
            let r = &self.t.regions[self.t.locate_in_source(g, v, s)];
            let mut b = Best::default();
            b.offer(path_value(s, r.apex_point, g.gm.d(r.apex, v), q, q), (r.apex, v));
            b
        } else {
            core()
        };
        let (distance, (u, w)) = best.0.ok_or(DomainError::Disconnected)?;
        Ok(Answer { distance, witness: Some((u, w)), path: g.path_through(s, u, w, q) })
    }

    /// Per-source count of region ids over a family of sets.
    fn per_source<'a>(&self, sets: impl Iterator<Item = &'a [usize]>) -> Vec<u64> {
        let mut c = vec![0u64; self.t.n_sources];
        for set in sets {
            for &x in set {
                c[self.t.regions[x].source] += 1;
            }
        }
        c
    }

    /// Stored envelope pairs between two families of canonical sets, counted
    /// as `Σ_v α_v β_v` before deduplication by apex pair.
    pub(crate) fn pair_count<'a>(
        &self,
        a: impl Iterator<Item = &'a [usize]>,
        b: impl Iterator<Item = &'a [usize]>,
    ) -> u64 {
        let (x, y) = (self.per_source(a), self.per_source(b));
        x.iter().zip(&y).map(|(p, q)| p * q).sum()
    }
}

/// An outer tree over a region set and the inner tree it is joined with.
#[derive(Debug, Clone)]
pub struct TwoLevel {
    pub ids: Vec<usize>,
    pub outer: CuttingTree,
    pub inner: CuttingTree,
}

pub(crate) const INNER_SEED: u64 = 0x5bd1_e995_2f6b_a3c1;

impl TwoLevel {
    pub fn build(inst: &Instance, ids: Vec<usize>, cfg: &BuildConfig, seed: u64) -> Result<Self, BuildError> {
        let outer = CuttingTree::build(ids.clone(), &inst.prep, &inst.frame, cfg, seed)?;
        let inner = CuttingTree::build(ids.clone(), &inst.prep, &inst.frame, cfg, seed ^ INNER_SEED)?;
        Ok(TwoLevel { ids, outer, inner })
    }

    /// Minimum of `f_ST(s, t)` over same-source `S ∋ s`, `T ∋ t` in the set.
    pub fn query(&self, inst: &Instance, s: Point, q: Point) -> Best {
        let mut best = Best::default();
        self.outer.visit(s, inst, |a| {
            self.inner.visit(q, inst, |b| inst.join(a, b, s, q, &mut best));
        });
        best
    }

    pub fn envelope_pairs(&self, inst: &Instance) -> u64 {
        inst.pair_count(self.outer.covering_sets(), self.inner.covering_sets())
    }

    pub fn stats(&self, inst: &Instance, cfg: &BuildConfig) -> GroupStats {
        GroupStats {
            regions: self.ids.len(),
            envelope_pairs: self.envelope_pairs(inst),
            outer: self.outer.stats(cfg),
            inner: self.inner.stats(cfg),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GroupStats {
    pub regions: usize,
    pub envelope_pairs: u64,
    pub outer: TreeStats,
    pub inner: TreeStats,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StructureStats {
    pub structure: String,
    pub config: BuildConfig,
    pub envelope_pairs: u64,
    pub groups: Vec<GroupStats>,
}

/// The full structure over all regions.
#[derive(Debug, Clone)]
pub struct OuterStructure {
    pub cfg: BuildConfig,
    pub tl: TwoLevel,
}

pub fn build_outer(inst: &Instance, cfg: &BuildConfig) -> Result<OuterStructure, BuildError> {
    cfg.validate()?;
    let tl = TwoLevel::build(inst, (0..inst.t.len()).collect(), cfg, cfg.seed)?;
    Ok(OuterStructure { cfg: *cfg, tl })
}

impl OuterStructure {
    pub fn query(&self, inst: &Instance, s: Point, q: Point) -> Result<Answer, DomainError> {
        inst.answer(s, q, || self.tl.query(inst, s, q))
    }

    pub fn stats(&self, inst: &Instance) -> StructureStats {
        let g = self.tl.stats(inst, &self.cfg);
        StructureStats {
            structure: "outer".into(),
            config: self.cfg,
            envelope_pairs: g.envelope_pairs,
            groups: vec![g],
        }
    }
}

/// One structure per group of consecutive source vertices.
#[derive(Debug, Clone)]
pub struct GroupedStructure {
    pub cfg: BuildConfig,
    pub ell: usize,
    /// Source range and structure of every group.
    pub groups: Vec<((usize, usize), TwoLevel)>,
}

pub fn build_grouped(inst: &Instance, ell: usize, cfg: &BuildConfig) -> Result<GroupedStructure, BuildError> {
    cfg.validate()?;
    let n = inst.t.n_sources;
    if ell < 1 || ell > n {
        return Err(BuildError::Config(format!("group count {ell} outside 1..={n}")));
    }
    let mut groups = Vec::with_capacity(ell);
    for i in 0..ell {
        let (lo, hi) = (i * n / ell, (i + 1) * n / ell);
        let ids = (inst.t.by_source[lo].0..inst.t.by_source[hi - 1].1).collect();
        let seed = cfg.seed.wrapping_add(i as u64);
        groups.push(((lo, hi), TwoLevel::build(inst, ids, cfg, seed)?));
    }
    Ok(GroupedStructure { cfg: *cfg, ell, groups })
}

impl GroupedStructure {
    pub fn query(&self, inst: &Instance, s: Point, q: Point) -> Result<Answer, DomainError> {
        inst.answer(s, q, || {
            let mut best = Best::default();
            for (_, tl) in &self.groups {
                best.merge(tl.query(inst, s, q));
            }
            best
        })
    }

    pub fn stats(&self, inst: &Instance) -> StructureStats {
        let groups: Vec<GroupStats> = self.groups.iter().map(|(_, tl)| tl.stats(inst, &self.cfg)).collect();
        StructureStats {
            structure: format!("grouped:{}", self.ell),
            config: self.cfg,
            envelope_pairs: groups.iter().map(|g| g.envelope_pairs).sum(),
            groups,
        }
    }
}

#[cfg(test)]
mod tests;
