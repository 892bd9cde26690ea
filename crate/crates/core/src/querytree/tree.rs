//! A recursive cutting tree over a set of regions: every cell keeps the
//! regions that contain it, and the regions crossing it go to a child.

use super::{BuildConfig, Instance};
use crate::cuttings::{build_cutting_prepared, conflict_bound, Cutting, CuttingError, Frame, Prepared};
use crate::geom::Point;
use crate::domain::Location;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct CellInfo {
    /// Global ids of the regions containing the cell, ascending.
    pub covering: Vec<usize>,
    pub conflicts: usize,
    pub child: usize,
}

#[derive(Debug, Clone)]
pub enum Node {
    /// `stuck` marks a node whose cutting could not meet its conflict bound
    /// within the retry budget; its regions are scanned directly instead.
    Leaf { ids: Vec<usize>, depth: usize, stuck: bool },
    Internal { cutting: Cutting, cells: Vec<CellInfo>, set_size: usize, depth: usize },
}

#[derive(Debug, Clone)]
pub struct CuttingTree {
    pub nodes: Vec<Node>,
}

/// Per-node figures, as reported by the bench command.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NodeStats {
    pub depth: usize,
    pub set_size: usize,
    pub cells: usize,
    pub max_conflict: usize,
    pub conflict_total: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub cells: usize,
    pub depth: usize,
    pub conflict_total: usize,
    pub covering_total: usize,
    /// Whether every cell met its node's `⌊|B| / r⌋` conflict bound.
    pub one_over_r: bool,
    /// Leaves left by a cutting that ran out of retries.
    pub stuck_leaves: usize,
    pub per_node: Vec<NodeStats>,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The cell to descend into at `p`. On a wall between cells only a cell
/// whose interior meets free space near `p` is guaranteed to keep every
/// region holding `p` among its covering and conflicting regions; the side
/// is found by stepping from `p` towards each cell's interior.
fn pick_cell(cutting: &Cutting, p: Point, inst: &Instance) -> usize {
    let cands = cutting.locate_all(p).unwrap_or_else(|_| vec![0]);
    if cands.len() == 1 {
        return cands[0];
    }
    let step = 1e3 * inst.t.tol;
    // Interior beats boundary (a sliver cell can be thinner than the step).
    let score = |c: usize| {
        let trap = &cutting.cells[c].trap;
        let d = trap.sample() - p;
        let len = d.norm();
        if len == 0.0 {
            return 2;
        }
        let q = p + d * (step / len).min(0.5);
        if !trap.contains(q, 0.0) {
            return 0;
        }
        match inst.g.domain.contains(q) {
            Location::Interior => 2,
            Location::Boundary => 1,
            Location::Exterior => 0,
        }
    };
    let mut best = (0, cands[0]);
    for &c in &cands {
        let sc = score(c);
        if sc > best.0 {
            best = (sc, c);
        }
        if sc == 2 {
            break;
        }
    }
    best.1
}

impl CuttingTree {
    /// Builds the tree over `ids` (ascending global region ids).
    pub fn build(
        ids: Vec<usize>,
        prep: &[Prepared],
        frame: &Frame,
        cfg: &BuildConfig,
        seed: u64,
    ) -> Result<Self, CuttingError> {
        let mut t = CuttingTree { nodes: Vec::new() };
        t.add(ids, prep, frame, cfg, seed, 0)?;
        Ok(t)
    }

    fn add(
        &mut self,
        ids: Vec<usize>,
        prep: &[Prepared],
        frame: &Frame,
        cfg: &BuildConfig,
        seed: u64,
        depth: usize,
    ) -> Result<usize, CuttingError> {
        let me = self.nodes.len();
        if ids.len() <= cfg.leaf_cap || depth >= cfg.max_depth {
            self.nodes.push(Node::Leaf { ids, depth, stuck: false });
            return Ok(me);
        }
        let local: Vec<&Prepared> = ids.iter().map(|&i| &prep[i]).collect();
        let r = cfg.r_for(ids.len());
        let mut cutting = match build_cutting_prepared(&local, r, mix(seed ^ me as u64), frame) {
            Ok(c) => c,
            Err(CuttingError::RetryBudgetExceeded(_)) => {
                self.nodes.push(Node::Leaf { ids, depth, stuck: true });
                return Ok(me);
            }
            Err(e) => return Err(e),
        };
        self.nodes.push(Node::Leaf { ids: Vec::new(), depth, stuck: false });
        let mut cells = Vec::with_capacity(cutting.cells.len());
        for cell in &mut cutting.cells {
            let covering = cell.covering.iter().map(|&j| ids[j]).collect();
            let conflict_ids: Vec<usize> = cell.conflicts.iter().map(|&j| ids[j]).collect();
            let conflicts = conflict_ids.len();
            cell.covering = Vec::new();
            cell.conflicts = Vec::new();
            let child = self.add(conflict_ids, prep, frame, cfg, seed, depth + 1)?;
            cells.push(CellInfo { covering, conflicts, child });
        }
        self.nodes[me] = Node::Internal { cutting, cells, set_size: ids.len(), depth };
        Ok(me)
    }

    /// Calls `f` with the canonical sets met on the way down to `p`: the
    /// covering set of every cell containing `p`, then the regions of the
    /// leaf that contain `p`. Together they are the regions holding `p`.
    pub fn visit(&self, p: Point, inst: &Instance, mut f: impl FnMut(&[usize])) {
        let t = &inst.t;
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { ids, .. } => {
                    let hits: Vec<usize> =
                        ids.iter().copied().filter(|&i| t.regions[i].contains(p, t.tol)).collect();
                    if !hits.is_empty() {
                        f(&hits);
                    }
                    return;
                }
                Node::Internal { cutting, cells, .. } => {
                    let c = &cells[pick_cell(cutting, p, inst)];
                    if !c.covering.is_empty() {
                        f(&c.covering);
                    }
                    at = c.child;
                }
            }
        }
    }

    /// All covering sets of all cells, for space accounting.
    pub fn covering_sets(&self) -> impl Iterator<Item = &[usize]> {
        self.nodes.iter().flat_map(|n| match n {
            Node::Internal { cells, .. } => cells.iter().map(|c| c.covering.as_slice()).collect(),
            Node::Leaf { .. } => Vec::new(),
        })
    }

    pub fn stats(&self, cfg: &BuildConfig) -> TreeStats {
        let mut s = TreeStats {
            nodes: self.nodes.len(),
            leaves: 0,
            cells: 0,
            depth: 0,
            conflict_total: 0,
            covering_total: 0,
            one_over_r: true,
            stuck_leaves: 0,
            per_node: Vec::new(),
        };
        for n in &self.nodes {
            match n {
                Node::Leaf { depth, stuck, .. } => {
                    s.leaves += 1;
                    s.stuck_leaves += *stuck as usize;
                    s.depth = s.depth.max(*depth);
                }
                Node::Internal { cells, set_size, depth, .. } => {
                    s.depth = s.depth.max(*depth);
                    s.cells += cells.len();
                    let total: usize = cells.iter().map(|c| c.conflicts).sum();
                    let max = cells.iter().map(|c| c.conflicts).max().unwrap_or(0);
                    s.conflict_total += total;
                    s.covering_total += cells.iter().map(|c| c.covering.len()).sum::<usize>();
                    s.one_over_r &= max <= conflict_bound(*set_size, cfg.r_for(*set_size));
                    s.per_node.push(NodeStats {
                        depth: *depth,
                        set_size: *set_size,
                        cells: cells.len(),
                        max_conflict: max,
                        conflict_total: total,
                    });
                }
            }
        }
        s
    }
}
