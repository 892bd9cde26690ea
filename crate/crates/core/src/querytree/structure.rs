//! Structures by name, as the CLI and the acceptance suite select them.

use super::{
    build_boundary, build_grouped, build_outer, BoundaryStructure, BoundaryVariant, BuildConfig, BuildError,
    GroupedStructure, Instance, OuterStructure,
};
use crate::domain::DomainError;
use crate::geodesic::Answer;
use crate::geom::Point;
use serde_json::Value;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Oracle,
    Outer,
    Grouped(usize),
    Boundary(BoundaryVariant),
}

impl std::str::FromStr for StructureKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "oracle" => Ok(StructureKind::Oracle),
            None if s == "outer" => Ok(StructureKind::Outer),
            Some(("grouped", l)) => match l.parse::<usize>() {
                Ok(l) if l >= 1 => Ok(StructureKind::Grouped(l)),
                _ => Err(format!("group count '{l}' must be a positive integer")),
            },
            Some(("boundary", v)) => Ok(StructureKind::Boundary(v.parse()?)),
            _ => Err(format!(
                "unknown structure '{s}' (expected oracle, outer, grouped:L, boundary:s-only or boundary:s-and-t)"
            )),
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureKind::Oracle => write!(f, "oracle"),
            StructureKind::Outer => write!(f, "outer"),
            StructureKind::Grouped(l) => write!(f, "grouped:{l}"),
            StructureKind::Boundary(BoundaryVariant::SOnly) => write!(f, "boundary:s-only"),
            StructureKind::Boundary(BoundaryVariant::SAndT) => write!(f, "boundary:s-and-t"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Structure {
    Oracle,
    Outer(OuterStructure),
    Grouped(GroupedStructure),
    Boundary(BoundaryStructure),
}

impl Structure {
    pub fn build(inst: &Instance, kind: StructureKind, cfg: &BuildConfig) -> Result<Self, BuildError> {
        Ok(match kind {
            StructureKind::Oracle => Structure::Oracle,
            StructureKind::Outer => Structure::Outer(build_outer(inst, cfg)?),
            StructureKind::Grouped(l) => Structure::Grouped(build_grouped(inst, l, cfg)?),
            StructureKind::Boundary(v) => Structure::Boundary(build_boundary(inst, v, cfg)?),
        })
    }

    pub fn query(&self, inst: &Instance, s: Point, q: Point) -> Result<Answer, DomainError> {
        match self {
            Structure::Oracle => inst.g.oracle_distance(s, q),
            Structure::Outer(o) => o.query(inst, s, q),
            Structure::Grouped(g) => g.query(inst, s, q),
            Structure::Boundary(b) => b.query(inst, s, q),
        }
    }

    /// Full statistics as JSON, `null` for the oracle.
    pub fn stats_json(&self, inst: &Instance) -> Value {
        let v = match self {
            Structure::Oracle => return Value::Null,
            Structure::Outer(o) => serde_json::to_value(o.stats(inst)),
            Structure::Grouped(g) => serde_json::to_value(g.stats(inst)),
            Structure::Boundary(b) => serde_json::to_value(b.stats(inst)),
        };
        v.expect("stats serialize")
    }
}
