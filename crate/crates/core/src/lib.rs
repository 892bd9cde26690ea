//! Two-point geodesic shortest-path queries in polygonal domains with holes.
//!
//! The distance between two query points is decomposed over the regions of
//! the augmented shortest path maps of all polygon vertices. Query structures
//! are multi-level cutting trees over those regions, with lower-envelope
//! stores at the nodes, plus segment-tree variants for query points on the
//! domain boundary. A brute-force visibility-graph oracle serves as ground
//! truth for every structure.

pub mod corpus;
pub mod cuttings;
pub mod domain;
pub mod envelope;
pub mod geodesic;
pub mod geom;
pub mod hopcroft;
pub mod querytree;
pub mod report;
pub mod spm;
pub mod svg;
pub mod verify;
pub mod visibility;


pub use domain::{BoundaryPoint, Location, PolygonalDomain};
pub use geom::{Point, Segment};
