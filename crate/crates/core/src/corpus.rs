//! The fixed corpus of generated domains used by `verify` and the
//! acceptance suite.

use crate::domain::{DomainError, PolygonalDomain};

/// `(seed, n, holes)` of every corpus domain.
pub const CORPUS: [(u64, usize, usize); 10] = [
    (1, 12, 1),
    (2, 16, 2),
    (3, 20, 1),
    (4, 24, 3),
    (5, 30, 2),
    (6, 36, 4),
    (7, 42, 3),
    (8, 48, 4),
    (9, 54, 2),
    (10, 60, 4),
];

/// File name of corpus entry `(seed, n, h)`.
pub fn file_name(seed: u64, n: usize, h: usize) -> String {
    format!("d{seed:02}_n{n}_h{h}.json")
}

pub fn generate_all() -> Result<Vec<(String, PolygonalDomain)>, DomainError> {
    CORPUS
        .iter()
        .map(|&(seed, n, h)| Ok((file_name(seed, n, h), PolygonalDomain::generate(seed, n, h)?)))
        .collect()
}
