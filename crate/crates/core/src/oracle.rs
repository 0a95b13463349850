//! Distance oracles: anything that answers "how far is this query point from
//! the reference set".

use crate::index::SpatialIndex;
use crate::mesh::TriangleMesh;

/// Distance evaluator for a closed reference set.
///
/// Implementations must be 1-Lipschitz in the query and return 0 exactly on
/// (the representation of) the set. They are queried concurrently.
pub trait DistanceOracle: Sync {
    /// Ambient dimension of accepted query points.
    fn dim(&self) -> usize;

    /// Distance from `q` (of length `dim()`) to the reference set.
    fn distance(&self, q: &[f64]) -> f64;
}

impl DistanceOracle for SpatialIndex<'_> {
    fn dim(&self) -> usize {
        self.cloud().dim()
    }

    fn distance(&self, q: &[f64]) -> f64 {
        self.nearest_unchecked(q).0
    }
}

impl DistanceOracle for TriangleMesh {
    fn dim(&self) -> usize {
        3
    }

    fn distance(&self, q: &[f64]) -> f64 {
        self.distance_unchecked(q)
    }
}
