//! Point clouds: finite subsets of R^d stored as a flat coordinate buffer.

use crate::error::{Error, Result};
use std::collections::HashSet;

/// An immutable finite set of points with a common ambient dimension.
///
/// Coordinates must be finite. Duplicate points (exact coordinate equality,
/// with `-0.0 == 0.0`) are removed at construction, keeping the first
/// occurrence; duplicates never change a distance, a bound or a profile, and
/// removing them keeps pair counts meaningful. Point ids index the deduplicated
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from one coordinate vector per point.
    pub fn from_points(points: &[Vec<f64>]) -> Result<PointCloud> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let dim = points[0].len();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            flat.extend_from_slice(p);
        }
        PointCloud::from_flat(dim, flat)
    }

    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<PointCloud> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "coordinate buffer length {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate {bad}")));
        }
        let (coords, _kept) = dedup_rows(dim, coords);
        Ok(PointCloud { dim, coords })
    }

    /// Like [`PointCloud::from_flat`] but also reports which input rows were
    /// kept, so that per-point payloads can be deduplicated consistently.
    pub(crate) fn from_flat_with_kept(dim: usize, coords: Vec<f64>) -> Result<(PointCloud, Vec<usize>)> {
        let cloud = PointCloud::from_flat(dim, coords.clone())?;
        let (_, kept) = dedup_rows(dim, coords);
        Ok((cloud, kept))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty clouds
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The sub-cloud at the given ids, together with the id mapping back into
    /// `self` (mapping is the ids slice itself; duplicates are not re-checked).
    pub fn subcloud(&self, ids: &[usize]) -> Result<PointCloud> {
        if ids.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut flat = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            flat.extend_from_slice(self.point(i));
        }
        Ok(PointCloud { dim: self.dim, coords: flat })
    }
}

fn dedup_rows(dim: usize, coords: Vec<f64>) -> (Vec<f64>, Vec<usize>) {
    let n = coords.len() / dim;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(coords.len());
    let mut kept = Vec::with_capacity(n);
    for i in 0..n {
        let row = &coords[i * dim..(i + 1) * dim];
        // +0.0 folds -0.0 onto 0.0 so the key matches `==` semantics.
        let key: Vec<u64> = row.iter().map(|c| (c + 0.0).to_bits()).collect();
        if seen.insert(key) {
            out.extend_from_slice(row);
            kept.push(i);
        }
    }
    (out, kept)
}

/// Squared Euclidean distance. Both the brute-force scan and the tree search
/// go through this one accumulation order, so their results agree bit for bit.
#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        acc += d * d;
    }
    acc
}

/// Euclidean distance.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub(crate) fn midpoint_into(a: &[f64], b: &[f64], out: &mut Vec<f64>) {
    out.clear();
    for k in 0..a.len() {
        out.push(0.5 * (a[k] + b[k]));
    }
}
