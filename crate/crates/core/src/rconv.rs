//! Upper bound on the r-convexity of a set sampled on a labeled grid.
//!
//! The grid is a point cloud Phi with an inside/outside label per point and a
//! covering radius `epsilon` (no point of space is farther than `epsilon`
//! from Phi). Dilating the inside points by `r - epsilon` and eroding by
//! `r + epsilon` — both operations taken inside Phi — recaptures an
//! outside-labeled point only if the underlying set is not r-convex, so the
//! smallest such `r` is a certified upper bound for its r-convexity (and
//! hence for its reach).

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::ExtendedReal;
use crate::index::SpatialIndex;
use crate::numeric::AtomicMinF64;
use rayon::prelude::*;

/// Covering radius of the cubic lattice with the given spacing in R^d:
/// `spacing * sqrt(d) / 2`.
pub fn covering_radius(spacing: f64, dim: usize) -> Result<f64> {
    if !spacing.is_finite() || spacing <= 0.0 {
        return Err(Error::InvalidInput(format!("spacing must be > 0, got {spacing}")));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    Ok(spacing * (dim as f64).sqrt() / 2.0)
}

/// A sampling cloud with a membership label per point.
#[derive(Debug, Clone)]
pub struct LabeledGrid {
    phi: PointCloud,
    inside: Vec<bool>,
    epsilon: f64,
}

impl LabeledGrid {
    /// Builds a grid from points and labels. Duplicate points are removed
    /// (first occurrence wins); conflicting labels on duplicates are an error.
    pub fn new(points: &[Vec<f64>], inside: &[bool], epsilon: f64) -> Result<LabeledGrid> {
        if points.len() != inside.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} labels",
                points.len(),
                inside.len()
            )));
        }
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
        let (phi, kept) = PointCloud::from_flat_with_kept(dim, flat)?;
        if kept.len() != points.len() {
            // Check that dropped duplicates agree with their keeper.
            let mut label_of: std::collections::HashMap<Vec<u64>, bool> = Default::default();
            for (p, &l) in points.iter().zip(inside) {
                let key: Vec<u64> = p.iter().map(|c| (c + 0.0).to_bits()).collect();
                if let Some(&prev) = label_of.get(&key) {
                    if prev != l {
                        return Err(Error::InvalidInput(
                            "duplicate point with conflicting labels".into(),
                        ));
                    }
                } else {
                    label_of.insert(key, l);
                }
            }
        }
        let labels: Vec<bool> = kept.iter().map(|&i| inside[i]).collect();
        LabeledGrid::from_cloud(phi, labels, epsilon)
    }

    /// Builds a grid from an already-deduplicated cloud.
    pub fn from_cloud(phi: PointCloud, inside: Vec<bool>, epsilon: f64) -> Result<LabeledGrid> {
        if inside.len() != phi.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} labels",
                phi.len(),
                inside.len()
            )));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidInput(format!("covering radius must be > 0, got {epsilon}")));
        }
        Ok(LabeledGrid { phi, inside, epsilon })
    }

    pub fn phi(&self) -> &PointCloud {
        &self.phi
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_inside(&self, i: usize) -> bool {
        self.inside[i]
    }

    pub fn labels(&self) -> &[bool] {
        &self.inside
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn inside_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.inside[i]).collect()
    }

    pub fn outside_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.inside[i]).collect()
    }

    /// The inside points as a cloud, or `None` when there are none.
    pub fn inside_cloud(&self) -> Option<PointCloud> {
        let ids = self.inside_ids();
        if ids.is_empty() {
            None
        } else {
            Some(self.phi.subcloud(&ids).expect("nonempty"))
        }
    }
}

/// A subset of the grid produced by a discrete dilation or erosion.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetMask {
    /// The signed radius that produced the mask.
    pub r: f64,
    mask: Vec<bool>,
}

impl OffsetMask {
    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.mask
    }
}

/// Discrete offset of the inside points within the grid.
///
/// For `r >= 0`, the dilation `{p in Phi : dist(p, inside) <= r}`; for
/// `r < 0`, the erosion `{a inside : dist(a, outside) > -r}`. Distance to an
/// empty set is `+inf`, which makes the erosion by any radius total when no
/// outside point exists.
pub fn discrete_offset(grid: &LabeledGrid, r: f64) -> Result<OffsetMask> {
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("offset radius must be finite, got {r}")));
    }
    let n = grid.len();
    let mask: Vec<bool> = if r >= 0.0 {
        match grid.inside_cloud() {
            None => vec![false; n],
            Some(inside) => {
                let idx = SpatialIndex::build(&inside);
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        grid.is_inside(i) || idx.nearest_unchecked(grid.phi().point(i)).0 <= r
                    })
                    .collect()
            }
        }
    } else {
        let outside_ids = grid.outside_ids();
        if outside_ids.is_empty() {
            grid.labels().to_vec()
        } else {
            let outside = grid.phi().subcloud(&outside_ids).expect("nonempty");
            let idx = SpatialIndex::build(&outside);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    grid.is_inside(i) && idx.nearest_unchecked(grid.phi().point(i)).0 > -r
                })
                .collect()
        }
    };
    Ok(OffsetMask { r, mask })
}

/// Outside-labeled grid points recaptured by the closing at radius `r` with
/// covering slack `epsilon`: certificates that the sampled set is not
/// r-convex.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationSet {
    pub r: f64,
    pub epsilon: f64,
    /// Ids into the grid, ascending. Every listed point is labeled outside.
    pub points: Vec<usize>,
}

impl ViolationSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Computes the violation set at radius `r`: the outside points `q` such that
/// every grid point within `r + epsilon` of `q` lies in the dilation of the
/// inside points by `r - epsilon`.
///
/// Comparisons are evaluated as `dist + epsilon <= r` and
/// `dist - epsilon <= r` — the same expressions the breakpoint sweep in
/// [`rconv_upper_bound`] minimizes over, so the two agree exactly, including
/// at the infimum itself.
pub fn closing_violations(grid: &LabeledGrid, r: f64, epsilon: f64) -> Result<ViolationSet> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    if !r.is_finite() || r <= epsilon {
        return Err(Error::InvalidInput(format!("radius must satisfy r > epsilon, got r = {r}")));
    }
    let outside = grid.outside_ids();
    let captured: Vec<bool> = match grid.inside_cloud() {
        None => vec![false; grid.len()],
        Some(inside) => {
            let idx = SpatialIndex::build(&inside);
            (0..grid.len())
                .into_par_iter()
                .map(|i| idx.nearest_unchecked(grid.phi().point(i)).0 + epsilon <= r)
                .collect()
        }
    };
    let uncaptured: Vec<usize> = (0..grid.len()).filter(|&i| !captured[i]).collect();

    let points: Vec<usize> = if uncaptured.is_empty() {
        // No escaped point anywhere: the erosion keeps everything.
        outside
    } else {
        let unc_cloud = grid.phi().subcloud(&uncaptured).expect("nonempty");
        let idx = SpatialIndex::build(&unc_cloud);
        outside
            .into_par_iter()
            .filter(|&q| {
                captured[q] && idx.nearest_unchecked(grid.phi().point(q)).0 - epsilon > r
            })
            .collect()
    };
    Ok(ViolationSet { r, epsilon, points })
}

/// Result of [`rconv_upper_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct RconvBoundResult {
    pub value: ExtendedReal,
    pub epsilon: f64,
    pub r_max: f64,
    /// The violating outside point at the infimum.
    pub witness: Option<usize>,
    /// Set when the result was limited by the extent of the sampling: the
    /// infimum is infinite because no outside point exists or because every
    /// violation needs `r > r_max`, or the finite infimum is attained only
    /// once the dilation has consumed every grid point.
    pub window_limited: bool,
}

/// Exact infimum over `r` in `(epsilon, r_max]` of the radii at which the
/// closing recaptures an outside point, by a per-point breakpoint sweep.
///
/// For an outside point `q`, sort the grid by distance `d` to `q` and keep
/// the prefix maxima `M` of the distance-to-inside values. On the interval
/// `[d_k - epsilon, d_(k+1) - epsilon)` exactly the first `k` points
/// constrain `q`, so the smallest radius capturing `q` there is
/// `max(d_k - epsilon, M_k + epsilon)` when that lies in the interval. The
/// bound is the minimum over outside points and intervals. Only points whose
/// distance-to-inside plus `epsilon` stays within `r_max` can ever violate,
/// and only grid points within `r_max + epsilon` of them matter; both filters
/// use the spatial index and do not change the result.
pub fn rconv_upper_bound(grid: &LabeledGrid, epsilon: f64, r_max: f64) -> Result<RconvBoundResult> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !r_max.is_finite() || r_max <= epsilon {
        return Err(Error::InvalidInput(format!(
            "r_max must satisfy r_max > epsilon, got r_max = {r_max}, epsilon = {epsilon}"
        )));
    }
    let outside = grid.outside_ids();
    if outside.is_empty() {
        return Ok(RconvBoundResult {
            value: ExtendedReal::INFINITY,
            epsilon,
            r_max,
            witness: None,
            window_limited: true,
        });
    }
    let inside = grid
        .inside_cloud()
        .ok_or_else(|| Error::InvalidInput("grid has no inside points".into()))?;
    let inside_idx = SpatialIndex::build(&inside);

    // Distance to the inside set, for every grid point.
    let dist_in: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| inside_idx.nearest_unchecked(grid.phi().point(i)).0)
        .collect();
    let m_max = dist_in.iter().cloned().fold(0.0, f64::max);

    let phi_idx = SpatialIndex::build(grid.phi());

    // Capturing q at radius r forces r >= dist_in[q] + epsilon, so processing
    // candidates by increasing distance-to-inside lets the running minimum
    // skip most of them outright; the skips and the per-candidate enumeration
    // cap are strict, so the result and witness match the unpruned sweep.
    let mut candidates: Vec<(f64, usize)> = outside
        .iter()
        .filter(|&&q| dist_in[q] + epsilon <= r_max)
        .map(|&q| (dist_in[q], q))
        .collect();
    candidates.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let running = AtomicMinF64::new();

    let best: Option<(f64, usize)> = candidates
        .par_iter()
        .map_init(Vec::new, |neigh, &(m_q, q)| {
            let snapshot = running.get();
            if m_q + epsilon > snapshot {
                return None;
            }
            let cap = r_max.min(snapshot);
            phi_idx.within_radius_unchecked(grid.phi().point(q), cap + epsilon, neigh);
            let mut prefix_max = 0.0f64;
            let mut t = 0;
            while t < neigh.len() {
                let d = neigh[t].0;
                // Fold in the whole group of equal distances before testing.
                while t < neigh.len() && neigh[t].0 == d {
                    prefix_max = prefix_max.max(dist_in[neigh[t].1]);
                    t += 1;
                }
                let next_d = if t < neigh.len() { neigh[t].0 } else { f64::INFINITY };
                let r_star = (d - epsilon).max(prefix_max + epsilon);
                if r_star <= cap && r_star < next_d - epsilon {
                    // Later intervals only start at larger radii.
                    running.update(r_star);
                    return Some((r_star, q));
                }
            }
            None
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, c) | (c, None) => c,
                (Some(p), Some(q)) => Some(if p <= q { p } else { q }),
            },
        );

    Ok(match best {
        Some((r, q)) => RconvBoundResult {
            value: ExtendedReal::finite(r),
            epsilon,
            r_max,
            witness: Some(q),
            window_limited: r >= m_max + epsilon,
        },
        None => RconvBoundResult {
            value: ExtendedReal::INFINITY,
            epsilon,
            r_max,
            witness: None,
            window_limited: true,
        },
    })
}
