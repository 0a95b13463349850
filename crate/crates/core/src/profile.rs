//! Exact beta-reach profiles of finite point clouds.
//!
//! For every unordered pair of cloud points the midpoint is projected onto a
//! distance oracle (the cloud itself, or a triangle mesh over it). The profile
//! at `beta` is the infimum of the spherical-cap radius `g(alpha, x)` over the
//! pairs whose midpoint distance `x` is at least `beta`. At `beta = 0` this
//! infimum is an upper bound for the reach of any set the cloud represents.

use crate::cloud::{dist2, midpoint_into, PointCloud};
use crate::error::{Error, Result};
use crate::geom::{g, ExtendedReal};
use crate::numeric::ols_line;
use crate::oracle::DistanceOracle;
use rayon::prelude::*;

/// One unordered pair of cloud points, as examined by the profile and bound
/// sweeps.
///
/// `gval` is the spherical-cap radius used in the sweep that produced the
/// record: `g(alpha, min(x, alpha/2))` in profile context, `g(alpha, x - eps)`
/// when the record witnesses a reach bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    /// Distance between the two points.
    pub alpha: f64,
    /// Distance from the pair midpoint to the oracle.
    pub x: f64,
    pub gval: ExtendedReal,
}

/// A beta-reach profile: a non-decreasing step function of `beta`.
///
/// `breakpoints` lists `(beta, value)` with strictly increasing betas and
/// strictly increasing values; entry `k` holds on the interval from its beta
/// (inclusive at the low end for the first entry) up to and including the next
/// entry's beta. Beyond `max_beta` — the largest midpoint distance over all
/// pairs — the profile is `+inf`. The value at a breakpoint includes the pair
/// that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaReachProfile {
    breakpoints: Vec<(f64, ExtendedReal)>,
    max_beta: Option<f64>,
    valid_to: Option<f64>,
}

impl BetaReachProfile {
    /// Breakpoints `(beta, value)`, betas strictly increasing.
    pub fn breakpoints(&self) -> &[(f64, ExtendedReal)] {
        &self.breakpoints
    }

    /// Largest beta with a finite value; `None` when every value is infinite.
    pub fn max_beta(&self) -> Option<f64> {
        self.max_beta
    }

    /// `Some(b)` when the profile was only computed for `beta <= b`.
    pub fn valid_to(&self) -> Option<f64> {
        self.valid_to
    }

    /// Rebuilds a profile from serialized parts. Breakpoint betas must be
    /// strictly increasing and values non-decreasing.
    pub fn from_parts(
        breakpoints: Vec<(f64, ExtendedReal)>,
        max_beta: Option<f64>,
    ) -> Result<BetaReachProfile> {
        for w in breakpoints.windows(2) {
            if !(w[0].0 < w[1].0) || !(w[0].1 <= w[1].1) {
                return Err(Error::InvalidInput("profile breakpoints not monotone".into()));
            }
        }
        if let (Some(mb), Some(last)) = (max_beta, breakpoints.last()) {
            if mb < last.0 {
                return Err(Error::InvalidInput("profile terminal beta below last breakpoint".into()));
            }
        }
        if max_beta.is_none() && !breakpoints.is_empty() {
            return Err(Error::InvalidInput("profile with breakpoints needs a terminal beta".into()));
        }
        Ok(BetaReachProfile { breakpoints, max_beta, valid_to: None })
    }

    /// Value of the step function at `beta` (negative betas are treated as 0).
    pub fn query(&self, beta: f64) -> ExtendedReal {
        let beta = beta.max(0.0);
        match self.max_beta {
            None => ExtendedReal::INFINITY,
            Some(mb) if beta > mb => ExtendedReal::INFINITY,
            Some(_) => {
                let idx = self.breakpoints.partition_point(|&(b, _)| b < beta);
                if idx == 0 {
                    self.breakpoints[0].1
                } else {
                    self.breakpoints[idx - 1].1
                }
            }
        }
    }
}

/// Options for [`profile_with`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Compute the profile only on `[0, beta_max]`. `None` means the full
    /// profile.
    pub beta_max: Option<f64>,
    /// With a finite `beta_max`, stream pairs in increasing chord length and
    /// stop once no remaining pair can change a tracked value (every remaining
    /// `g` is at least `alpha/2`, which already exceeds the running value at
    /// `beta_max`). Value-preserving on the tracked range; disable to force
    /// exhaustive enumeration.
    pub prune: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { beta_max: None, prune: true }
    }
}

fn check_oracle_dim(cloud: &PointCloud, oracle: &(impl DistanceOracle + ?Sized)) -> Result<()> {
    if oracle.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), got: oracle.dim() });
    }
    Ok(())
}

#[inline]
fn pair_gval(alpha: f64, x: f64) -> f64 {
    // Midpoint distances sit in [0, alpha/2] for a cloud oracle; a foreign
    // oracle may report more, in which case the cap height saturates.
    let h = x.min(alpha / 2.0);
    g(alpha, h).expect("saturated cap height is always in domain").value()
}

/// Evaluates one pair against the oracle.
fn eval_pair(
    cloud: &PointCloud,
    oracle: &(impl DistanceOracle + ?Sized),
    scratch: &mut Vec<f64>,
    i: usize,
    j: usize,
) -> (f64, f64) {
    let a = cloud.point(i);
    let b = cloud.point(j);
    let alpha = dist2(a, b).sqrt();
    midpoint_into(a, b, scratch);
    let x = oracle.distance(scratch);
    (x, pair_gval(alpha, x))
}

/// The beta-reach of `cloud` with respect to `oracle` at a single `beta`:
/// the infimum of `g` over pairs with midpoint distance at least `beta`.
pub fn beta_reach_at(
    cloud: &PointCloud,
    oracle: &(impl DistanceOracle + ?Sized),
    beta: f64,
) -> Result<ExtendedReal> {
    check_oracle_dim(cloud, oracle)?;
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidInput(format!("beta must be finite and >= 0, got {beta}")));
    }
    let n = cloud.len();
    let best = (0..n.saturating_sub(1))
        .into_par_iter()
        .map_init(Vec::new, |scratch, i| {
            let mut local = f64::INFINITY;
            for j in i + 1..n {
                let (x, gv) = eval_pair(cloud, oracle, scratch, i, j);
                if x >= beta && gv < local {
                    local = gv;
                }
            }
            local
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(ExtendedReal::from_raw(best))
}

/// Canonical profile construction from `(x, g)` pair records. Order of the
/// input is irrelevant, so parallel enumeration cannot change the result.
fn build_profile(mut records: Vec<(f64, f64)>, valid_to: Option<f64>) -> BetaReachProfile {
    records.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    // Collapse ties in x to their minimal g, then suffix-minimize so that
    // cells[k] = inf { g : x >= x_k }.
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for (x, gv) in records {
        match cells.last_mut() {
            Some(last) if last.0 == x => last.1 = last.1.min(gv),
            _ => cells.push((x, gv)),
        }
    }
    for k in (0..cells.len().saturating_sub(1)).rev() {
        cells[k].1 = cells[k].1.min(cells[k + 1].1);
    }

    let mut breakpoints: Vec<(f64, ExtendedReal)> = Vec::new();
    let mut max_beta = None;
    if !cells.is_empty() {
        max_beta = Some(cells[cells.len() - 1].0);
        breakpoints.push((0.0, ExtendedReal::from_raw(cells[0].1)));
        for k in 1..cells.len() {
            if cells[k].1 > cells[k - 1].1 {
                // The higher value starts strictly above the previous distinct x.
                breakpoints.push((cells[k - 1].0, ExtendedReal::from_raw(cells[k].1)));
            }
        }
    }

    let mut profile = BetaReachProfile { breakpoints, max_beta, valid_to: None };
    if let Some(b) = valid_to {
        profile.breakpoints.retain(|&(beta, _)| beta == 0.0 || beta < b);
        profile.max_beta = profile.max_beta.map(|m| m.min(b));
        profile.valid_to = Some(b);
    }
    profile
}

/// The exact beta-reach profile of `cloud` against `oracle`.
pub fn profile(
    cloud: &PointCloud,
    oracle: &(impl DistanceOracle + ?Sized),
) -> Result<BetaReachProfile> {
    profile_with(cloud, oracle, ProfileOptions::default())
}

/// Profile computation with an optional tracked range and pruning.
pub fn profile_with(
    cloud: &PointCloud,
    oracle: &(impl DistanceOracle + ?Sized),
    opts: ProfileOptions,
) -> Result<BetaReachProfile> {
    check_oracle_dim(cloud, oracle)?;
    if let Some(b) = opts.beta_max {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidInput(format!("beta_max must be finite and >= 0, got {b}")));
        }
    }
    let n = cloud.len();

    if let (Some(beta_max), true) = (opts.beta_max, opts.prune) {
        return Ok(profile_streamed(cloud, oracle, beta_max));
    }

    let records: Vec<(f64, f64)> = (0..n.saturating_sub(1))
        .into_par_iter()
        .map_init(Vec::new, |scratch, i| {
            let mut out = Vec::with_capacity(n - i - 1);
            for j in i + 1..n {
                out.push(eval_pair(cloud, oracle, scratch, i, j));
            }
            out
        })
        .flatten()
        .collect();
    Ok(build_profile(records, opts.beta_max))
}

/// Streams pairs by increasing chord length and stops as soon as the running
/// value at `beta_max` rules out every remaining pair.
///
/// Remaining pairs satisfy `g >= alpha/2`. Once `alpha/2` reaches the current
/// value at `beta_max` — an upper bound for the current value at every tracked
/// cell, the profile being non-decreasing — no remaining pair can lower a
/// tracked value, so the truncated profile is already exact.
fn profile_streamed(
    cloud: &PointCloud,
    oracle: &(impl DistanceOracle + ?Sized),
    beta_max: f64,
) -> BetaReachProfile {
    let n = cloud.len();
    let mut pairs: Vec<(f64, u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let a = cloud.point(i);
        for j in i + 1..n {
            pairs.push((dist2(a, cloud.point(j)).sqrt(), i as u32, j as u32));
        }
    }
    pairs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    const CHUNK: usize = 1 << 14;
    let mut records: Vec<(f64, f64)> = Vec::new();
    let mut value_at_cutoff = f64::INFINITY;
    let mut exhausted = true;
    for chunk in pairs.chunks(CHUNK) {
        if chunk[0].0 / 2.0 >= value_at_cutoff {
            exhausted = false;
            break;
        }
        let evaluated: Vec<(f64, f64)> = chunk
            .par_iter()
            .map_init(Vec::new, |scratch, &(alpha, i, j)| {
                let a = cloud.point(i as usize);
                let b = cloud.point(j as usize);
                midpoint_into(a, b, scratch);
                let x = oracle.distance(scratch);
                (x, pair_gval(alpha, x))
            })
            .collect();
        for &(x, gv) in &evaluated {
            if x >= beta_max && gv < value_at_cutoff {
                value_at_cutoff = gv;
            }
        }
        records.extend_from_slice(&evaluated);
    }

    let mut profile = build_profile(records, Some(beta_max));
    if !exhausted {
        // Every tracked cell is finite here, so the truncated range is fully
        // described even though larger pairs were never evaluated.
        profile.max_beta = Some(beta_max);
    }
    profile
}

/// An ordinary least-squares line through profile samples in a beta window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFit {
    pub beta_lo: f64,
    pub beta_hi: f64,
    /// Extrapolated value at `beta = 0` — the reach estimate.
    pub intercept: f64,
    /// Growth rate of the profile in the window — an empirical proxy for the
    /// first-order coefficient of the profile at 0.
    pub slope: f64,
    pub rms_residual: f64,
    pub samples: usize,
}

/// Fits a line to the step function over `[beta_lo, beta_hi]`.
///
/// Samples are the stored breakpoints inside the window plus the window
/// endpoints (evaluated through the step function), deduplicated by abscissa
/// and restricted to finite values; every sample has equal weight.
pub fn fit_profile(p: &BetaReachProfile, beta_lo: f64, beta_hi: f64) -> Result<ProfileFit> {
    if !(beta_lo.is_finite() && beta_hi.is_finite()) || beta_lo < 0.0 || beta_lo >= beta_hi {
        return Err(Error::InvalidInput(format!("bad fit window [{beta_lo}, {beta_hi}]")));
    }
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for &(b, v) in p.breakpoints() {
        if b >= beta_lo && b <= beta_hi && v.is_finite() {
            samples.push((b, v.value()));
        }
    }
    for b in [beta_lo, beta_hi] {
        if !samples.iter().any(|s| s.0 == b) {
            let v = p.query(b);
            if v.is_finite() {
                samples.push((b, v.value()));
            }
        }
    }
    if samples.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "fit window [{beta_lo}, {beta_hi}] contains {} finite profile value(s), need 2",
            samples.len()
        )));
    }
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let line = ols_line(&samples).expect("two or more distinct abscissae");
    Ok(ProfileFit {
        beta_lo,
        beta_hi,
        intercept: line.intercept,
        slope: line.slope,
        rms_residual: line.rms_residual,
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::SpatialIndex;

    fn cloud(points: &[Vec<f64>]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    #[test]
    fn two_point_cloud_profile() {
        let c = cloud(&[vec![-1.0, 0.0], vec![1.0, 0.0]]);
        let idx = SpatialIndex::build(&c);
        let p = profile(&c, &idx).unwrap();
        assert_eq!(p.breakpoints(), &[(0.0, ExtendedReal::finite(1.0))]);
        assert_eq!(p.max_beta(), Some(1.0));
        assert_eq!(p.query(0.0).value(), 1.0);
        assert_eq!(p.query(1.0).value(), 1.0);
        assert!(p.query(1.5).is_infinite());
        assert_eq!(beta_reach_at(&c, &idx, 0.0).unwrap().value(), 1.0);
        assert!(beta_reach_at(&c, &idx, 1.5).unwrap().is_infinite());
    }

    #[test]
    fn three_collinear_points() {
        let c = cloud(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        let idx = SpatialIndex::build(&c);
        assert_eq!(beta_reach_at(&c, &idx, 0.0).unwrap().value(), 0.5);
        let p = profile(&c, &idx).unwrap();
        assert_eq!(p.query(0.0).value(), 0.5);
        assert_eq!(p.max_beta(), Some(0.5));
    }

    #[test]
    fn octagon_profile_at_zero() {
        let n = 8;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let c = cloud(&pts);
        let idx = SpatialIndex::build(&c);
        let v = profile(&c, &idx).unwrap().query(0.0).value();
        let expected = (std::f64::consts::PI / 8.0).sin();
        assert!((v - expected).abs() <= 1e-12, "{v} vs {expected}");
    }

    #[test]
    fn profile_matches_pointwise_queries() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..40);
            let d = rng.gen_range(1..4);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let c = cloud(&pts);
            let idx = SpatialIndex::build(&c);
            let p = profile(&c, &idx).unwrap();
            for _ in 0..30 {
                let beta = rng.gen_range(0.0..2.0);
                assert_eq!(p.query(beta), beta_reach_at(&c, &idx, beta).unwrap());
            }
            // At beta = 0 the infimum is half the closest-pair distance.
            let mut closest = f64::INFINITY;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    closest = closest.min(crate::cloud::distance(&pts[i], &pts[j]));
                }
            }
            assert_eq!(p.query(0.0).value(), closest / 2.0);
        }
    }

    #[test]
    fn finite_set_bottleneck_plateau() {
        // The infimum at beta = 0 comes from the closest pair, whose midpoint
        // realizes it; the profile stays at that value all the way up to it.
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..15 {
            let n = rng.gen_range(2..50);
            let d = rng.gen_range(1..4);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let c = cloud(&pts);
            let idx = SpatialIndex::build(&c);
            let p = profile(&c, &idx).unwrap();
            let v0 = p.query(0.0);
            for k in 0..=10 {
                let beta = v0.value() * (k as f64 / 10.0);
                assert_eq!(p.query(beta), v0);
            }
        }
    }

    #[test]
    fn truncated_profile_agrees_with_full() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.gen_range(3..60);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
            let c = cloud(&pts);
            let idx = SpatialIndex::build(&c);
            let full = profile(&c, &idx).unwrap();
            let beta_max = rng.gen_range(0.0..0.8);
            let pruned =
                profile_with(&c, &idx, ProfileOptions { beta_max: Some(beta_max), prune: true })
                    .unwrap();
            let plain =
                profile_with(&c, &idx, ProfileOptions { beta_max: Some(beta_max), prune: false })
                    .unwrap();
            assert_eq!(pruned.breakpoints(), plain.breakpoints());
            for k in 0..=40 {
                let beta = beta_max * (k as f64 / 40.0);
                assert_eq!(pruned.query(beta), full.query(beta));
            }
        }
    }

    #[test]
    fn fit_recovers_an_exact_line() {
        let p = BetaReachProfile::from_parts(
            vec![
                (0.0, ExtendedReal::finite(4.0)),
                (1.0, ExtendedReal::finite(4.5)),
                (2.0, ExtendedReal::finite(5.0)),
            ],
            Some(2.5),
        )
        .unwrap();
        let fit = fit_profile(&p, 0.0, 2.0).unwrap();
        assert!((fit.intercept - 4.0).abs() < 1e-12);
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn fit_requires_two_finite_samples() {
        let c = cloud(&[vec![-1.0, 0.0], vec![1.0, 0.0]]);
        let idx = SpatialIndex::build(&c);
        let p = profile(&c, &idx).unwrap();
        assert!(fit_profile(&p, 2.0, 3.0).is_err());
    }

    #[test]
    fn mesh_oracle_profile() {
        use crate::mesh::TriangleMesh;
        // Two points straddling a square mesh in the plane z = 0; the mesh
        // pushes every midpoint distance to its out-of-plane height.
        let mesh = TriangleMesh::new(
            vec![
                [-2.0, -2.0, 0.0],
                [2.0, -2.0, 0.0],
                [2.0, 2.0, 0.0],
                [-2.0, 2.0, 0.0],
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let c = cloud(&[vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]]);
        let p = profile(&c, &mesh).unwrap();
        // alpha = 2, x = height 1 above the slab.
        assert_eq!(p.query(0.0).value(), 1.0);
        assert_eq!(p.max_beta(), Some(1.0));
    }
}
