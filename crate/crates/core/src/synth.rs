//! Seeded generators for analytic test shapes with known reach, r-convexity
//! and profile behavior.
//!
//! Every generator is deterministic given its seed. The random number
//! generator is ChaCha8 seeded from the 64-bit seed, so replications are
//! portable across platforms.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::ExtendedReal;
use crate::index::SpatialIndex;
use crate::rconv::{covering_radius, LabeledGrid};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Shape family plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// Two segments of the given length joined at the origin by `angle`,
    /// sampled with `per_ray` equally spaced points each (endpoints included;
    /// the shared origin is deduplicated).
    TwoRays { angle: f64, length: f64, per_ray: usize },
    /// Circular arc of the given radius spanning `angle` (at most a half
    /// turn), starting at angle 0, sampled with `n` equally spaced points.
    Arc { radius: f64, angle: f64, n: usize },
    /// Graph of `x -> h_prime * x^2` over `[-1, 1]`, sampled uniformly with
    /// respect to arc length.
    C2Graph { h_prime: f64, n: usize },
    /// Section of the m-dimensional paraboloid `|u|^2 = 2 * focal * height`
    /// in `R^ambient`, sampled uniformly with respect to surface area over
    /// the parameter ball of radius `extent`. Keeping `extent` below about
    /// `1.4 * focal` leaves the vertex curvature, not the rim, in charge of
    /// the reach; the profile's linear stretch then runs out to the rim
    /// height `extent^2 / (2 * focal)`.
    Paraboloid { m: usize, ambient: usize, focal: f64, extent: f64, n: usize },
    /// Union of two m-spheres of the given radius whose centers are
    /// `center_gap > 2 * radius` apart, embedded in `R^ambient`, sampled
    /// uniformly. The reach is the smaller of the sphere radius and half the
    /// gap between the surfaces.
    TwoSpheres { radius: f64, center_gap: f64, m: usize, ambient: usize, n: usize },
    /// Solid disk sampled on a random square lattice covering
    /// `[-(half_window + margin), half_window + margin]^2`; the disk must fit
    /// inside the window.
    Disk { radius: f64, spacing: f64, half_window: f64, margin: f64 },
    /// `{ (x, y) : y <= x^2/2 }` intersected with the window
    /// `[-half_window, half_window]^2`, sampled on a random square lattice.
    /// Reach and r-convexity are 1, decided by the curvature at the origin.
    ///
    /// The lattice covers a `margin` beyond the window (labels there are
    /// outside, since the set is clipped to the window). A closing
    /// certificate at radius `r` inspects a ball of radius `r + epsilon`
    /// around the recaptured point; with a margin of at least
    /// `r_max + 2 * epsilon` every certificate up to `r_max` sees the
    /// sampling it needs, otherwise window truncation can fabricate
    /// violations near where the set meets the window boundary.
    SetU { spacing: f64, half_window: f64, margin: f64 },
    /// `{ (x, y) : |y| >= x^2/2 + 1 }` intersected with the window. Reach and
    /// r-convexity are 1, half the gap between the two components. Margin as
    /// for the previous kind.
    SetW { spacing: f64, half_window: f64, margin: f64 },
}

/// A shape request: the family, its parameters and a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub seed: u64,
}

/// Generator output: either a bare cloud or a labeled grid.
#[derive(Debug, Clone)]
pub enum Sample {
    Cloud(PointCloud),
    Grid(LabeledGrid),
}

impl Sample {
    pub fn cloud(&self) -> Option<&PointCloud> {
        match self {
            Sample::Cloud(c) => Some(c),
            Sample::Grid(_) => None,
        }
    }

    pub fn grid(&self) -> Option<&LabeledGrid> {
        match self {
            Sample::Grid(g) => Some(g),
            Sample::Cloud(_) => None,
        }
    }
}

/// Closed-form profile of an ideal shape, where one is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileModel {
    /// `intercept + slope * beta` for `beta` in `[0, beta_max]`.
    Linear { intercept: f64, slope: f64, beta_max: f64 },
    /// Piecewise-constant plateaus: `(beta_hi, value)` segments, each valid
    /// up to and including its `beta_hi`.
    Steps(Vec<(f64, f64)>),
}

impl ProfileModel {
    /// Model value at `beta`; an error outside the validity range.
    pub fn eval(&self, beta: f64) -> Result<ExtendedReal> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidInput(format!("beta must be finite and >= 0, got {beta}")));
        }
        match self {
            ProfileModel::Linear { intercept, slope, beta_max } => {
                if beta > *beta_max {
                    Err(Error::InvalidInput(format!("beta {beta} beyond model range {beta_max}")))
                } else {
                    Ok(ExtendedReal::finite(intercept + slope * beta))
                }
            }
            ProfileModel::Steps(segments) => segments
                .iter()
                .find(|seg| beta <= seg.0)
                .map(|seg| ExtendedReal::finite(seg.1))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("beta {beta} beyond model range"))
                }),
        }
    }
}

/// Known geometry of the ideal shape behind a sample.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub reach: ExtendedReal,
    pub rconv: ExtendedReal,
    pub profile_model: Option<ProfileModel>,
    /// For lattice grids, the exact covering radius. For deterministic curve
    /// samples, the exact Hausdorff distance to the ideal shape. For random
    /// manifold samples, a probe-based estimate with a 1.25 safety factor.
    pub hausdorff_bound: f64,
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let mut u1: f64 = rng.gen();
    while u1 <= f64::MIN_POSITIVE {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Random orthogonal map of R^dim (Gram-Schmidt on Gaussian columns).
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
            for k in 0..dim {
                v[k] -= proj * c[k];
            }
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-9 {
            cols.push(v.into_iter().map(|c| c / norm).collect());
        }
    }
    cols
}

fn apply_orthogonal(cols: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let dim = cols.len();
    let mut out = vec![0.0; dim];
    for (k, c) in cols.iter().enumerate() {
        for r in 0..dim {
            out[r] += c[r] * x[k];
        }
    }
    out
}

/// Pads with zeros to `ambient` and applies a seeded orthogonal map when the
/// natural dimension is strictly smaller. Distances are preserved, so every
/// profile and bound is unchanged.
fn embed(points: Vec<Vec<f64>>, natural: usize, ambient: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if ambient == natural {
        return points;
    }
    let rot = random_orthogonal(ambient, rng);
    points
        .into_iter()
        .map(|mut p| {
            p.resize(ambient, 0.0);
            apply_orthogonal(&rot, &p)
        })
        .collect()
}

/// Estimates the Hausdorff distance from the sample to the ideal shape by
/// probing with a denser sample of the same distribution.
fn probe_hausdorff(sample: &PointCloud, probes: &[Vec<f64>]) -> f64 {
    let idx = SpatialIndex::build(sample);
    let max = probes
        .iter()
        .map(|p| idx.nearest_unchecked(p).0)
        .fold(0.0, f64::max);
    max * 1.25
}

fn model_of(kind: &ShapeKind) -> Option<ProfileModel> {
    match kind {
        ShapeKind::TwoRays { angle, length, .. } => {
            let sec = 1.0 / (angle / 2.0).cos();
            Some(ProfileModel::Linear {
                intercept: 0.0,
                slope: (1.0 + sec * sec) / 2.0,
                beta_max: length * angle.sin() / 2.0,
            })
        }
        ShapeKind::Arc { radius, angle, .. } => Some(ProfileModel::Linear {
            intercept: *radius,
            slope: 0.0,
            beta_max: radius * (1.0 - (angle / 2.0).cos()),
        }),
        ShapeKind::C2Graph { h_prime, .. } => Some(ProfileModel::Linear {
            intercept: 1.0 / (2.0 * h_prime),
            slope: 0.5,
            beta_max: *h_prime,
        }),
        ShapeKind::Paraboloid { focal, extent, .. } => Some(ProfileModel::Linear {
            intercept: *focal,
            slope: 0.5,
            beta_max: extent * extent / (2.0 * focal),
        }),
        ShapeKind::TwoSpheres { radius, center_gap, .. } => {
            // Chords of a sphere all see the same cap radius, so the sphere
            // fills the cells up to its radius at that value; the bottleneck
            // between the surfaces fills the cells up to half the gap.
            let half_gap = (center_gap - 2.0 * radius) / 2.0;
            if half_gap >= *radius {
                Some(ProfileModel::Steps(vec![(*radius, *radius), (half_gap, half_gap)]))
            } else {
                Some(ProfileModel::Steps(vec![(half_gap, half_gap)]))
            }
        }
        ShapeKind::Disk { .. } | ShapeKind::SetU { .. } | ShapeKind::SetW { .. } => None,
    }
}

fn validate(kind: &ShapeKind) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidInput(msg));
    match *kind {
        ShapeKind::TwoRays { angle, length, per_ray } => {
            if !(angle > 0.0 && angle < PI) {
                return bad(format!("two-rays angle must lie in (0, pi), got {angle}"));
            }
            if !(length > 0.0) || per_ray < 2 {
                return bad("two-rays needs length > 0 and per_ray >= 2".into());
            }
        }
        ShapeKind::Arc { radius, angle, n } => {
            if !(radius > 0.0) || !(angle > 0.0 && angle <= PI) || n < 2 {
                return bad("arc needs radius > 0, angle in (0, pi], n >= 2".into());
            }
        }
        ShapeKind::C2Graph { h_prime, n } => {
            if !(h_prime > 0.0) || n < 2 {
                return bad("c2-graph needs h_prime > 0 and n >= 2".into());
            }
        }
        ShapeKind::Paraboloid { m, ambient, focal, extent, n } => {
            if m < 1 || ambient < m + 1 || !(focal > 0.0) || !(extent > 0.0) || n < 1 {
                return bad(
                    "paraboloid needs m >= 1, ambient >= m+1, focal > 0, extent > 0, n >= 1".into(),
                );
            }
        }
        ShapeKind::TwoSpheres { radius, center_gap, m, ambient, n } => {
            if m < 1 || ambient < m + 1 || !(radius > 0.0) || n < 1 {
                return bad("two-spheres needs m >= 1, ambient >= m+1, radius > 0, n >= 1".into());
            }
            if !(center_gap > 2.0 * radius) {
                return bad(format!(
                    "two-spheres needs center_gap > 2 * radius, got {center_gap} <= {}",
                    2.0 * radius
                ));
            }
        }
        ShapeKind::Disk { radius, spacing, half_window, margin } => {
            if !(radius > 0.0 && spacing > 0.0 && half_window > radius && margin >= 0.0) {
                return bad("disk needs radius > 0, spacing > 0, half_window > radius, margin >= 0".into());
            }
        }
        ShapeKind::SetU { spacing, half_window, margin }
        | ShapeKind::SetW { spacing, half_window, margin } => {
            if !(spacing > 0.0 && half_window > 1.0 && margin >= 0.0) {
                return bad("lattice set needs spacing > 0, half_window > 1, margin >= 0".into());
            }
        }
    }
    Ok(())
}

fn lattice_grid(
    spacing: f64,
    half_window: f64,
    margin: f64,
    rng: &mut ChaCha8Rng,
    label: impl Fn(f64, f64) -> bool,
) -> Result<LabeledGrid> {
    let theta = rng.gen_range(0.0..2.0 * PI);
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let ox = rng.gen_range(0.0..spacing);
    let oy = rng.gen_range(0.0..spacing);
    let extent = half_window + margin;
    let reach = ((extent * std::f64::consts::SQRT_2) / spacing).ceil() as i64 + 2;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            let lx = i as f64 * spacing + ox;
            let ly = j as f64 * spacing + oy;
            let x = cos_t * lx - sin_t * ly;
            let y = sin_t * lx + cos_t * ly;
            if x.abs() <= extent && y.abs() <= extent {
                points.push(vec![x, y]);
                labels.push(
                    x.abs() <= half_window && y.abs() <= half_window && label(x, y),
                );
            }
        }
    }
    LabeledGrid::new(&points, &labels, covering_radius(spacing, 2)?)
}

/// Generates the sample for `spec` together with its ground truth.
pub fn generate(spec: &ShapeSpec) -> Result<(Sample, GroundTruth)> {
    validate(&spec.kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let model = model_of(&spec.kind);

    match spec.kind {
        ShapeKind::TwoRays { angle, length, per_ray } => {
            let mut pts = Vec::with_capacity(2 * per_ray);
            let step = length / (per_ray - 1) as f64;
            for dir in [(1.0, 0.0), (angle.cos(), angle.sin())] {
                for k in 0..per_ray {
                    let t = k as f64 * step;
                    pts.push(vec![t * dir.0, t * dir.1]);
                }
            }
            let cloud = PointCloud::from_points(&pts)?;
            Ok((
                Sample::Cloud(cloud),
                GroundTruth {
                    reach: ExtendedReal::finite(0.0),
                    rconv: ExtendedReal::finite(0.0),
                    profile_model: model,
                    hausdorff_bound: step / 2.0,
                },
            ))
        }
        ShapeKind::Arc { radius, angle, n } => {
            let step = angle / (n - 1) as f64;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    let a = k as f64 * step;
                    vec![radius * a.cos(), radius * a.sin()]
                })
                .collect();
            let cloud = PointCloud::from_points(&pts)?;
            Ok((
                Sample::Cloud(cloud),
                GroundTruth {
                    reach: ExtendedReal::finite(radius),
                    rconv: ExtendedReal::finite(radius),
                    profile_model: model,
                    hausdorff_bound: 2.0 * radius * (step / 4.0).sin(),
                },
            ))
        }
        ShapeKind::C2Graph { h_prime, n } => {
            let weight_max = (1.0 + 4.0 * h_prime * h_prime).sqrt();
            let draw = |rng: &mut ChaCha8Rng| loop {
                let x = rng.gen_range(-1.0..=1.0);
                let slope = 2.0 * h_prime * x;
                let w = (1.0 + slope * slope).sqrt();
                if rng.gen::<f64>() * weight_max <= w {
                    return vec![x, h_prime * x * x];
                }
            };
            let pts: Vec<Vec<f64>> = (0..n).map(|_| draw(&mut rng)).collect();
            let cloud = PointCloud::from_points(&pts)?;
            let probes: Vec<Vec<f64>> = (0..4 * n).map(|_| draw(&mut rng)).collect();
            let hausdorff = probe_hausdorff(&cloud, &probes);
            Ok((
                Sample::Cloud(cloud),
                GroundTruth {
                    reach: ExtendedReal::finite(1.0 / (2.0 * h_prime)),
                    rconv: ExtendedReal::finite(1.0 / (2.0 * h_prime)),
                    profile_model: model,
                    hausdorff_bound: hausdorff,
                },
            ))
        }
        ShapeKind::Paraboloid { m, ambient, focal, extent, n } => {
            let rho_max = extent;
            let weight_max = (1.0 + (rho_max / focal) * (rho_max / focal)).sqrt();
            let draw = |rng: &mut ChaCha8Rng| loop {
                let dir = unit_vector(m, rng);
                let rho = rho_max * rng.gen::<f64>().powf(1.0 / m as f64);
                let w = (1.0 + (rho / focal) * (rho / focal)).sqrt();
                if rng.gen::<f64>() * weight_max <= w {
                    let mut p: Vec<f64> = dir.iter().map(|d| d * rho).collect();
                    p.push(rho * rho / (2.0 * focal));
                    return p;
                }
            };
            let raw: Vec<Vec<f64>> = (0..n).map(|_| draw(&mut rng)).collect();
            let probes_raw: Vec<Vec<f64>> = (0..4 * n).map(|_| draw(&mut rng)).collect();
            // The embedding is isometric, so the estimate computed in natural
            // coordinates carries over unchanged.
            let hausdorff = {
                let nat = PointCloud::from_points(&raw)?;
                probe_hausdorff(&nat, &probes_raw)
            };
            let pts = embed(raw, m + 1, ambient, &mut rng);
            let cloud = PointCloud::from_points(&pts)?;
            Ok((
                Sample::Cloud(cloud),
                GroundTruth {
                    reach: ExtendedReal::finite(focal),
                    rconv: ExtendedReal::finite(focal),
                    profile_model: model,
                    hausdorff_bound: hausdorff,
                },
            ))
        }
        ShapeKind::TwoSpheres { radius, center_gap, m, ambient, n } => {
            let half = center_gap / 2.0;
            let draw = |rng: &mut ChaCha8Rng| {
                let right = rng.gen_bool(0.5);
                let dir = unit_vector(m + 1, rng);
                let mut p: Vec<f64> = dir.iter().map(|d| d * radius).collect();
                p[0] += if right { half } else { -half };
                p
            };
            let raw: Vec<Vec<f64>> = (0..n).map(|_| draw(&mut rng)).collect();
            let probes: Vec<Vec<f64>> = (0..4 * n).map(|_| draw(&mut rng)).collect();
            let hausdorff = {
                let nat = PointCloud::from_points(&raw)?;
                probe_hausdorff(&nat, &probes)
            };
            let pts = embed(raw, m + 1, ambient, &mut rng);
            let cloud = PointCloud::from_points(&pts)?;
            let reach = radius.min((center_gap - 2.0 * radius) / 2.0);
            Ok((
                Sample::Cloud(cloud),
                GroundTruth {
                    reach: ExtendedReal::finite(reach),
                    rconv: ExtendedReal::finite(reach),
                    profile_model: model,
                    hausdorff_bound: hausdorff,
                },
            ))
        }
        ShapeKind::Disk { radius, spacing, half_window, margin } => {
            let grid = lattice_grid(spacing, half_window, margin, &mut rng, |x, y| {
                x * x + y * y <= radius * radius
            })?;
            let eps = grid.epsilon();
            Ok((
                Sample::Grid(grid),
                GroundTruth {
                    reach: ExtendedReal::INFINITY,
                    rconv: ExtendedReal::INFINITY,
                    profile_model: model,
                    hausdorff_bound: eps,
                },
            ))
        }
        ShapeKind::SetU { spacing, half_window, margin } => {
            let grid =
                lattice_grid(spacing, half_window, margin, &mut rng, |x, y| y <= x * x / 2.0)?;
            let eps = grid.epsilon();
            Ok((
                Sample::Grid(grid),
                GroundTruth {
                    reach: ExtendedReal::finite(1.0),
                    rconv: ExtendedReal::finite(1.0),
                    profile_model: model,
                    hausdorff_bound: eps,
                },
            ))
        }
        ShapeKind::SetW { spacing, half_window, margin } => {
            let grid = lattice_grid(spacing, half_window, margin, &mut rng, |x, y| {
                y.abs() >= x * x / 2.0 + 1.0
            })?;
            let eps = grid.epsilon();
            Ok((
                Sample::Grid(grid),
                GroundTruth {
                    reach: ExtendedReal::finite(1.0),
                    rconv: ExtendedReal::finite(1.0),
                    profile_model: model,
                    hausdorff_bound: eps,
                },
            ))
        }
    }
}

/// Closed-form profile value of the ideal shape behind `spec` at `beta`.
/// Errors when the shape has no model or `beta` is outside its range.
pub fn ground_truth_profile(spec: &ShapeSpec, beta: f64) -> Result<ExtendedReal> {
    validate(&spec.kind)?;
    match model_of(&spec.kind) {
        Some(model) => model.eval(beta),
        None => Err(Error::InvalidInput("shape has no closed-form profile model".into())),
    }
}
