//! Computable upper bounds on the reach and r-convexity of compact subsets of
//! R^d, from point samples.
//!
//! Three tools, one geometric kernel:
//!
//! - **Beta-reach profiles** ([`profile()`], [`fit_profile`]): for a finite
//!   point cloud, the exact non-decreasing step function mapping a feature
//!   scale `beta` to the infimum of spherical-cap radii over point pairs
//!   whose midpoint is at least `beta` away from the cloud (or from a
//!   triangle mesh over it). Its value at 0 bounds the reach; a line fitted
//!   away from 0 reads off the reach of a smooth shape as its intercept.
//! - **Reach bound** ([`reach_upper_bound`]): given a sample within Hausdorff
//!   distance `epsilon` of a compact set, a certified upper bound on the
//!   set's reach.
//! - **r-convexity bound** ([`rconv_upper_bound`],
//!   [`closing_violations`]): given inside/outside labels on a sampling grid
//!   with covering radius `epsilon`, the exact smallest radius at which a
//!   dilation-then-erosion inside the grid recaptures an outside point —
//!   a certificate that the sampled set is not r-convex, and an upper bound
//!   for both its r-convexity and its reach.
//!
//! All pairwise sweeps are parallel, deterministic (lowest-index tie-breaking
//! everywhere) and exact: accelerated paths are required to reproduce the
//! brute-force result bit for bit.
//!
//! ```
//! use reachbound::{profile, reach_upper_bound, PointCloud, SpatialIndex};
//!
//! // Four points on the unit circle.
//! let cloud = PointCloud::from_points(&[
//!     vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0],
//! ])?;
//! let index = SpatialIndex::build(&cloud);
//! let profile = profile(&cloud, &index)?;
//! // Half the closest-pair distance at beta = 0 ...
//! assert_eq!(profile.query(0.0).value(), 0.5f64.sqrt());
//! // ... and the circumradius once only center-straddling pairs remain.
//! assert_eq!(profile.query(1.0).value(), 1.0);
//!
//! let bound = reach_upper_bound(&cloud, 0.0)?;
//! assert_eq!(bound.value.value(), 0.5f64.sqrt());
//! # Ok::<(), reachbound::Error>(())
//! ```

pub mod cloud;
pub mod error;
pub mod geom;
pub mod index;
pub mod io;
pub mod mesh;
pub mod numeric;
pub mod oracle;
pub mod profile;
pub mod rconv;
pub mod reach;
pub mod synth;

pub use cloud::{distance, PointCloud};
pub use error::{Error, Result};
pub use geom::{g, g_inv, ExtendedReal, DOMAIN_SLACK};
pub use index::SpatialIndex;
pub use mesh::{distance_to_mesh, load_off, TriangleMesh};
pub use oracle::DistanceOracle;
pub use profile::{
    beta_reach_at, fit_profile, profile, profile_with, BetaReachProfile, PairRecord, ProfileFit,
    ProfileOptions,
};
pub use rconv::{
    closing_violations, covering_radius, discrete_offset, rconv_upper_bound, LabeledGrid,
    OffsetMask, RconvBoundResult, ViolationSet,
};
pub use reach::{reach_upper_bound, reach_upper_bound_exhaustive, ReachBoundResult};
pub use synth::{generate, ground_truth_profile, GroundTruth, ProfileModel, Sample, ShapeKind, ShapeSpec};
