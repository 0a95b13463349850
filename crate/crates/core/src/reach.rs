//! Upper bound on the reach of a compact set from an interior point sample.
//!
//! Given a cloud known to lie in a set `A` with Hausdorff distance to `A` at
//! most `epsilon`, the infimum of `g(alpha, x - epsilon)` over point pairs
//! whose midpoint lies at distance `x >= epsilon` from the cloud never falls
//! below the reach of `A`.

use crate::cloud::{dist2, midpoint_into, PointCloud};
use crate::error::{Error, Result};
use crate::geom::{g, ExtendedReal};
use crate::index::SpatialIndex;
use crate::numeric::AtomicMinF64;
use crate::profile::PairRecord;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

/// Result of [`reach_upper_bound`].
#[derive(Debug, Clone)]
pub struct ReachBoundResult {
    pub value: ExtendedReal,
    pub epsilon: f64,
    /// The admissible pair attaining the infimum; `None` when no pair has a
    /// midpoint at distance `epsilon` or more from the cloud (the bound is
    /// then `+inf`: epsilon exceeds the resolution of the sample).
    pub witness: Option<PairRecord>,
    /// Pairs whose midpoint was actually projected. Not deterministic across
    /// thread schedules; informational only.
    pub pairs_examined: u64,
    /// Pairs skipped because their chord alone ruled them out.
    pub pairs_pruned: u64,
}

#[derive(Clone, Copy)]
struct Candidate {
    gval: f64,
    i: u32,
    j: u32,
    alpha: f64,
    x: f64,
}

fn merge(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, c) | (c, None) => c,
        (Some(p), Some(q)) => {
            if (p.gval, p.i, p.j) <= (q.gval, q.i, q.j) {
                Some(p)
            } else {
                Some(q)
            }
        }
    }
}

/// Computes the reach upper bound for a sample with Hausdorff slack `epsilon`.
///
/// Exact infimum over unordered pairs; the witness is the lexicographically
/// lowest `(i, j)` among pairs attaining it, independent of thread schedule.
/// Pairs are pruned through two value-preserving cutoffs: `g >= alpha/2`
/// (applied before the midpoint projection) and `g >= x - epsilon`; both only
/// ever discard pairs strictly above the running minimum.
pub fn reach_upper_bound(cloud: &PointCloud, epsilon: f64) -> Result<ReachBoundResult> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let n = cloud.len();
    let index = SpatialIndex::build(cloud);
    let shared = AtomicMinF64::new();
    let examined = AtomicU64::new(0);

    let eval = |scratch: &mut Vec<f64>, i: usize, j: usize| -> Option<Candidate> {
        let a = cloud.point(i);
        let b = cloud.point(j);
        let alpha = dist2(a, b).sqrt();
        midpoint_into(a, b, scratch);
        let x = index.nearest_unchecked(scratch).0;
        examined.fetch_add(1, Ordering::Relaxed);
        if x < epsilon {
            return None;
        }
        let gval = g(alpha, x - epsilon).expect("x - eps <= alpha/2 up to slack").value();
        shared.update(gval);
        Some(Candidate { gval, i: i as u32, j: j as u32, alpha, x })
    };

    // Seed the running minimum from a strided subsample so the main sweep can
    // prune from the start.
    let mut seed_best: Option<Candidate> = None;
    {
        let mut scratch = Vec::new();
        let stride = (n / 48).max(1);
        let ids: Vec<usize> = (0..n).step_by(stride).collect();
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                seed_best = merge(seed_best, eval(&mut scratch, i, j));
            }
        }
    }

    let best = (0..n.saturating_sub(1))
        .into_par_iter()
        .fold(
            || (Vec::new(), Vec::new(), None::<Candidate>),
            |(mut scratch, mut neigh, mut acc), i| {
                let radius = 2.0 * shared.get();
                index.within_radius_unchecked(cloud.point(i), radius, &mut neigh);
                for &(alpha, j) in neigh.iter() {
                    if j <= i {
                        continue;
                    }
                    // Strictly worse than the running minimum: g >= alpha/2.
                    if alpha / 2.0 > shared.get() {
                        continue;
                    }
                    acc = merge(acc, eval(&mut scratch, i, j));
                }
                (scratch, neigh, acc)
            },
        )
        .map(|(_, _, acc)| acc)
        .reduce(|| None, merge);
    let best = merge(best, seed_best);

    let pairs_total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    // Seed pairs can be met again by the main sweep; count each at most once.
    let pairs_examined = examined.load(Ordering::Relaxed).min(pairs_total);
    Ok(match best {
        Some(c) => ReachBoundResult {
            value: ExtendedReal::from_raw(c.gval),
            epsilon,
            witness: Some(PairRecord {
                i: c.i as usize,
                j: c.j as usize,
                alpha: c.alpha,
                x: c.x,
                gval: ExtendedReal::from_raw(c.gval),
            }),
            pairs_examined,
            pairs_pruned: pairs_total.saturating_sub(pairs_examined),
        },
        None => ReachBoundResult {
            value: ExtendedReal::INFINITY,
            epsilon,
            witness: None,
            pairs_examined,
            pairs_pruned: pairs_total.saturating_sub(pairs_examined),
        },
    })
}

/// Exhaustive reference sweep without chord pruning. Used by the equivalence
/// tests; identical `(value, witness)` contract.
pub fn reach_upper_bound_exhaustive(cloud: &PointCloud, epsilon: f64) -> Result<ReachBoundResult> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let n = cloud.len();
    let index = SpatialIndex::build(cloud);
    let mut scratch = Vec::new();
    let mut best: Option<Candidate> = None;
    let mut examined = 0;
    for i in 0..n {
        for j in i + 1..n {
            let a = cloud.point(i);
            let b = cloud.point(j);
            let alpha = dist2(a, b).sqrt();
            midpoint_into(a, b, &mut scratch);
            let x = index.nearest_unchecked(&scratch).0;
            examined += 1;
            if x < epsilon {
                continue;
            }
            let gval = g(alpha, x - epsilon)?.value();
            best = merge(
                best,
                Some(Candidate { gval, i: i as u32, j: j as u32, alpha, x }),
            );
        }
    }
    Ok(ReachBoundResult {
        value: best.map_or(ExtendedReal::INFINITY, |c| ExtendedReal::from_raw(c.gval)),
        epsilon,
        witness: best.map(|c| PairRecord {
            i: c.i as usize,
            j: c.j as usize,
            alpha: c.alpha,
            x: c.x,
            gval: ExtendedReal::from_raw(c.gval),
        }),
        pairs_examined: examined,
        pairs_pruned: 0,
    })
}
