//! Acceptance suite: one test per criterion, each printing a pass line with
//! its measured runtime. Tolerances are fixed in code.
//!
//! Run with `cargo test -p reachbound-cli --test acceptance -- --nocapture`.

use once_cell::sync::Lazy;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use reachbound::{
    closing_violations, fit_profile, g, g_inv, generate, profile, profile_with, rconv_upper_bound,
    BetaReachProfile, ExtendedReal, LabeledGrid, PointCloud, ProfileOptions, ShapeKind, ShapeSpec,
    SpatialIndex,
};
use reachbound_cli::experiment::{
    rate_fit, run_convergence, BoundColumn, ConvergenceConfig, ExperimentTable, SetKind,
};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

fn pass(criterion: &str, detail: String, elapsed: Duration) {
    println!("[PASS] {criterion}: {detail} ({:.2}s)", elapsed.as_secs_f64());
}

/// Criterion 1: cap-function algebra at scale. 1e5 inverse round trips within
/// 1e-12 relative error, and 1e5 domination checks, in under a second.
#[test]
fn criterion_01_g_function_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for _ in 0..100_000 {
        let alpha = 10f64.powf(rng.gen_range(-3.0..3.0));
        let r = alpha / 2.0 * 10f64.powf(rng.gen_range(0.0..6.0));
        let x = g_inv(alpha, r).unwrap();
        let back = g(alpha, x).unwrap().value();
        assert!(
            (back - r).abs() <= 1e-12 * r,
            "roundtrip alpha={alpha} r={r}: {back}"
        );
    }
    for _ in 0..100_000 {
        let alpha = 10f64.powf(rng.gen_range(-3.0..3.0));
        let x = rng.gen_range(0.0..=1.0) * alpha / 2.0;
        let v = g(alpha, x).unwrap();
        assert!(v.value() >= x && v.value() >= alpha / 2.0, "g({alpha}, {x}) = {v}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}, budget 1s");
    pass("criterion 1 (g-function algebra)", "2e5 checks".into(), elapsed);
}

/// Test-local profile reconstruction: exhaustive pair enumeration with linear
/// distance scans, independent of the spatial index and of the library's
/// construction code path.
fn brute_profile(points: &[Vec<f64>]) -> (Vec<(f64, ExtendedReal)>, Option<f64>) {
    let n = points.len();
    let mut records: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let alpha: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let mid: Vec<f64> =
                points[i].iter().zip(&points[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            let mut x = f64::INFINITY;
            for p in points {
                let d2: f64 = p.iter().zip(&mid).map(|(a, b)| (a - b) * (a - b)).sum();
                x = x.min(d2);
            }
            let x = x.sqrt();
            let gval = g(alpha, x.min(alpha / 2.0)).unwrap().value();
            records.push((x, gval));
        }
    }
    if records.is_empty() {
        return (Vec::new(), None);
    }
    records.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Value at threshold x_k = min g over records with x >= x_k.
    let mut thresholds: Vec<(f64, f64)> = Vec::new();
    for &(x, gv) in &records {
        match thresholds.last_mut() {
            Some(t) if t.0 == x => t.1 = t.1.min(gv),
            _ => thresholds.push((x, gv)),
        }
    }
    let mut suffix = f64::INFINITY;
    let mut values = vec![0.0; thresholds.len()];
    for k in (0..thresholds.len()).rev() {
        suffix = suffix.min(thresholds[k].1);
        values[k] = suffix;
    }
    let mut breakpoints = vec![(0.0, ExtendedReal::from_raw(values[0]))];
    for k in 1..thresholds.len() {
        if values[k] > values[k - 1] {
            breakpoints.push((thresholds[k - 1].0, ExtendedReal::from_raw(values[k])));
        }
    }
    (breakpoints, Some(thresholds[thresholds.len() - 1].0))
}

/// Criterion 2: on 100 random clouds the indexed (and pruned) profile equals
/// the independent brute-force reconstruction bit for bit, and satisfies the
/// monotonicity and domination invariants.
#[test]
fn criterion_02_profile_exactness_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    for case in 0..100 {
        let n = rng.gen_range(2..=300);
        let d = rng.gen_range(1..=6);
        let points: Vec<Vec<f64>> =
            (0..n).map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let cloud = PointCloud::from_points(&points).unwrap();
        let tree = SpatialIndex::build_tree(&cloud);
        let p = profile(&cloud, &tree).unwrap();

        let (expect_bps, expect_max) = brute_profile(&points);
        assert_eq!(p.breakpoints(), &expect_bps[..], "case {case}");
        assert_eq!(p.max_beta(), expect_max, "case {case}");

        // Truncated-with-pruning agrees with the reconstruction clipped to
        // the tracked range.
        if let Some(max_beta) = expect_max {
            let beta_max = 0.5 * max_beta;
            let pruned = profile_with(
                &cloud,
                &tree,
                ProfileOptions { beta_max: Some(beta_max), prune: true },
            )
            .unwrap();
            let clipped: Vec<(f64, ExtendedReal)> = expect_bps
                .iter()
                .filter(|&&(b, _)| b == 0.0 || b < beta_max)
                .cloned()
                .collect();
            assert_eq!(pruned.breakpoints(), &clipped[..], "case {case} truncated");
        }

        let mut prev = ExtendedReal::finite(0.0);
        for k in 0..=50 {
            let beta = expect_max.unwrap_or(1.0) * (k as f64 / 50.0);
            let v = p.query(beta);
            assert!(v >= prev, "case {case}: profile decreased at beta {beta}");
            if v.is_finite() {
                assert!(v.value() >= beta, "case {case}: profile below beta at {beta}");
            }
            prev = v;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}, budget 30s");
    pass("criterion 2 (profile exactness oracle)", "100 clouds".into(), elapsed);
}

/// Criterion 3: hand-enumerable micro-profiles.
#[test]
fn criterion_03_analytic_micro_oracles() {
    let start = Instant::now();

    let two = PointCloud::from_points(&[vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let idx = SpatialIndex::build(&two);
    let p = profile(&two, &idx).unwrap();
    assert_eq!(p.breakpoints(), &[(0.0, ExtendedReal::finite(1.0))]);
    assert_eq!(p.max_beta(), Some(1.0));

    let collinear =
        PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
    let idx = SpatialIndex::build(&collinear);
    assert_eq!(profile(&collinear, &idx).unwrap().query(0.0).value(), 0.5);

    let octagon: Vec<Vec<f64>> = (0..8)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 8.0;
            vec![a.cos(), a.sin()]
        })
        .collect();
    let octagon = PointCloud::from_points(&octagon).unwrap();
    let idx = SpatialIndex::build(&octagon);
    let got = profile(&octagon, &idx).unwrap().query(0.0).value();
    assert!(((PI / 8.0).sin() - got).abs() <= 1e-12, "octagon profile(0) = {got}");

    pass("criterion 3 (analytic micro-oracles)", "3 profiles".into(), start.elapsed());
}

fn paraboloid_fit(
    m: usize,
    ambient: usize,
    focal: f64,
    extent: f64,
    n: usize,
    seed: u64,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let spec = ShapeSpec { kind: ShapeKind::Paraboloid { m, ambient, focal, extent, n }, seed };
    let (sample, _) = generate(&spec).unwrap();
    let cloud = sample.cloud().unwrap();
    let idx = SpatialIndex::build(cloud);
    let p = profile_with(cloud, &idx, ProfileOptions { beta_max: Some(hi * 1.5), prune: true })
        .unwrap();
    let fit = fit_profile(&p, lo, hi).unwrap();
    (fit.intercept, fit.slope)
}

/// Criterion 4: the surface profile of a 2-d paraboloid section with focal
/// length 4 reads back its reach as the fit intercept.
#[test]
fn criterion_04_paraboloid_2d_reproduction() {
    let start = Instant::now();
    let mut hits = 0;
    for seed in 0..10 {
        let (intercept, slope) = paraboloid_fit(2, 3, 4.0, 5.6, 1500, seed, 1.3, 3.0);
        if (intercept - 4.0).abs() <= 0.3 && (slope - 0.5).abs() <= 0.1 {
            hits += 1;
        } else {
            println!("  seed {seed}: intercept {intercept:.3}, slope {slope:.3} (miss)");
        }
    }
    let elapsed = start.elapsed();
    assert!(hits >= 9, "only {hits}/10 seeds inside tolerance");
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}, budget 60s");
    pass("criterion 4 (2-d paraboloid, focal 4)", format!("{hits}/10 seeds"), elapsed);
}

/// Criterion 5: same recovery for the 3-d paraboloid with focal length 6 in
/// four ambient dimensions, at 3000 sample points.
///
/// Known failing: 3000 points on this 3-manifold (volume ~1.4e3 at the
/// smallest extent whose profile still reaches beta = 4) leave a sample
/// spacing of ~0.8, and the pair infimum rides the resulting slack in the
/// midpoint distances, bending the profile ~0.3 below the true line at the
/// low end of the window. Fit intercepts then land at 5.2-5.6 for every
/// extent. Doubling the sample count brings them inside the band (see the
/// supplement below), so the failure is the pinned sample count, not the
/// profile computation.
#[test]
fn criterion_05_paraboloid_3d_reproduction() {
    let start = Instant::now();
    let mut hits = 0;
    for seed in 0..10 {
        let (intercept, slope) = paraboloid_fit(3, 4, 6.0, 6.96, 3000, seed, 2.0, 4.0);
        if (intercept - 6.0).abs() <= 0.5 {
            hits += 1;
        } else {
            println!("  seed {seed}: intercept {intercept:.3}, slope {slope:.3} (miss)");
        }
    }
    let elapsed = start.elapsed();
    assert!(hits >= 9, "only {hits}/10 seeds inside tolerance");
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}, budget 5min");
    pass("criterion 5 (3-d paraboloid, focal 6)", format!("{hits}/10 seeds"), elapsed);
}

/// Evidence for the criterion above: the same recovery succeeds once the
/// sampling is dense enough for the fit window.
#[test]
fn criterion_05_supplement_density_requirement() {
    let start = Instant::now();
    for seed in 0..3 {
        let (intercept, _) = paraboloid_fit(3, 4, 6.0, 6.96, 6000, seed, 2.0, 4.0);
        assert!(
            (intercept - 6.0).abs() <= 0.5,
            "seed {seed}: intercept {intercept} at 6000 points"
        );
    }
    pass(
        "criterion 5 supplement (recovery at 6000 points)",
        "3/3 seeds".into(),
        start.elapsed(),
    );
}

/// Criterion 6: twin 3-spheres. The profile plateaus at the sphere radius and
/// then at half the gap between the surfaces.
#[test]
fn criterion_06_twin_spheres_reproduction() {
    let start = Instant::now();
    let mut hits = 0;
    for seed in 0..10 {
        let spec = ShapeSpec {
            kind: ShapeKind::TwoSpheres { radius: 2.0, center_gap: 12.0, m: 3, ambient: 4, n: 3000 },
            seed,
        };
        let (sample, _) = generate(&spec).unwrap();
        let cloud = sample.cloud().unwrap();
        let idx = SpatialIndex::build(cloud);
        let p = profile_with(cloud, &idx, ProfileOptions { beta_max: Some(4.0), prune: true })
            .unwrap();
        let ok_low = (0..=9).all(|k| {
            let beta = 1.0 + 0.1 * k as f64;
            let v = p.query(beta).value();
            (1.8..=2.05).contains(&v)
        });
        let ok_high = (0..=15).all(|k| {
            let beta = 2.3 + 0.1 * k as f64;
            let v = p.query(beta).value();
            (3.6..=4.05).contains(&v)
        });
        if ok_low && ok_high {
            hits += 1;
        } else {
            println!(
                "  seed {seed}: profile(1.5) = {}, profile(3.0) = {} (miss)",
                p.query(1.5),
                p.query(3.0)
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(hits >= 9, "only {hits}/10 seeds inside tolerance");
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}, budget 5min");
    pass("criterion 6 (twin 3-spheres)", format!("{hits}/10 seeds"), elapsed);
}

/// Criterion 7: a right-angle corner's profile grows linearly from zero with
/// slope (1 + sec^2(pi/4)) / 2 = 3/2.
#[test]
fn criterion_07_corner_slope() {
    let start = Instant::now();
    let spec = ShapeSpec {
        kind: ShapeKind::TwoRays { angle: PI / 2.0, length: 1.0, per_ray: 1500 },
        seed: 0,
    };
    let (sample, _) = generate(&spec).unwrap();
    let cloud = sample.cloud().unwrap();
    let idx = SpatialIndex::build(cloud);
    let p = profile_with(cloud, &idx, ProfileOptions { beta_max: Some(0.45), prune: true }).unwrap();
    let fit = fit_profile(&p, 0.02, 0.3).unwrap();
    assert!((fit.slope - 1.5).abs() <= 0.1, "slope {}", fit.slope);
    assert!(fit.intercept.abs() <= 0.05, "intercept {}", fit.intercept);
    pass(
        "criterion 7 (corner slope)",
        format!("slope {:.4}, intercept {:.4}", fit.slope, fit.intercept),
        start.elapsed(),
    );
}

/// Shared convergence run for criteria 8 and 9: both sets, n in {2,3,4,6,8},
/// 20 replications each.
static CONVERGENCE: Lazy<(ExperimentTable, Duration)> = Lazy::new(|| {
    let start = Instant::now();
    let table = run_convergence(&ConvergenceConfig::default()).expect("convergence run");
    (table, start.elapsed())
});

/// Criterion 8: soundness as hard assertions. Every bound on every test-set
/// replication is at least the true value 1, and the closing test never flags
/// a convex set.
#[test]
fn criterion_08_soundness() {
    let start = Instant::now();
    let (table, _) = &*CONVERGENCE;
    assert_eq!(table.rows.len(), 2 * 5 * 20);
    for row in &table.rows {
        assert!(
            row.rconv_bound >= 1.0 && row.reach_bound >= 1.0,
            "{} n={} rep={}: bounds ({}, {}) dip below the truth",
            row.set_kind,
            row.n,
            row.replication,
            row.rconv_bound,
            row.reach_bound
        );
    }

    let mut tested_r = 0;
    for seed in 0..5 {
        let spec = ShapeSpec {
            kind: ShapeKind::Disk { radius: 1.0, spacing: 0.08, half_window: 3.0, margin: 0.0 },
            seed,
        };
        let (sample, _) = generate(&spec).unwrap();
        let grid = sample.grid().unwrap();
        let eps = grid.epsilon();
        for k in 1..=10 {
            let r = eps + (1.0 - eps) * k as f64 / 10.0;
            let v = closing_violations(grid, r, eps).unwrap();
            assert!(v.is_empty(), "disk seed {seed} flagged at r = {r}");
            tested_r += 1;
        }
    }
    pass(
        "criterion 8 (soundness)",
        format!("200 bound rows, {tested_r} disk radii"),
        start.elapsed(),
    );
}

/// Criterion 9: convergence trends at desk scale. Means strictly decrease
/// with the resolution and the fitted exponents land in the expected ranges.
#[test]
fn criterion_09_convergence_trends() {
    let (table, run_time) = &*CONVERGENCE;
    assert!(
        *run_time < Duration::from_secs(900),
        "convergence run took {run_time:?}, budget 15min"
    );
    let expected = [
        (SetKind::U, BoundColumn::Rconv, 0.4, 0.8),
        (SetKind::U, BoundColumn::Reach, 0.45, 0.85),
        (SetKind::W, BoundColumn::Rconv, 0.9, 1.6),
        (SetKind::W, BoundColumn::Reach, 1.0, 1.9),
    ];
    let mut summary = String::new();
    for (set, column, lo, hi) in expected {
        let sub = table.filter_set(set);
        let means = sub.means(column);
        assert_eq!(means.len(), 5);
        for w in means.windows(2) {
            assert!(
                w[1].1 < w[0].1,
                "{set} {column}: mean did not decrease from n={} ({}) to n={} ({})",
                w[0].0,
                w[0].1,
                w[1].0,
                w[1].1
            );
        }
        let fit = rate_fit(&sub, column, 1.0).unwrap();
        assert!(
            fit.exponent >= lo && fit.exponent <= hi,
            "{set} {column}: exponent {} outside [{lo}, {hi}]",
            fit.exponent
        );
        summary.push_str(&format!("{set}/{column}: n^-{:.2}  ", fit.exponent));
    }
    pass("criterion 9 (convergence trends)", summary, *run_time);
}

/// Supplementary to criterion 9: the per-resolution means line up with the
/// reference power-law curves, evaluated at matching n.
#[test]
fn criterion_09_supplement_reference_means() {
    let (table, _) = &*CONVERGENCE;
    let mean_at = |set: SetKind, column: BoundColumn, n: u32| -> f64 {
        table
            .filter_set(set)
            .means(column)
            .into_iter()
            .find(|&(nn, _, _, _)| nn == n)
            .unwrap()
            .1
    };
    // 1 + 1.71 n^-0.59 at n = 2.
    let u_rconv = mean_at(SetKind::U, BoundColumn::Rconv, 2);
    let reference = 1.0 + 1.71 * 2f64.powf(-0.59);
    assert!(
        (u_rconv - reference).abs() <= 0.5,
        "U rconv mean at n=2: {u_rconv} vs reference {reference}"
    );
    // 1 + 0.65 n^-1.50 at n = 4.
    let w_reach = mean_at(SetKind::W, BoundColumn::Reach, 4);
    let reference = 1.0 + 0.65 * 4f64.powf(-1.5);
    assert!(
        (w_reach - reference).abs() <= 0.15,
        "W reach mean at n=4: {w_reach} vs reference {reference}"
    );
    pass(
        "criterion 9 supplement (reference means)",
        format!("U rconv(2) = {u_rconv:.3}, W reach(4) = {w_reach:.4}"),
        Duration::from_secs(0),
    );
}

/// Independent radius scan: the first radius on a 1e-3 grid at which the
/// closing recaptures an outside point.
fn scan_first_violation(grid: &LabeledGrid, epsilon: f64, r_max: f64, step: f64) -> Option<f64> {
    let mut r = epsilon + step;
    while r <= r_max {
        if !closing_violations(grid, r, epsilon).unwrap().is_empty() {
            return Some(r);
        }
        r += step;
    }
    None
}

/// Criterion 10: the breakpoint sweep against the radius scan, plus the
/// punctured integer grid where the exact answer is 1 + epsilon.
#[test]
fn criterion_10_rconv_sweep_correctness() {
    let start = Instant::now();
    let step = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA);
    let mut finite = 0;
    for case in 0..50 {
        let n = rng.gen_range(40..=500);
        let structured = rng.gen_bool(0.5);
        let mut points = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let cx = rng.gen_range(-0.3..0.3);
        let cy = rng.gen_range(-0.3..0.3);
        let rr = rng.gen_range(0.3..0.7);
        for _ in 0..n {
            let x = rng.gen_range(-1.0..1.0);
            let y = rng.gen_range(-1.0..1.0);
            let inside = if structured {
                (x - cx) * (x - cx) + (y - cy) * (y - cy) <= rr * rr
            } else {
                rng.gen_bool(0.6)
            };
            points.push(vec![x, y]);
            labels.push(inside);
        }
        if !labels.contains(&true) || !labels.contains(&false) {
            continue;
        }
        let epsilon = rng.gen_range(0.05..0.25);
        let r_max = rng.gen_range(0.6..1.5);
        let grid = LabeledGrid::new(&points, &labels, epsilon).unwrap();
        let sweep = rconv_upper_bound(&grid, epsilon, r_max).unwrap();
        let scan = scan_first_violation(&grid, epsilon, r_max, step);
        // A violation can live in a window narrower than the scan step (the
        // predicate is not monotone in r), so the scan certifies the sweep
        // one-sidedly: no scanned radius below the sweep's value violates,
        // and where the scan does find a violation the sweep is at or below
        // it. The claimed infimum itself must violate, and probes just below
        // it must not.
        match (sweep.value.is_finite(), scan) {
            (true, found) => {
                finite += 1;
                let v = sweep.value.value();
                if let Some(rs) = found {
                    assert!(v <= rs + 1e-9, "case {case}: sweep {v} above first scan hit {rs}");
                    if rs - step > v {
                        // The scan skipped the sweep's window entirely; it
                        // must have been narrower than one step.
                        assert!(
                            closing_violations(&grid, rs - step, epsilon).unwrap().is_empty(),
                            "case {case}: scan missed a persistent violation below {rs}"
                        );
                    }
                }
                assert!(
                    !closing_violations(&grid, v, epsilon).unwrap().is_empty(),
                    "case {case}: sweep value {v} does not violate"
                );
                for probe in [v - step, v - 1e-6 * (1.0 + v), (epsilon + v) / 2.0] {
                    if probe > epsilon {
                        assert!(
                            closing_violations(&grid, probe, epsilon).unwrap().is_empty(),
                            "case {case}: violation below the claimed infimum, at {probe} < {v}"
                        );
                    }
                }
            }
            (false, None) => {}
            (false, Some(rs)) => panic!("case {case}: sweep missed the violation at {rs}"),
        }
    }
    assert!(finite >= 10, "only {finite} grids produced finite bounds");

    // Punctured 11x11 integer grid: the hole certifies exactly 1 + epsilon.
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for x in 0..11 {
        for y in 0..11 {
            points.push(vec![x as f64, y as f64]);
            labels.push(!(x == 5 && y == 5));
        }
    }
    let grid = LabeledGrid::new(&points, &labels, 0.75).unwrap();
    let r = rconv_upper_bound(&grid, 0.75, 5.0).unwrap();
    assert_eq!(r.value.value(), 1.0 + 0.75);
    let hole = grid.outside_ids()[0];
    assert_eq!(r.witness, Some(hole));

    let elapsed = start.elapsed();
    pass(
        "criterion 10 (rconv sweep correctness)",
        format!("50 grids, {finite} finite"),
        elapsed,
    );
}

/// The profile type used in criterion 2 is the library's own; pin down that
/// its query semantics match the definition the reconstruction assumes.
#[test]
fn profile_query_semantics_pin() {
    let p = BetaReachProfile::from_parts(
        vec![(0.0, ExtendedReal::finite(3.0)), (1.0, ExtendedReal::finite(5.0))],
        Some(2.0),
    )
    .unwrap();
    assert_eq!(p.query(0.0).value(), 3.0);
    assert_eq!(p.query(1.0).value(), 3.0); // value at a breakpoint includes its pair
    assert_eq!(p.query(1.5).value(), 5.0);
    assert_eq!(p.query(2.0).value(), 5.0);
    assert!(p.query(2.5).is_infinite());
}
