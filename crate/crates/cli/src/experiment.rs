//! Convergence experiment harness: lattice-sampled test sets at a ladder of
//! resolutions, both bounds per replication, and log-log rate fits.

use rayon::prelude::*;
use reachbound::{
    covering_radius, generate, rconv_upper_bound, reach_upper_bound, Error, Result, Sample,
    ShapeKind, ShapeSpec,
};
use std::fmt;
use std::io::{BufRead, Write};
use std::time::Instant;

/// Which lattice-sampled test set a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    /// Sub-parabola region; reach limited by curvature at the origin.
    U,
    /// Two parabolic lobes; reach limited by the bottleneck between them.
    W,
}

impl SetKind {
    pub fn parse(s: &str) -> Result<SetKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u" | "set_u" | "set-u" => Ok(SetKind::U),
            "w" | "set_w" | "set-w" => Ok(SetKind::W),
            other => Err(Error::InvalidInput(format!("unknown set kind {other:?}"))),
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetKind::U => write!(f, "set_u"),
            SetKind::W => write!(f, "set_w"),
        }
    }
}

/// One replication of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub set_kind: SetKind,
    pub n: u32,
    pub replication: u32,
    pub seed: u64,
    pub rconv_bound: f64,
    pub reach_bound: f64,
    pub epsilon_rconv: f64,
    pub epsilon_reach: f64,
    pub runtime_s: f64,
}

/// Rows ordered by (set, n, replication) regardless of completion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

/// Which bound column a fit reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundColumn {
    Rconv,
    Reach,
}

impl fmt::Display for BoundColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundColumn::Rconv => write!(f, "rconv_bound"),
            BoundColumn::Reach => write!(f, "reach_bound"),
        }
    }
}

/// Convergence run parameters. Lattice spacing is `0.7 / n`; the r-convexity
/// bound uses the exact lattice covering radius and the reach bound uses
/// `epsilon_scale * spacing`.
#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub sets: Vec<SetKind>,
    pub n_list: Vec<u32>,
    pub reps: u32,
    pub base_seed: u64,
    pub half_window: f64,
    pub r_max: f64,
    pub epsilon_scale: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            sets: vec![SetKind::U, SetKind::W],
            n_list: vec![2, 3, 4, 6, 8],
            reps: 20,
            base_seed: 1,
            half_window: 3.0,
            r_max: 3.0,
            epsilon_scale: 1.25f64.sqrt(),
        }
    }
}

/// Runs the experiment. Replication seeds are `base_seed` plus the row index
/// in (set, n, replication) order, so any subset of rows can be re-run
/// independently. Rows evaluate in parallel; the table is deterministic for a
/// fixed configuration except for the runtime column.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ExperimentTable> {
    if cfg.n_list.is_empty() || cfg.reps == 0 {
        return Err(Error::InvalidInput("need at least one n and one replication".into()));
    }
    if cfg.n_list.iter().any(|&n| n == 0) {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let mut plan = Vec::new();
    for &set in &cfg.sets {
        for &n in &cfg.n_list {
            for rep in 0..cfg.reps {
                let seed = cfg.base_seed.wrapping_add(plan.len() as u64);
                plan.push((set, n, rep, seed));
            }
        }
    }
    let rows = plan
        .par_iter()
        .map(|&(set, n, rep, seed)| run_replication(cfg, set, n, rep, seed))
        .collect::<Result<Vec<ExperimentRow>>>()?;
    Ok(ExperimentTable { rows })
}

fn run_replication(
    cfg: &ConvergenceConfig,
    set: SetKind,
    n: u32,
    rep: u32,
    seed: u64,
) -> Result<ExperimentRow> {
    let start = Instant::now();
    let spacing = 0.7 / n as f64;
    let epsilon_rconv = covering_radius(spacing, 2)?;
    let epsilon_reach = cfg.epsilon_scale * spacing;
    // Certificates at radius r inspect balls of radius r + epsilon; cover that
    // much beyond the window so none of them is starved by truncation.
    let margin = cfg.r_max + 2.0 * epsilon_rconv;
    let kind = match set {
        SetKind::U => ShapeKind::SetU { spacing, half_window: cfg.half_window, margin },
        SetKind::W => ShapeKind::SetW { spacing, half_window: cfg.half_window, margin },
    };
    let (sample, _) = generate(&ShapeSpec { kind, seed })?;
    let grid = match &sample {
        Sample::Grid(g) => g,
        Sample::Cloud(_) => unreachable!("lattice kinds produce grids"),
    };
    let rconv = rconv_upper_bound(grid, epsilon_rconv, cfg.r_max)?;
    let inside = grid
        .inside_cloud()
        .ok_or_else(|| Error::InvalidInput(format!("{set} grid has no inside points")))?;
    let reach = reach_upper_bound(&inside, epsilon_reach)?;

    let rconv_bound = rconv.value.value();
    let reach_bound = reach.value.value();
    // Both test sets have reach and r-convexity exactly 1; a certified bound
    // below that would falsify the certificates, so fail loudly.
    assert!(rconv_bound >= 1.0, "{set} n={n} rep={rep}: r-convexity bound {rconv_bound} below 1");
    assert!(reach_bound >= 1.0, "{set} n={n} rep={rep}: reach bound {reach_bound} below 1");

    Ok(ExperimentRow {
        set_kind: set,
        n,
        replication: rep,
        seed,
        rconv_bound,
        reach_bound,
        epsilon_rconv,
        epsilon_reach,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

impl ExperimentTable {
    /// The sub-table of one set, preserving order.
    pub fn filter_set(&self, set: SetKind) -> ExperimentTable {
        ExperimentTable {
            rows: self.rows.iter().filter(|r| r.set_kind == set).cloned().collect(),
        }
    }

    /// Per-n means of a bound column, ascending in n. Rows with infinite
    /// bounds poison their mean, which then drops out of rate fits.
    pub fn means(&self, column: BoundColumn) -> Vec<(u32, f64, f64, usize)> {
        let mut ns: Vec<u32> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let values: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.n == n)
                    .map(|r| match column {
                        BoundColumn::Rconv => r.rconv_bound,
                        BoundColumn::Reach => r.reach_bound,
                    })
                    .collect();
                let count = values.len();
                let mean = values.iter().sum::<f64>() / count as f64;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (count.max(2) - 1) as f64;
                (n, mean, var.sqrt(), count)
            })
            .collect()
    }
}

/// Power-law fit `truth + C * n^(-p)` through per-n means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub truth: f64,
    pub n_used: usize,
}

/// Least squares of `log(mean - truth)` against `log n`, using only the n
/// whose mean exceeds `truth`. Needs at least three of them.
pub fn rate_fit(table: &ExperimentTable, column: BoundColumn, truth: f64) -> Result<RateFit> {
    let samples: Vec<(f64, f64)> = table
        .means(column)
        .into_iter()
        .filter(|&(_, mean, _, _)| mean.is_finite() && mean > truth)
        .map(|(n, mean, _, _)| ((n as f64).ln(), (mean - truth).ln()))
        .collect();
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "rate fit needs >= 3 resolutions with mean {column} above {truth}, got {}",
            samples.len()
        )));
    }
    let line = reachbound::numeric::ols_line(&samples)
        .ok_or_else(|| Error::InvalidInput("degenerate rate fit".into()))?;
    Ok(RateFit {
        coefficient: line.intercept.exp(),
        exponent: -line.slope,
        truth,
        n_used: samples.len(),
    })
}

const CSV_HEADER: &str =
    "set_kind,n,replication,seed,rconv_bound,reach_bound,epsilon_rconv,epsilon_reach,runtime_s";

pub fn write_table<W: Write>(out: &mut W, table: &ExperimentTable) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.set_kind,
            r.n,
            r.replication,
            r.seed,
            reachbound::io::fmt_f64(r.rconv_bound),
            reachbound::io::fmt_f64(r.reach_bound),
            reachbound::io::fmt_f64(r.epsilon_rconv),
            reachbound::io::fmt_f64(r.epsilon_reach),
            reachbound::io::fmt_f64(r.runtime_s),
        )?;
    }
    Ok(())
}

pub fn save_table<P: AsRef<std::path::Path>>(path: P, table: &ExperimentTable) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_table(&mut file, table)
}

pub fn read_table<R: BufRead>(reader: R) -> Result<ExperimentTable> {
    let mut rows = Vec::new();
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, msg: "empty table".into() }),
    };
    if header.trim() != CSV_HEADER {
        return Err(Error::Parse { line: 1, msg: "unexpected table header".into() });
    }
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse { line: lineno, msg: format!("expected 9 fields, got {}", fields.len()) });
        }
        let num = |s: &str| -> Result<f64> {
            if s == "inf" {
                Ok(f64::INFINITY)
            } else {
                s.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad number {s:?}") })
            }
        };
        rows.push(ExperimentRow {
            set_kind: SetKind::parse(fields[0])?,
            n: fields[1].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad n".into() })?,
            replication: fields[2]
                .parse()
                .map_err(|_| Error::Parse { line: lineno, msg: "bad replication".into() })?,
            seed: fields[3].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad seed".into() })?,
            rconv_bound: num(fields[4])?,
            reach_bound: num(fields[5])?,
            epsilon_rconv: num(fields[6])?,
            epsilon_reach: num(fields[7])?,
            runtime_s: num(fields[8])?,
        });
    }
    Ok(ExperimentTable { rows })
}
