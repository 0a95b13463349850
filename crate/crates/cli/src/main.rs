//! Command-line front end: shape generation, beta-reach profiles, reach and
//! r-convexity bounds, closing-violation flagging, and the convergence
//! experiment harness.

use clap::{Args, Parser, Subcommand, ValueEnum};
use reachbound::io::{self, load_cloud, load_grid};
use reachbound::{
    beta_reach_at, closing_violations, fit_profile, load_off, profile_with, rconv_upper_bound,
    reach_upper_bound, DistanceOracle, ProfileOptions, Sample, ShapeKind, ShapeSpec, SpatialIndex,
};
use reachbound_cli::experiment::{
    rate_fit, run_convergence, save_table, BoundColumn, ConvergenceConfig, SetKind,
};
use reachbound_cli::svg::{profile_svg, save_svg, table_svg};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "reachbound",
    version,
    about = "Upper bounds on the reach and r-convexity of sampled sets, and exact beta-reach profiles of point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic point cloud or labeled grid.
    Gen(GenArgs),
    /// Compute the beta-reach profile of a point cloud (optionally against a
    /// triangle mesh) and export it as CSV.
    Profile(ProfileArgs),
    /// Upper bound on the reach from a point sample with Hausdorff slack.
    ReachBound(ReachArgs),
    /// Upper bound on the r-convexity from a labeled grid.
    RconvBound(RconvArgs),
    /// Flag the grid points certifying that the sampled set is not r-convex.
    RconvFlag(FlagArgs),
    /// Run the lattice convergence experiment over the built-in test sets.
    Convergence(ConvArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    TwoRays,
    Arc,
    C2Graph,
    Paraboloid,
    TwoSpheres,
    Disk,
    SetU,
    SetW,
}

#[derive(Args)]
struct GenArgs {
    /// Shape family.
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file: a point cloud, or a labeled grid for lattice kinds.
    #[arg(long)]
    output: PathBuf,
    /// Optional JSON file for the known geometry of the ideal shape.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Opening angle in radians (two-rays, arc).
    #[arg(long)]
    angle: Option<f64>,
    /// Segment length (two-rays).
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Points per segment (two-rays).
    #[arg(long, default_value_t = 500)]
    per_ray: usize,
    /// Radius (arc, two-spheres, disk).
    #[arg(long)]
    radius: Option<f64>,
    /// Sample count (arc, c2-graph, paraboloid, two-spheres).
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Slope parameter of the quadratic graph (c2-graph).
    #[arg(long, default_value_t = 0.5)]
    h_prime: f64,
    /// Manifold dimension (paraboloid, two-spheres).
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Ambient dimension (paraboloid, two-spheres).
    #[arg(long)]
    dim: Option<usize>,
    /// Focal length of the paraboloid.
    #[arg(long, default_value_t = 4.0)]
    focal: f64,
    /// Radius of the paraboloid's parameter ball; defaults to 1.4 * focal.
    #[arg(long)]
    extent: Option<f64>,
    /// Distance between sphere centers (two-spheres).
    #[arg(long, default_value_t = 12.0)]
    center_gap: f64,
    /// Lattice spacing (disk, set-u, set-w).
    #[arg(long, default_value_t = 0.1)]
    spacing: f64,
    /// Half-width of the label window (lattice kinds).
    #[arg(long, default_value_t = 3.0)]
    half_window: f64,
    /// Lattice coverage beyond the window (lattice kinds).
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
}

#[derive(Args)]
struct ProfileArgs {
    /// Point cloud file.
    #[arg(long)]
    cloud: PathBuf,
    /// Optional OFF triangle mesh used as the distance oracle for midpoints.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Profile CSV output path.
    #[arg(long)]
    output: PathBuf,
    /// Optional SVG step plot.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Compute the profile only up to this beta.
    #[arg(long)]
    beta_max: Option<f64>,
    /// Disable the chord-length early exit (only meaningful with --beta-max).
    #[arg(long)]
    no_prune: bool,
    /// Fit a line over a beta window "lo,hi" and print it as JSON.
    #[arg(long, value_parser = parse_window)]
    fit: Option<(f64, f64)>,
    /// Evaluate the profile at one beta and print the value.
    #[arg(long)]
    at: Option<f64>,
}

#[derive(Args)]
struct ReachArgs {
    #[arg(long)]
    cloud: PathBuf,
    /// Hausdorff distance budget between the sample and the set.
    #[arg(long)]
    epsilon: f64,
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RconvArgs {
    /// Labeled grid file (trailing 0/1 column).
    #[arg(long)]
    grid: PathBuf,
    /// Covering radius of the grid; defaults to the value stored in the file.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Largest certificate radius to search.
    #[arg(long)]
    r_max: f64,
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FlagArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Test radius.
    #[arg(long)]
    r: f64,
    /// XYZ output of the flagged points.
    #[arg(long)]
    output: PathBuf,
    /// Optional JSON summary path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ConvArgs {
    /// Comma-separated test sets (u, w).
    #[arg(long, default_value = "u,w")]
    sets: String,
    /// Comma-separated resolutions; lattice spacing is 0.7/n.
    #[arg(long, default_value = "2,3,4,6,8")]
    n_list: String,
    #[arg(long, default_value_t = 20)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    #[arg(long, default_value_t = 3.0)]
    half_window: f64,
    #[arg(long, default_value_t = 3.0)]
    r_max: f64,
    /// Reach-bound slack as a multiple of the lattice spacing.
    #[arg(long, default_value_t = 1.25f64.sqrt())]
    epsilon_scale: f64,
    /// Table CSV output path.
    #[arg(long)]
    output: PathBuf,
    /// Optional SVG plot of per-resolution means.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Optional JSON output of the power-law fits against truth 1.
    #[arg(long)]
    rate_fits: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"lo,hi\"".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| "bad lower bound".to_string())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| "bad upper bound".to_string())?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("REACHBOUND_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: REACHBOUND_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Profile(args) => cmd_profile(args),
        Command::ReachBound(args) => reach_bound(args),
        Command::RconvBound(args) => rconv_bound(args),
        Command::RconvFlag(args) => rconv_flag(args),
        Command::Convergence(args) => convergence(args),
    }
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let kind = match args.kind {
        KindArg::TwoRays => ShapeKind::TwoRays {
            angle: args.angle.unwrap_or(std::f64::consts::FRAC_PI_2),
            length: args.length,
            per_ray: args.per_ray,
        },
        KindArg::Arc => ShapeKind::Arc {
            radius: args.radius.unwrap_or(1.0),
            angle: args.angle.unwrap_or(std::f64::consts::PI),
            n: args.n,
        },
        KindArg::C2Graph => ShapeKind::C2Graph { h_prime: args.h_prime, n: args.n },
        KindArg::Paraboloid => ShapeKind::Paraboloid {
            m: args.m,
            ambient: args.dim.unwrap_or(args.m + 1),
            focal: args.focal,
            extent: args.extent.unwrap_or(1.4 * args.focal),
            n: args.n,
        },
        KindArg::TwoSpheres => ShapeKind::TwoSpheres {
            radius: args.radius.unwrap_or(2.0),
            center_gap: args.center_gap,
            m: args.m,
            ambient: args.dim.unwrap_or(args.m + 1),
            n: args.n,
        },
        KindArg::Disk => ShapeKind::Disk {
            radius: args.radius.unwrap_or(1.0),
            spacing: args.spacing,
            half_window: args.half_window,
            margin: args.margin,
        },
        KindArg::SetU => ShapeKind::SetU {
            spacing: args.spacing,
            half_window: args.half_window,
            margin: args.margin,
        },
        KindArg::SetW => ShapeKind::SetW {
            spacing: args.spacing,
            half_window: args.half_window,
            margin: args.margin,
        },
    };
    let (sample, truth) = reachbound::generate(&ShapeSpec { kind, seed: args.seed })?;
    match &sample {
        Sample::Cloud(cloud) => io::save_cloud(&args.output, cloud)?,
        Sample::Grid(grid) => io::save_grid(&args.output, grid)?,
    }
    if let Some(path) = args.truth {
        let bound = |v: reachbound::ExtendedReal| -> serde_json::Value {
            if v.is_infinite() {
                json!("inf")
            } else {
                json!(v.value())
            }
        };
        let model = truth.profile_model.as_ref().map(|m| match m {
            reachbound::ProfileModel::Linear { intercept, slope, beta_max } => {
                json!({"kind": "linear", "intercept": intercept, "slope": slope, "beta_max": beta_max})
            }
            reachbound::ProfileModel::Steps(segments) => {
                json!({"kind": "steps", "segments": segments})
            }
        });
        let doc = json!({
            "reach": bound(truth.reach),
            "rconv": bound(truth.rconv),
            "hausdorff_bound": truth.hausdorff_bound,
            "profile_model": model,
        });
        std::fs::write(path, format!("{:#}\n", doc))?;
    }
    Ok(())
}

fn cmd_profile(args: ProfileArgs) -> anyhow::Result<()> {
    let cloud = load_cloud(&args.cloud)?;
    let opts = ProfileOptions { beta_max: args.beta_max, prune: !args.no_prune };
    let mesh = args.mesh.as_ref().map(load_off).transpose()?;
    let index;
    let oracle: &dyn DistanceOracle = match &mesh {
        Some(mesh) => mesh,
        None => {
            index = SpatialIndex::build(&cloud);
            &index
        }
    };
    let profile = profile_with(&cloud, oracle, opts)?;
    io::save_profile(&args.output, &profile)?;
    if let Some(path) = &args.svg {
        save_svg(path, &profile_svg(&profile)?)?;
    }
    if let Some(beta) = args.at {
        println!("{}", beta_reach_at(&cloud, oracle, beta)?);
    }
    if let Some((lo, hi)) = args.fit {
        let fit = fit_profile(&profile, lo, hi)?;
        let doc = json!({
            "beta_lo": fit.beta_lo,
            "beta_hi": fit.beta_hi,
            "intercept": fit.intercept,
            "slope": fit.slope,
            "rms_residual": fit.rms_residual,
            "samples": fit.samples,
            "weighting": "equal",
        });
        println!("{doc:#}");
    }
    Ok(())
}

fn emit_json(output: Option<&PathBuf>, doc: &serde_json::Value) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, format!("{doc:#}\n"))?,
        None => println!("{doc:#}"),
    }
    Ok(())
}

fn reach_bound(args: ReachArgs) -> anyhow::Result<()> {
    let cloud = load_cloud(&args.cloud)?;
    let result = reach_upper_bound(&cloud, args.epsilon)?;
    if result.witness.is_none() {
        eprintln!(
            "warning: no pair midpoint lies {} or more away from the sample; epsilon exceeds the cloud's resolution",
            args.epsilon
        );
    }
    emit_json(args.output.as_ref(), &io::reach_result_json(&result))
}

fn rconv_bound(args: RconvArgs) -> anyhow::Result<()> {
    let grid = load_grid(&args.grid, args.epsilon)?;
    let epsilon = args.epsilon.unwrap_or_else(|| grid.epsilon());
    let result = rconv_upper_bound(&grid, epsilon, args.r_max)?;
    emit_json(args.output.as_ref(), &io::rconv_result_json(&result))
}

fn rconv_flag(args: FlagArgs) -> anyhow::Result<()> {
    let grid = load_grid(&args.grid, args.epsilon)?;
    let epsilon = args.epsilon.unwrap_or_else(|| grid.epsilon());
    let violations = closing_violations(&grid, args.r, epsilon)?;
    io::save_violations_xyz(&args.output, &grid, &violations)?;
    if let Some(path) = args.json {
        let doc = json!({
            "r": violations.r,
            "epsilon": violations.epsilon,
            "count": violations.points.len(),
            "points": violations.points,
        });
        std::fs::write(path, format!("{doc:#}\n"))?;
    }
    Ok(())
}

fn convergence(args: ConvArgs) -> anyhow::Result<()> {
    let sets = args
        .sets
        .split(',')
        .map(SetKind::parse)
        .collect::<reachbound::Result<Vec<_>>>()?;
    let n_list = args
        .n_list
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| reachbound::Error::InvalidInput(format!("bad resolution {tok:?}")))
        })
        .collect::<reachbound::Result<Vec<_>>>()?;
    let cfg = ConvergenceConfig {
        sets,
        n_list,
        reps: args.reps,
        base_seed: args.base_seed,
        half_window: args.half_window,
        r_max: args.r_max,
        epsilon_scale: args.epsilon_scale,
    };
    let table = run_convergence(&cfg)?;
    save_table(&args.output, &table)?;
    if let Some(path) = &args.svg {
        save_svg(path, &table_svg(&table)?)?;
    }
    if let Some(path) = &args.rate_fits {
        let mut fits = serde_json::Map::new();
        for &set in &cfg.sets {
            let sub = table.filter_set(set);
            for column in [BoundColumn::Rconv, BoundColumn::Reach] {
                let key = format!("{set}_{column}");
                match rate_fit(&sub, column, 1.0) {
                    Ok(fit) => {
                        fits.insert(
                            key,
                            json!({
                                "coefficient": fit.coefficient,
                                "exponent": fit.exponent,
                                "truth": fit.truth,
                                "n_used": fit.n_used,
                            }),
                        );
                    }
                    Err(err) => {
                        fits.insert(key, json!({ "error": err.to_string() }));
                    }
                }
            }
        }
        std::fs::write(path, format!("{:#}\n", serde_json::Value::Object(fits)))?;
    }
    Ok(())
}
