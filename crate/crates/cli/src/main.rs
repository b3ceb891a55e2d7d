//! Command-line front end: run scenarios, study convergence orders, list
//! presets, and check scenario files.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! termination (edge collapse, non-convergence, inadmissible state).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polyflow::diagnostics::{
    conservation_report, convergence_order, OrderSummary, Reference, SweepEntry,
};
use polyflow::integrate::{run, Scheme, StepControl};
use polyflow::law::{conservation_residual, VelocityLaw, DEFAULT_QUAD_ORDER};
use polyflow::output::{write_snapshot_svgs, write_trajectory_csv, SpeedColumn};
use polyflow::scenario::{GeometrySpec, PresetSpec, ScenarioSpec};
use polyflow::Polygon;

#[derive(Parser)]
#[command(name = "polyflow", version, about = "Motion of polygonal curves in a fixed normal class")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (from file or inline flags) and write CSV/SVG output.
    Run(RunArgs),
    /// Convergence-order study over a halving sequence of step sizes.
    Order(OrderArgs),
    /// List the built-in preset polygons.
    Presets,
    /// Check a scenario: admissibility and conservation residuals at t = 0.
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file path (alternative to the inline flags below).
    #[arg(long, conflicts_with_all = ["preset", "law", "scheme", "tau", "t_end"])]
    scenario: Option<PathBuf>,
    /// Inline preset, colon-separated: e.g. regular:4:0.5
    #[arg(long)]
    preset: Option<String>,
    /// Law id: pcf, pcf-backward, ap-pcf, lp-pcf, const:<c>,
    /// advected:<field>, ap-advected-pcf:<field>
    #[arg(long)]
    law: Option<String>,
    /// euler or implicit
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Fixed-point stopping tolerance (default 1e-15).
    #[arg(long)]
    eps: Option<f64>,
    /// Snapshot cadence in steps (default: a tenth of the run).
    #[arg(long)]
    every: Option<usize>,
    /// Output directory (default: out).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Edge-collapse floor (default: 1e-9 of the initial mean edge).
    #[arg(long = "min-edge")]
    min_edge: Option<f64>,
    /// Retry a non-converging implicit step with halved tau (up to 10 times).
    #[arg(long = "retry-halving")]
    retry_halving: bool,
    /// Gauss-Legendre points per edge for advected laws.
    #[arg(long = "quad-order", default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
}

#[derive(Args)]
struct OrderArgs {
    /// Inline preset, colon-separated: e.g. rectangle:0.6:0.4
    #[arg(long)]
    preset: String,
    #[arg(long)]
    law: String,
    #[arg(long)]
    scheme: String,
    /// Largest step size of the halving sequence.
    #[arg(long)]
    tau: f64,
    /// Number of step sizes in the halving sequence.
    #[arg(long, default_value_t = 4)]
    halvings: usize,
    #[arg(long = "t-end")]
    t_end: f64,
    /// Reference: `closed` (square/rectangle curvature flow only) or `fine`
    /// (implicit run at tau_min/16).
    #[arg(long = "ref", default_value = "closed")]
    reference: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "quad-order", default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long = "min-edge")]
    min_edge: Option<f64>,
    #[arg(long = "quad-order", default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Order(args) => cmd_order(args),
        Command::Presets => cmd_presets(),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn build_spec_from_flags(args: &RunArgs) -> Result<ScenarioSpec, String> {
    let preset = args.preset.as_ref().ok_or("either --scenario or --preset is required")?;
    let law = args.law.as_ref().ok_or("--law is required with --preset")?;
    let scheme = args.scheme.as_ref().ok_or("--scheme is required with --preset")?;
    Ok(ScenarioSpec {
        geometry: GeometrySpec::Preset(
            PresetSpec::parse_colon(preset).map_err(|e| e.to_string())?,
        ),
        law_id: law.clone(),
        scheme: Scheme::parse(scheme).ok_or("scheme must be euler or implicit")?,
        tau: args.tau.ok_or("--tau is required with --preset")?,
        t_end: args.t_end.ok_or("--t-end is required with --preset")?,
        eps: args.eps,
        every: args.every,
    })
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, String> {
    let spec = match &args.scenario {
        Some(path) => ScenarioSpec::read_file(path).map_err(|e| e.to_string())?,
        None => build_spec_from_flags(&args)?,
    };
    let polygon = spec.build_polygon().map_err(|e| e.to_string())?;
    let law = spec.build_law(args.quad_order).map_err(|e| e.to_string())?;

    let mut ctl = StepControl::new(spec.tau, spec.t_end);
    if let Some(eps) = args.eps.or(spec.eps) {
        ctl.eps_fp = eps;
    }
    ctl.min_edge = args.min_edge;
    ctl.retry_halving = args.retry_halving;

    let traj = run(&polygon, &law, spec.scheme, &ctl);

    let steps = traj.len();
    let every = args
        .every
        .or(spec.every)
        .unwrap_or_else(|| (steps / 10).max(1));

    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    let declared = law.conservation(polygon.fan());
    let speed_col = if declared.cas.is_some() || declared.cls.is_none() {
        SpeedColumn::Area
    } else {
        SpeedColumn::Length
    };
    write_trajectory_csv(&traj, speed_col, &args.out.join("trajectory.csv"))
        .map_err(|e| e.to_string())?;
    write_snapshot_svgs(&traj, every, &args.out).map_err(|e| e.to_string())?;

    // Per-snapshot log lines keep the fixed-point behaviour observable.
    for rec in traj.records.iter().filter(|r| (r.m + 1) % every == 0) {
        match rec.fp_iters {
            Some(iters) => println!(
                "step {:>8}  t {:>12.6}  fp_iters {:>3}  area {:.12}",
                rec.m + 1,
                rec.t + rec.tau,
                iters,
                rec.area_after
            ),
            None => println!(
                "step {:>8}  t {:>12.6}  area {:.12}",
                rec.m + 1,
                rec.t + rec.tau,
                rec.area_after
            ),
        }
    }

    let mut report = String::new();
    report.push_str(&format!("law {}\n", law.id()));
    report.push_str(&format!("scheme {}\n", spec.scheme.id()));
    report.push_str(&format!("steps {}\n", steps));
    report.push_str(&format!("final_time {}\n", traj.final_time()));
    report.push_str(&format!("termination {}\n", traj.termination.describe()));
    if let Ok(cons) = conservation_report(&traj, &law) {
        if let (Some(mu), Some(delta)) = (cons.declared_cas, cons.delta_cas) {
            report.push_str(&format!("mu_cas {mu}\ndelta_cas {delta:e}\n"));
        }
        if let (Some(mu), Some(delta)) = (cons.declared_cls, cons.delta_cls) {
            report.push_str(&format!("mu_cls {mu}\ndelta_cls {delta:e}\n"));
        }
    }
    if let Some(max_fp) = traj.records.iter().filter_map(|r| r.fp_iters).max() {
        let total: usize = traj.records.iter().filter_map(|r| r.fp_iters).sum();
        report.push_str(&format!(
            "fp_iters_max {max_fp}\nfp_iters_mean {:.2}\n",
            total as f64 / steps.max(1) as f64
        ));
    }
    std::fs::write(args.out.join("report.txt"), &report).map_err(|e| e.to_string())?;
    print!("{report}");

    if traj.termination.reached_end() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("terminated early: {}", traj.termination.describe());
        Ok(ExitCode::from(2))
    }
}

fn closed_form_reference(preset: &PresetSpec, law: &VelocityLaw) -> Option<Reference<'static>> {
    if !matches!(law, VelocityLaw::Curvature { backward: false }) {
        return None;
    }
    match preset {
        PresetSpec::Regular { apothem, .. } => Some(Reference::ShrinkingSquare { h0: *apothem }),
        PresetSpec::Rectangle { a, b } => Some(Reference::ShrinkingRectangle { a0: *a, b0: *b }),
        _ => None,
    }
}

fn cmd_order(args: OrderArgs) -> Result<ExitCode, String> {
    if args.halvings < 2 {
        return Err("--halvings must be at least 2".to_string());
    }
    let preset = PresetSpec::parse_colon(&args.preset).map_err(|e| e.to_string())?;
    let polygon = preset.build().map_err(|e| e.to_string())?;
    let law = VelocityLaw::parse(&args.law, args.quad_order).map_err(|e| e.to_string())?;
    let scheme = Scheme::parse(&args.scheme).ok_or("scheme must be euler or implicit")?;
    let taus: Vec<f64> = (0..args.halvings)
        .map(|k| args.tau / (1u64 << k) as f64)
        .collect();

    let fine_store;
    let reference = match args.reference.as_str() {
        "closed" => closed_form_reference(&preset, &law).ok_or(
            "no closed-form reference for this preset/law; use --ref fine \
             (closed forms exist for regular/rectangle presets under pcf)",
        )?,
        "fine" => {
            let tau_ref = taus[taus.len() - 1] / 16.0;
            let ctl = StepControl::new(tau_ref, args.t_end);
            fine_store = run(&polygon, &law, Scheme::Implicit, &ctl);
            if !fine_store.termination.reached_end() {
                eprintln!(
                    "reference run terminated early: {}",
                    fine_store.termination.describe()
                );
                return Ok(ExitCode::from(2));
            }
            Reference::FineTrajectory(&fine_store)
        }
        other => return Err(format!("unknown reference kind `{other}`")),
    };

    let estimate = convergence_order(&polygon, &law, scheme, &taus, args.t_end, &reference)
        .map_err(|e| e.to_string())?;

    let mut csv = String::from("tau,error,order\n");
    println!("{:>12}  {:>14}  {:>8}", "tau", "error", "order");
    let mut any_failed = false;
    let mut order_iter = estimate.orders.iter();
    for (i, entry) in estimate.entries.iter().enumerate() {
        match entry {
            SweepEntry::Completed { tau, error } => {
                let order = if i == 0 {
                    None
                } else {
                    order_iter.next().copied()
                };
                let order_str = order.map_or(String::new(), |p| format!("{p:.3}"));
                println!("{tau:>12.3e}  {error:>14.6e}  {order_str:>8}");
                csv.push_str(&format!("{tau},{error},{order_str}\n"));
            }
            SweepEntry::Failed { tau, reason } => {
                any_failed = true;
                println!("{tau:>12.3e}  failed: {reason}");
                csv.push_str(&format!("{tau},failed,\n"));
            }
        }
    }
    match &estimate.summary {
        OrderSummary::Order(p) => println!("measured order: {p:.3}"),
        OrderSummary::Exact => println!("exact (rounding-level errors)"),
        OrderSummary::Insufficient => println!("not enough completed runs to fit an order"),
    }
    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    std::fs::write(args.out.join("order.csv"), csv).map_err(|e| e.to_string())?;

    Ok(if any_failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_presets() -> Result<ExitCode, String> {
    println!("regular:<N>:<apothem>             regular N-gon");
    println!("rectangle:<a>:<b>                 axis-aligned rectangle (half-sizes)");
    println!("half-gon-triangle:<N>:<scale>     upper half of a regular 2(N-2)-gon over a triangle");
    println!("star-sharp:<n>:<r_inner>:<r_outer>        2n-gon star, alternating vertex radii");
    println!("star-nonsharp:<n>:<r_inner>:<r_outer>[:<psi>]  3n-gon star with flat tips");
    println!("star-tuned:<n>:<r_outer>[:<psi>]  flat-tip star tuned to constant curvature");
    println!("ellipse:<N>:<a>:<b>               vertices on an axis-aligned ellipse");
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, String> {
    let spec = ScenarioSpec::read_file(&args.scenario).map_err(|e| e.to_string())?;
    let polygon: Polygon = spec.build_polygon().map_err(|e| e.to_string())?;
    let law = spec.build_law(args.quad_order).map_err(|e| e.to_string())?;

    let min_edge = args.min_edge.unwrap_or_else(|| {
        1e-9 * polygon.edge_lengths().iter().sum::<f64>() / polygon.len() as f64
    });
    let report = polygon.check_admissible(min_edge, true);
    println!("N {}", polygon.len());
    println!("min_edge_length {:e}", report.min_edge_length);
    println!("admissible {}", report.admissible);
    println!("simple {}", report.simple.unwrap());
    println!("perimeter {}", polygon.perimeter());
    println!("area {}", polygon.area());

    match conservation_residual(&law, &polygon, 0.0) {
        Ok(res) => {
            let declared = law.conservation(polygon.fan());
            if let (Some(mu), Some(r)) = (declared.cas, res.cas) {
                println!("mu_cas {mu}");
                println!("cas_residual {r:e}");
            }
            if let (Some(mu), Some(r)) = (declared.cls, res.cls) {
                println!("mu_cls {mu}");
                println!("cls_residual {r:e}");
            }
        }
        Err(e) => println!("law_evaluation_failed {e}"),
    }

    Ok(if report.admissible && report.simple == Some(true) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
