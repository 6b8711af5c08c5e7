//! Command-line planner for drone-camera FSO link margins.
//!
//! Five commands: `profile` tabulates the turbulence profile, `margin-curve`
//! emits margin-vs-outage families per FOV, `fov-sweep` walks the margin
//! across the FOV range, `optimize` picks the margin-minimizing FOV for a
//! scenario, and `simulate` runs the seeded Monte Carlo outage estimator.
//!
//! Sweep commands emit CSV by default (or a JSON array with `--format
//! json`); `optimize` and `simulate` emit a single JSON object. Exit codes:
//! 0 success, 1 infeasible scenario or domain error, 2 usage error. The
//! scenario comes from `--config`, else from the `FSOPLAN_CONFIG` path, else
//! the built-in defaults; degrees/nm/mm at this boundary, SI inside.

mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fsoplan::linkbudget::power_margin;
use fsoplan::mcvalidate::{
    check_statistical_floor, simulate_outage, SimulationSpec, ValidationReport,
};
use fsoplan::optimizer::{optimize, sweep_row, ConstraintRecord, Scenario};

use config::ScenarioFile;
use table::SweepTable;

#[derive(Parser)]
#[command(
    name = "fsoplan",
    version,
    about = "Joint drone-camera / FSO link-margin planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the turbulence profile over an altitude interval
    Profile(ProfileArgs),
    /// Margin-vs-outage curves for a list of FOVs
    MarginCurve(MarginCurveArgs),
    /// Margin across a FOV interval at a fixed outage target
    FovSweep(FovSweepArgs),
    /// Pick the margin-minimizing FOV for the scenario
    Optimize(OptimizeArgs),
    /// Monte Carlo outage estimate for a margin
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario file (JSON); the FSOPLAN_CONFIG path is used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ProfileArgs {
    /// Lowest altitude, meters
    #[arg(long, default_value_t = 0.0)]
    alt_min: f64,
    /// Highest altitude, meters
    #[arg(long, default_value_t = 3000.0)]
    alt_max: f64,
    /// Grid step, meters
    #[arg(long, default_value_t = 100.0)]
    step: f64,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct MarginCurveArgs {
    /// FOVs in degrees, comma separated (one margin column each)
    #[arg(long, value_delimiter = ',', required = true)]
    fov: Vec<f64>,
    /// Lowest outage probability
    #[arg(long, default_value_t = 1e-12)]
    po_min: f64,
    /// Highest outage probability
    #[arg(long, default_value_t = 1e-2)]
    po_max: f64,
    /// Number of log-spaced outage points
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct FovSweepArgs {
    /// Outage target; the scenario's target when omitted
    #[arg(long)]
    po: Option<f64>,
    /// Lowest FOV, degrees; the scenario's declared bound when omitted
    #[arg(long)]
    fov_min: Option<f64>,
    /// Highest FOV, degrees; the scenario's declared bound when omitted
    #[arg(long)]
    fov_max: Option<f64>,
    /// Grid step, degrees
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Only json is meaningful here
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Log-intensity variance of the channel
    #[arg(long)]
    s: f64,
    /// Outage target: sizes the margin analytically and validates it
    #[arg(long, conflicts_with = "pm_db")]
    po: Option<f64>,
    /// Margin under test, dB
    #[arg(long)]
    pm_db: Option<f64>,
    /// Number of intensity draws
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition count for parallel evaluation (does not affect results)
    #[arg(long, default_value_t = 8)]
    streams: u32,
}

enum CliError {
    /// Bad arguments or config: exit 2.
    Usage(String),
    /// Domain or infeasibility failures from the model: exit 1.
    Runtime(String),
}

impl From<fsoplan::Error> for CliError {
    fn from(e: fsoplan::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Profile(args) => run_profile(args),
        Command::MarginCurve(args) => run_margin_curve(args),
        Command::FovSweep(args) => run_fov_sweep(args),
        Command::Optimize(args) => run_optimize(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Resolves the scenario: explicit --config wins over FSOPLAN_CONFIG, which
/// wins over the built-in defaults.
fn load_scenario(arg: &ConfigArg) -> Result<Scenario, CliError> {
    let path = arg
        .config
        .clone()
        .or_else(|| std::env::var_os("FSOPLAN_CONFIG").map(PathBuf::from));
    let file = match path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<ScenarioFile>(&text)
                .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => ScenarioFile::default(),
    };
    file.to_scenario()
        .map_err(|e| usage(format!("invalid config value: {e}")))
}

fn emit_table(table: &SweepTable, format: Format) {
    match format {
        Format::Csv => print!("{}", table.to_csv()),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&table.to_json()).expect("tables serialize")
        ),
    }
}

fn check(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(usage(msg.to_string()))
    }
}

fn run_profile(args: ProfileArgs) -> Result<ExitCode, CliError> {
    check(
        args.alt_min.is_finite() && args.alt_min >= 0.0,
        "--alt-min must be a finite non-negative altitude",
    )?;
    check(
        args.alt_max.is_finite() && args.alt_max >= args.alt_min,
        "--alt-max must be at least --alt-min",
    )?;
    check(
        args.step.is_finite() && args.step > 0.0,
        "--step must be positive",
    )?;
    let scenario = load_scenario(&args.config)?;

    let mut table = SweepTable::new(vec!["altitude_m", "cn2"]);
    let mut k = 0u64;
    loop {
        let altitude = args.alt_min + k as f64 * args.step;
        if altitude > args.alt_max + args.step * 1e-9 {
            break;
        }
        table.push_row(vec![altitude, scenario.profile.cn2_at_altitude(altitude)?]);
        k += 1;
    }
    emit_table(&table, args.format);
    Ok(ExitCode::SUCCESS)
}

fn run_margin_curve(args: MarginCurveArgs) -> Result<ExitCode, CliError> {
    check(!args.fov.is_empty(), "--fov needs at least one value")?;
    for &fov in &args.fov {
        check(
            fov.is_finite() && fov > 0.0 && fov < 180.0,
            "--fov values must lie in (0, 180) degrees",
        )?;
    }
    for (name, p0) in [("--po-min", args.po_min), ("--po-max", args.po_max)] {
        check(
            p0.is_finite() && p0 > 0.0 && p0 <= 0.5,
            &format!("{name} must lie in (0, 0.5]"),
        )?;
    }
    check(args.po_min <= args.po_max, "--po-min must not exceed --po-max")?;
    check(args.points >= 1, "--points must be at least 1")?;
    let scenario = load_scenario(&args.config)?;

    let mut columns = vec!["p0".to_string()];
    columns.extend(args.fov.iter().map(|&deg| {
        if deg.fract() == 0.0 {
            format!("margin_db_fov_{}", deg as i64)
        } else {
            format!("margin_db_fov_{deg}")
        }
    }));
    let mut table = SweepTable::new(columns);

    for i in 0..args.points {
        let p0 = if args.points == 1 {
            args.po_min
        } else {
            let t = i as f64 / (args.points - 1) as f64;
            (args.po_min.ln() + t * (args.po_max.ln() - args.po_min.ln())).exp()
        };
        let mut row = vec![p0];
        for &deg in &args.fov {
            row.push(sweep_row(&scenario, deg.to_radians(), p0)?.margin_db);
        }
        table.push_row(row);
    }
    emit_table(&table, args.format);
    Ok(ExitCode::SUCCESS)
}

fn run_fov_sweep(args: FovSweepArgs) -> Result<ExitCode, CliError> {
    let scenario = load_scenario(&args.config)?;
    let p0 = args.po.unwrap_or(scenario.channel.outage_target);
    let fov_min = args.fov_min.unwrap_or(scenario.camera.fov_min.to_degrees());
    let fov_max = args.fov_max.unwrap_or(scenario.camera.fov_max.to_degrees());

    check(
        p0.is_finite() && p0 > 0.0 && p0 <= 0.5,
        "--po must lie in (0, 0.5]",
    )?;
    check(
        fov_min.is_finite() && fov_min > 0.0 && fov_min < 180.0,
        "--fov-min must lie in (0, 180) degrees",
    )?;
    check(
        fov_max.is_finite() && fov_max >= fov_min && fov_max < 180.0,
        "--fov-max must lie in [--fov-min, 180) degrees",
    )?;
    check(
        args.step.is_finite() && args.step > 0.0,
        "--step must be positive",
    )?;

    let mut table = SweepTable::new(vec!["fov_deg", "altitude_m", "cn2", "s", "margin_db"]);
    let mut k = 0u64;
    loop {
        let fov_deg = fov_min + k as f64 * args.step;
        if fov_deg > fov_max + args.step * 1e-9 {
            break;
        }
        let row = sweep_row(&scenario, fov_deg.to_radians(), p0)?;
        table.push_row(vec![
            fov_deg,
            row.altitude,
            row.cn2,
            row.log_intensity_variance,
            row.margin_db,
        ]);
        k += 1;
    }
    emit_table(&table, args.format);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OptimizeOutput {
    feasible: bool,
    monotone_certified: bool,
    fov_opt_deg: Option<f64>,
    altitude_opt_m: Option<f64>,
    cn2_at_opt: Option<f64>,
    log_intensity_variance: Option<f64>,
    margin_linear: Option<f64>,
    margin_db: Option<f64>,
    constraints: Vec<ConstraintRecord>,
}

fn run_optimize(args: OptimizeArgs) -> Result<ExitCode, CliError> {
    check(args.format == Format::Json, "optimize emits JSON only")?;
    let scenario = load_scenario(&args.config)?;
    let result = optimize(&scenario)?;

    let output = OptimizeOutput {
        feasible: result.feasible,
        monotone_certified: result.monotone_certified,
        fov_opt_deg: result.fov_opt.map(f64::to_degrees),
        altitude_opt_m: result.altitude_opt,
        cn2_at_opt: result.cn2_at_opt,
        log_intensity_variance: result.s_at_opt,
        margin_linear: result.margin.map(|m| m.linear),
        margin_db: result.margin.map(|m| m.decibels),
        constraints: result.diagnostics.clone(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("results serialize")
    );

    if result.feasible {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in result.diagnostics.iter().filter(|c| !c.satisfied) {
            eprintln!("infeasible: {} — {}", c.name, c.detail);
        }
        Ok(ExitCode::from(1))
    }
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    check(
        args.s.is_finite() && args.s > 0.0,
        "--s must be a positive log-intensity variance",
    )?;
    check(args.samples >= 1, "--samples must be at least 1")?;
    check(args.streams >= 1, "--streams must be at least 1")?;
    check(
        args.po.is_some() || args.pm_db.is_some(),
        "one of --po or --pm-db is required",
    )?;

    let json = if let Some(p0) = args.po {
        check(
            p0.is_finite() && p0 > 0.0 && p0 <= 0.5,
            "--po must lie in (0, 0.5]",
        )?;
        check_statistical_floor(p0, args.samples)?;
        let margin = power_margin(args.s, p0)?;
        let simulation = simulate_outage(&SimulationSpec {
            s: args.s,
            pm_linear: margin.linear,
            samples: args.samples,
            seed: args.seed,
            streams: args.streams,
        })?;
        let report = ValidationReport::from_simulation(p0, margin, simulation);
        serde_json::to_string_pretty(&report)
    } else {
        let pm_db = args.pm_db.expect("checked above");
        check(pm_db.is_finite(), "--pm-db must be finite")?;
        let report = simulate_outage(&SimulationSpec {
            s: args.s,
            pm_linear: 10f64.powf(pm_db / 10.0),
            samples: args.samples,
            seed: args.seed,
            streams: args.streams,
        })?;
        serde_json::to_string_pretty(&report)
    };
    println!("{}", json.expect("reports serialize"));
    Ok(ExitCode::SUCCESS)
}
