//! `cnm`: design and evaluate disaster-resilient SDN control planes.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 input or
//! IO error, 2 infeasible or constraint violations, 3 node budget
//! exhausted. Documents are written only to explicit --out paths;
//! everything else goes to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cnm_core::evaluation::{self, DisruptionReport};
use cnm_core::fixture;
use cnm_core::format::{
    parse_design, parse_instance, serialize_design, serialize_report, DesignMetadata,
    SolverInfo,
};
use cnm_core::model::{check_feasibility, CnmDesign, Instance, Objective};
use cnm_core::rational::format_exact;
use cnm_core::solver::{
    export_lp, solve, ControllerCount, Proof, SolveError, SolverConfig,
};

#[derive(Parser)]
#[command(name = "cnm", version, about = "Disaster-resilient control plane design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and emit an optimal design document.
    Solve(SolveArgs),
    /// Check a design document against every constraint.
    Check(CheckArgs),
    /// Apply one disaster (or all of them) to a design.
    Simulate(SimulateArgs),
    /// Solve across controller counts and objectives, then post-mortem.
    Sweep(SweepArgs),
    /// Write the mixed-integer program for an external solver.
    ExportLp(ExportLpArgs),
    /// Render a sweep CSV as an SVG chart.
    Plot(PlotArgs),
    /// Write the bundled NSFNet example instance.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance document path.
    instance: PathBuf,
    #[arg(long, value_parser = parse_objective)]
    objective: Objective,
    /// Exact count N or inclusive range A..B; free when omitted.
    #[arg(long, value_parser = parse_controllers)]
    controllers: Option<ControllerCount>,
    /// Design document destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solver threads; 0 picks the runtime default.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Search node budget per controller subset.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    design: PathBuf,
    /// Feasibility report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    instance: PathBuf,
    design: PathBuf,
    /// Disaster id, or "all" for every modeled zone.
    #[arg(long)]
    disaster: String,
    /// Simulation report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    instance: PathBuf,
    /// Comma-separated objectives; defaults to both.
    #[arg(long, value_parser = parse_objective, value_delimiter = ',')]
    objectives: Vec<Objective>,
    /// Exact count N or inclusive range A..B.
    #[arg(long, value_parser = parse_controllers)]
    controllers: ControllerCount,
    /// Report destination (format picked by --format).
    #[arg(long)]
    out: PathBuf,
    /// csv or svg.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ExportLpArgs {
    instance: PathBuf,
    #[arg(long, value_parser = parse_objective)]
    objective: Objective,
    /// Exact count N or inclusive range A..B; free when omitted.
    #[arg(long, value_parser = parse_controllers)]
    controllers: Option<ControllerCount>,
    /// LP text destination.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV path.
    csv: PathBuf,
    /// SVG destination.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FixtureArgs {
    /// Instance document destination.
    #[arg(long)]
    out: PathBuf,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse()
}

fn parse_controllers(s: &str) -> Result<ControllerCount, String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u32 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start {a:?}"))?;
        let hi: u32 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end {b:?}"))?;
        if lo == 0 || lo > hi {
            return Err(format!("empty controller range {s:?}"));
        }
        Ok(ControllerCount::Range(lo, hi))
    } else {
        let n: u32 = s
            .trim()
            .parse()
            .map_err(|_| format!("bad controller count {s:?}"))?;
        if n == 0 {
            return Err("controller count must be positive".to_string());
        }
        Ok(ControllerCount::Exactly(n))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ExportLp(args) => cmd_export_lp(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Fixture(args) => cmd_fixture(args),
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading instance {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing instance {}", path.display()))
}

fn load_design(path: &Path, instance: &Instance) -> Result<CnmDesign> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading design {}", path.display()))?;
    let (design, _) = parse_design(&text, instance)
        .with_context(|| format!("parsing design {}", path.display()))?;
    Ok(design)
}

fn write_out(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn controllers_line(design: &CnmDesign) -> String {
    let ids: Vec<String> = design.controllers().iter().map(|n| n.to_string()).collect();
    format!("[{}]", ids.join(", "))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let mut config = SolverConfig::new(args.objective);
    if let Some(count) = args.controllers {
        config.controller_count = count;
    }
    config.worker_count = args.workers;
    if let Some(budget) = args.budget {
        config.node_budget = budget;
    }
    match solve(&instance, &config) {
        Ok(outcome) => {
            let proof = match outcome.proof {
                Proof::Optimal => "optimal",
                Proof::BudgetExhausted => "budget-exhausted",
            };
            let meta = DesignMetadata {
                objective: Some(config.objective),
                objective_value: Some(format_exact(&outcome.objective_value)),
                solver: Some(SolverInfo {
                    proof: proof.to_string(),
                    subsets_enumerated: outcome.stats.subsets_enumerated,
                    nodes_explored: outcome.stats.nodes_explored,
                }),
            };
            if let Some(out) = &args.out {
                write_out(out, &serialize_design(&outcome.design, &meta))?;
            }
            eprintln!(
                "{proof}: {} controllers {} with {} = {}",
                outcome.design.controllers().len(),
                controllers_line(&outcome.design),
                config.objective,
                format_exact(&outcome.objective_value),
            );
            match outcome.proof {
                Proof::Optimal => Ok(ExitCode::SUCCESS),
                Proof::BudgetExhausted => {
                    eprintln!("warning: incumbent is not proven optimal; raise --budget");
                    Ok(ExitCode::from(3))
                }
            }
        }
        Err(SolveError::Infeasible { family }) => {
            eprintln!("infeasible: no design satisfies {family}");
            Ok(ExitCode::from(2))
        }
        Err(SolveError::BudgetExhausted) => {
            eprintln!("node budget exhausted before any design was found; raise --budget");
            Ok(ExitCode::from(3))
        }
        Err(err @ SolveError::TooManySites(_)) => Err(err.into()),
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let design = load_design(&args.design, &instance)?;
    let report = check_feasibility(&instance, &design);
    if let Some(out) = &args.out {
        write_out(out, &serialize_report(&report))?;
    }
    if report.is_feasible() {
        eprintln!("feasible: all constraints hold");
        Ok(ExitCode::SUCCESS)
    } else {
        for v in report.violations() {
            eprintln!("violation {}: {}", v.constraint, v.detail);
        }
        Ok(ExitCode::from(2))
    }
}

fn render_simulation(reports: &[DisruptionReport]) -> String {
    let mut out = String::from("format = \"cnm-simulation/1\"\n");
    for r in reports {
        let failed: Vec<String> =
            r.failed_controllers.iter().map(|n| n.to_string()).collect();
        let _ = write!(
            out,
            "\n[[report]]\ndisaster = {:?}\nfailed_controllers = [{}]\nfailed_c2c = {}\nfailed_s2c = {}\ndisconnected_switches_raw = {}\ndisconnected_switches_after_reassign = {}\nislanded = {}\n",
            r.disaster_id,
            failed.join(", "),
            r.failed_c2c,
            r.failed_s2c,
            r.disconnected_raw,
            r.disconnected_after_reassign,
            r.islanded,
        );
    }
    out
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let design = load_design(&args.design, &instance)?;
    let reports: Vec<DisruptionReport> = if args.disaster == "all" {
        instance
            .disasters()
            .zones()
            .iter()
            .map(|z| evaluation::simulate_zone(&instance, &design, z))
            .collect()
    } else {
        vec![evaluation::simulate(&instance, &design, &args.disaster)?]
    };
    if let Some(out) = &args.out {
        write_out(out, &render_simulation(&reports))?;
    }
    for r in &reports {
        eprintln!(
            "{}: {} controllers down, {} c2c / {} s2c channels hit, {} switches cut ({} after reassignment), islanded {}",
            r.disaster_id,
            r.failed_controllers.len(),
            r.failed_c2c,
            r.failed_s2c,
            r.disconnected_raw,
            r.disconnected_after_reassign,
            r.islanded,
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let objectives = if args.objectives.is_empty() {
        Objective::ALL.to_vec()
    } else {
        args.objectives.clone()
    };
    let counts: Vec<u32> = match args.controllers {
        ControllerCount::Exactly(n) => vec![n],
        ControllerCount::Range(lo, hi) => (lo..=hi).collect(),
        ControllerCount::Any => bail!("sweep needs an explicit --controllers count or range"),
    };
    let mut base = SolverConfig::new(objectives[0]);
    base.worker_count = args.workers;
    if let Some(budget) = args.budget {
        base.node_budget = budget;
    }
    let sweep = evaluation::sweep(&instance, &objectives, &counts, &base);
    for skip in &sweep.skipped {
        eprintln!(
            "absent: {} with {} controllers: {}",
            skip.objective, skip.controller_count, skip.reason
        );
    }
    write_out(&args.out, &evaluation::render_report(&sweep.rows, &args.format)?)?;
    eprintln!(
        "swept {} cells: {} rows, {} absent",
        objectives.len() * counts.len(),
        sweep.rows.len(),
        sweep.skipped.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_lp(args: ExportLpArgs) -> Result<ExitCode> {
    let instance = load_instance(&args.instance)?;
    let mut config = SolverConfig::new(args.objective);
    if let Some(count) = args.controllers {
        config.controller_count = count;
    }
    write_out(&args.out, &export_lp(&instance, &config))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(args: PlotArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.csv)
        .with_context(|| format!("reading csv {}", args.csv.display()))?;
    let rows = evaluation::parse_csv(&text)?;
    write_out(&args.out, &evaluation::render_svg(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_fixture(args: FixtureArgs) -> Result<ExitCode> {
    write_out(&args.out, fixture::NSFNET_DOCUMENT)?;
    Ok(ExitCode::SUCCESS)
}
