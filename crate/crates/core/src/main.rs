use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use blendfv::data::{build_dataset, read_dataset_csv, write_dataset_csv, DatasetParams, QuadratureRule};
use blendfv::experiments::{convergence_study, entropy_production_report, run_case, write_field_csv, TestCase};
use blendfv::nn::{self, LossKind, MlpModel, TrainingSchedule, NETWORK_DIMS};
use blendfv::{Error, GasModel, Result, RunConfig, Scheme, SchemePreset};

#[derive(Parser)]
#[command(name = "blendfv", version, about = "Blended finite-volume solver for the 1D Euler equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and write x, rho, v, p, alpha as CSV.
    Run(RunArgs),
    /// Generate a training dataset from random periodic initial data.
    GenData(GenDataArgs),
    /// Train the α network on a dataset.
    Train(TrainArgs),
    /// Smooth-transport convergence table.
    Convergence(ConvergenceArgs),
    /// Per-cell discrete entropy productions of a run.
    EntropyReport(RunArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// delft, pplft, ddlft, palft, dafermos or llf
    #[arg(long, default_value = "delft")]
    scheme: SchemePreset,
    /// Network weights for ddlft (defaults to the bundled network).
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = blendfv::mesh::DEFAULT_CFL)]
    cfl: f64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// shu-osher or smooth-transport
    #[arg(long, default_value = "shu-osher")]
    testcase: TestCase,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long, default_value_t = 32)]
    n_ics: usize,
    #[arg(long, default_value_t = 4000)]
    fine_cells: usize,
    #[arg(long, default_value_t = 100)]
    coarse_cells: usize,
    #[arg(long, default_value_t = 100)]
    n_times: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = blendfv::mesh::DEFAULT_CFL)]
    cfl: f64,
    /// midpoint or trapezoid
    #[arg(long, default_value = "midpoint", value_parser = parse_rule)]
    rule: QuadratureRule,
    /// Dataset CSV; the manifest goes next to it as `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// mse, mexp or nonsym
    #[arg(long, default_value = "nonsym")]
    loss: LossKind,
    /// paper or quick
    #[arg(long, default_value = "paper")]
    schedule: TrainingSchedule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Continue from these weights instead of a random network.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Per-epoch losses as CSV.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Exponent range `a..b`: N = 2^a ..= 2^b cells.
    #[arg(long, default_value = "5..10", value_parser = parse_levels)]
    levels: (u32, u32),
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_rule(s: &str) -> std::result::Result<QuadratureRule, String> {
    match s {
        "midpoint" => Ok(QuadratureRule::Midpoint),
        "trapezoid" => Ok(QuadratureRule::Trapezoid),
        _ => Err(format!("unknown quadrature rule {s:?}")),
    }
}

fn parse_levels(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad level {a:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad level {b:?}"))?;
    if a > b || b > 24 {
        return Err(format!("bad level range {s:?}"));
    }
    Ok((a, b))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn build_scheme(args: &SchemeArgs) -> Result<Scheme> {
    let weights = match (args.scheme, &args.weights) {
        (_, Some(path)) => Some(Arc::new(MlpModel::load(path)?)),
        (SchemePreset::Ddlft, None) => Some(Arc::new(nn::bundled_model()?)),
        _ => None,
    };
    Scheme::preset(args.scheme, weights)
}

fn run(args: &RunArgs, report: bool) -> Result<()> {
    let gas = GasModel::default();
    let scheme = build_scheme(&args.scheme)?;
    let case = args.testcase;
    let cells = args.cells.unwrap_or(case.default_cells());
    let cfg = RunConfig {
        cfl: args.scheme.cfl,
        max_steps: args.max_steps,
        record: report,
        ..RunConfig::new(case.boundary(), args.t_end.unwrap_or(case.default_t_end()))
    };
    let start = Instant::now();
    let traj = run_case(&scheme, &gas, case, cells, &cfg)?;
    eprintln!(
        "{} on {:?}: {} cells, {} steps, t = {}, min rho = {:.4e}, min p = {:.4e}, {:.2}s",
        args.scheme.scheme.name(),
        case,
        cells,
        traj.steps,
        traj.final_field().time,
        traj.min_density,
        traj.min_pressure,
        start.elapsed().as_secs_f64()
    );
    let mut out = output(args.out.as_deref())?;
    if report {
        let prod = entropy_production_report(&traj, &gas)?;
        eprintln!(
            "entropy production: max {:.4e}, scale {:.4e}, {} of {} entries above 1e-8·scale",
            prod.max(),
            prod.scale,
            prod.count_above(1e-8),
            prod.entries()
        );
        writeln!(out, "step,time,cell,x,alpha_left,production")?;
        for (n, (values, blend)) in prod.values.iter().zip(&traj.blends).enumerate() {
            let grid = traj.snapshots[n].grid;
            for (k, v) in values.iter().enumerate() {
                writeln!(out, "{n},{:e},{k},{:e},{:e},{v:e}", blend.time, grid.center(k), blend.alpha[k])?;
            }
        }
    } else {
        write_field_csv(traj.final_field(), &traj.last_alpha, &gas, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn gen_data(args: &GenDataArgs) -> Result<()> {
    let gas = GasModel::default();
    let params = DatasetParams {
        n_ics: args.n_ics,
        fine_cells: args.fine_cells,
        coarse_cells: args.coarse_cells,
        n_times: args.n_times,
        cfl: args.cfl,
        seed: args.seed,
        rule: args.rule,
        ..DatasetParams::default()
    };
    let start = Instant::now();
    let (samples, manifest) = build_dataset(&params, &gas, |ic| {
        eprintln!(
            "ic {:>3}: {} fine steps, {} samples, {} high-order failures ({:.0}s)",
            ic.index,
            ic.fine_steps,
            ic.samples,
            ic.high_order_failures,
            start.elapsed().as_secs_f64()
        );
    })?;
    write_dataset_csv(&samples, BufWriter::new(File::create(&args.out)?))?;
    let mut manifest_path = args.out.clone().into_os_string();
    manifest_path.push(".manifest.json");
    serde_json::to_writer_pretty(BufWriter::new(File::create(manifest_path)?), &manifest)?;
    eprintln!("{} samples written to {}", manifest.n_samples, args.out.display());
    Ok(())
}

fn train(args: &TrainArgs) -> Result<()> {
    let data = read_dataset_csv(BufReader::new(File::open(&args.data)?))?;
    let model = match &args.init {
        Some(p) => MlpModel::load(p)?,
        None => MlpModel::random(&NETWORK_DIMS, args.seed)?,
    };
    eprintln!("training on {} samples, {} epochs", data.len(), args.schedule.total_epochs());
    let start = Instant::now();
    let outcome = nn::train(model, &data, &args.schedule, args.loss, args.seed, |epoch, l| {
        eprintln!("epoch {:>4}: loss {l:.6e} ({:.0}s)", epoch + 1, start.elapsed().as_secs_f64());
    })?;
    outcome.model.save(&args.out)?;
    if let Some(path) = &args.history {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "epoch,loss")?;
        for (i, l) in outcome.history.iter().enumerate() {
            writeln!(w, "{},{l:e}", i + 1)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn convergence(args: &ConvergenceArgs) -> Result<()> {
    let gas = GasModel::default();
    let scheme = build_scheme(&args.scheme)?;
    let levels: Vec<usize> = (args.levels.0..=args.levels.1).map(|e| 1usize << e).collect();
    let rows = convergence_study(&scheme, &gas, &levels, args.t_end, args.scheme.cfl)?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "N,steps,l1_rho,l1_total,eoc_rho")?;
    for r in rows {
        let eoc = r.eoc.map(|e| format!("{e:.4}")).unwrap_or_default();
        writeln!(out, "{},{},{:.6e},{:.6e},{eoc}", r.cells, r.steps, r.l1.density, r.l1.total())?;
    }
    out.flush()?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) => 2,
        Error::Io(_) | Error::Format(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a, false),
        Command::EntropyReport(a) => run(a, true),
        Command::GenData(a) => gen_data(a),
        Command::Train(a) => train(a),
        Command::Convergence(a) => convergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
