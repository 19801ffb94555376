//! Command-line driver for the labs toolkit.
//!
//! Exit codes: 0 success, 1 usage or runtime failure, 2 verification
//! failure, 3 enumeration budget or memory cap exceeded.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use labs::exact::{count_canonic, exhaustive_optimum, OracleError};
use labs::experiment::{
    append_jsonl, merit_table_csv, parse_jsonl, run_experiment, run_trial, summarize,
    verify_registry, ExperimentConfig, ExperimentSummary, SolverKind,
};
use labs::legendre::{grid_search_merit, GridRange};
use labs::registry::BestKnownRegistry;
use labs::seq::RleSolution;
use labs::stats::{fit_exponential_model, predict, AsymptoticModel, CostUnit};
use labs::walk::WalkLimit;

#[derive(Parser)]
#[command(name = "labs", version, about = "Low-autocorrelation binary sequence toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single solver trial and print its record as JSON
    Solve(SolveArgs),
    /// Run N seeded trials in parallel and write JSONL records
    Experiment(ExperimentArgs),
    /// Summarize a JSONL record file
    Summarize(SummarizeArgs),
    /// Fit the a*b^L growth model to experiment summaries
    Fit(FitArgs),
    /// Predict hit ratios, processor counts and solvabilities
    Predict(PredictArgs),
    /// Exhaustive optimum and canonic solutions of a small instance
    Oracle(OracleArgs),
    /// Legendre construction sweep; emits one CSV row per grid cell
    Legendre(LegendreArgs),
    /// Verify that stored record solutions decode to their energies
    Verify(RegistryArg),
    /// Emit the merit-factor table as CSV
    MeritTable(RegistryArg),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Saw,
    Mats,
    Rrts,
    Mats8,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance size (odd)
    #[arg(long = "L")]
    len: u32,
    #[arg(long, value_enum, default_value = "saw")]
    solver: SolverArg,
    /// Walk segment coefficient for the saw solver: a number, or u/unlimited
    #[arg(long = "omega-c", default_value = "8")]
    omega_c: String,
    /// Target energy; defaults to the registry's best-known value
    #[arg(long)]
    target: Option<i64>,
    /// Time limit in seconds
    #[arg(long = "time-limit", default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Registry TSV path; defaults to the built-in table
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Number of trials; seeds are seed, seed+1, ..
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Append records to this JSONL file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Adopt an improved best value as the target for later trials
    #[arg(long = "adopt-improved", default_value_t = false)]
    adopt_improved: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    /// JSONL records file
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMetric {
    Probes,
    Runtime,
}

#[derive(Args)]
struct FitArgs {
    /// JSONL file of experiment summaries, one per instance size
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "probes")]
    metric: FitMetric,
}

#[derive(Args)]
struct PredictArgs {
    /// Model coefficient a of a*b^L
    #[arg(long)]
    a: f64,
    /// Model base b of a*b^L
    #[arg(long)]
    b: f64,
    #[arg(long = "L")]
    len: u32,
    /// Time limit in the model's unit (seconds for runtime models)
    #[arg(long = "time-limit")]
    time_limit: f64,
    #[arg(long = "load-factor", default_value_t = 1.0)]
    load_factor: f64,
    /// Experiment sample size the hit prediction refers to
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Required uncensored hits for the processor-count prediction
    #[arg(long = "nc", default_value_t = 100)]
    n_c: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "L")]
    len: u32,
    /// Search the full coordinate space instead of skew-symmetric halves
    #[arg(long, default_value_t = false)]
    full: bool,
    /// Also count canonic solutions with energy at or below this bound
    #[arg(long)]
    bound: Option<i64>,
}

#[derive(Args)]
struct LegendreArgs {
    /// Odd prime sequence length
    #[arg(long)]
    p: u64,
    /// Rotation fraction range; defaults to the published grid for this size
    #[arg(long = "r-min")]
    r_min: Option<f64>,
    #[arg(long = "r-max")]
    r_max: Option<f64>,
    /// Appending fraction range
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegistryArg {
    /// Registry TSV path; defaults to the built-in table
    #[arg(long)]
    registry: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Experiment(args) => cmd_experiment(args),
        Cmd::Summarize(args) => cmd_summarize(args),
        Cmd::Fit(args) => cmd_fit(args),
        Cmd::Predict(args) => cmd_predict(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Legendre(args) => cmd_legendre(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::MeritTable(args) => cmd_merit_table(args),
    }
}

fn load_registry(path: &Option<PathBuf>) -> Result<BestKnownRegistry, String> {
    match path {
        Some(p) => BestKnownRegistry::from_path(p).map_err(|e| e.to_string()),
        None => Ok(BestKnownRegistry::builtin()),
    }
}

fn parse_walk_limit(text: &str) -> Result<WalkLimit, String> {
    match text {
        "u" | "U" | "unlimited" => Ok(WalkLimit::Unlimited),
        n => n
            .parse::<u32>()
            .map(WalkLimit::Bounded)
            .map_err(|_| format!("bad --omega-c {text:?}: expected a number or 'u'")),
    }
}

fn solver_kind(args: &SolveArgs) -> Result<SolverKind, String> {
    Ok(match args.solver {
        SolverArg::Saw => SolverKind::Saw(parse_walk_limit(&args.omega_c)?),
        SolverArg::Mats => SolverKind::Mats,
        SolverArg::Rrts => SolverKind::Rrts,
        SolverArg::Mats8 => SolverKind::Mats8,
    })
}

fn resolve_target(args: &SolveArgs) -> Result<i64, String> {
    if let Some(t) = args.target {
        return Ok(t);
    }
    let registry = load_registry(&args.registry)?;
    registry
        .target_for(args.len)
        .ok_or_else(|| format!("no --target given and no registry entry for L={}", args.len))
}

fn time_limit(seconds: f64) -> Duration {
    Duration::from_secs_f64(seconds.max(0.0))
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let kind = solver_kind(&args)?;
    let target = resolve_target(&args)?;
    let record = run_trial(
        kind,
        args.len,
        target,
        time_limit(args.time_limit),
        args.seed,
    )
    .map_err(|e| e.to_string())?;
    println!("{}", record.to_jsonl());
    Ok(if record.mem_capped == 1 { EXIT_BUDGET } else { 0 })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<u8, String> {
    let kind = solver_kind(&args.solve)?;
    let target = resolve_target(&args.solve)?;
    let mut cfg = ExperimentConfig::new(
        kind,
        args.solve.len,
        target,
        time_limit(args.solve.time_limit),
        args.n,
    );
    cfg.seed_base = args.solve.seed;
    cfg.adopt_improved = args.adopt_improved;
    let records = run_experiment(&cfg).map_err(|e| e.to_string())?;
    match &args.out {
        Some(path) => append_jsonl(path, &records).map_err(|e| e.to_string())?,
        None => {
            for rec in &records {
                println!("{}", rec.to_jsonl());
            }
        }
    }
    let capped = records.iter().any(|r| r.mem_capped == 1);
    Ok(if capped { EXIT_BUDGET } else { 0 })
}

fn cmd_summarize(args: SummarizeArgs) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| e.to_string())?;
    let records = parse_jsonl(&text).map_err(|e| e.to_string())?;
    let summary = summarize(&records).map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::to_string(&summary).map_err(|e| e.to_string())?
    );
    Ok(0)
}

fn cmd_fit(args: FitArgs) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let summary: ExperimentSummary =
            serde_json::from_str(line).map_err(|e| format!("summary line {}: {e}", i + 1))?;
        let mean = match args.metric {
            FitMetric::Probes => summary.mean_cnt_probe,
            // milliseconds in records, seconds everywhere else
            FitMetric::Runtime => summary.mean_runtime_ms.map(|ms| ms / 1000.0),
        };
        let Some(mean) = mean else {
            return Err(format!("summary line {} has no uncensored mean", i + 1));
        };
        points.push((f64::from(summary.len), mean));
    }
    let unit = match args.metric {
        FitMetric::Probes => CostUnit::Probes,
        FitMetric::Runtime => CostUnit::Seconds,
    };
    let model = fit_exponential_model(&points, unit).map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::to_string(&model).map_err(|e| e.to_string())?
    );
    Ok(0)
}

fn cmd_predict(args: PredictArgs) -> Result<u8, String> {
    let model = AsymptoticModel {
        a: args.a,
        b: args.b,
        unit: CostUnit::Seconds,
    };
    let report = predict(
        &model,
        args.len,
        args.time_limit,
        args.load_factor,
        args.n,
        args.n_c,
    )
    .map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::to_string(&report).map_err(|e| e.to_string())?
    );
    eprintln!("L                  {}", report.len);
    eprintln!("model mean         {:.6}", report.model_mean);
    eprintln!("time limit         {:.6}", report.t_lmt);
    eprintln!("load factor        {:.2}", report.load_factor);
    eprintln!("hit ratio pred.    {:.7}", report.hit_ratio_predicted);
    eprintln!("hits pred. (N={})  {}", args.n, report.hits_predicted);
    eprintln!("processors needed  {}", report.processors_needed);
    eprintln!("solvability single {:.4}", report.solvability_single);
    eprintln!("solvability serial {:.4}", report.solvability_serial);
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, String> {
    let skew = !args.full;
    let map_err = |e: OracleError| -> (u8, String) {
        match e {
            OracleError::Budget { .. } => (EXIT_BUDGET, e.to_string()),
            OracleError::EvenLength(_) => (EXIT_USAGE, e.to_string()),
        }
    };
    let result = match exhaustive_optimum(args.len, skew) {
        Ok(r) => r,
        Err(e) => {
            let (code, msg) = map_err(e);
            eprintln!("error: {msg}");
            return Ok(code);
        }
    };
    println!(
        "L={} mode={} optimum={} canonic={}",
        args.len,
        if skew { "skew" } else { "full" },
        result.optimum,
        result.canonic_count()
    );
    for seq in &result.canonic {
        if skew {
            let half = labs::seq::half_of(seq).expect("odd length");
            match RleSolution::encode(&half) {
                Ok(rle) => println!("{seq}  rle={rle}"),
                Err(_) => println!("{seq}"),
            }
        } else {
            println!("{seq}");
        }
    }
    if let Some(bound) = args.bound {
        match count_canonic(args.len, bound, skew) {
            Ok(count) => println!("canonic(E<={bound})={count}"),
            Err(e) => {
                let (code, msg) = map_err(e);
                eprintln!("error: {msg}");
                return Ok(code);
            }
        }
    }
    Ok(0)
}

fn cmd_legendre(args: LegendreArgs) -> Result<u8, String> {
    let default = GridRange::default_for(args.p);
    let range = GridRange {
        r_min: args.r_min.unwrap_or(default.r_min),
        r_max: args.r_max.unwrap_or(default.r_max),
        t_min: args.t_min.unwrap_or(default.t_min),
        t_max: args.t_max.unwrap_or(default.t_max),
    };
    let search = grid_search_merit(args.p, range).map_err(|e| e.to_string())?;
    let mut csv = String::from("p,r,t,L_out,E,F\n");
    for cell in &search.cells {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{},{},{:.5}\n",
            search.p, cell.r, cell.t, cell.out_len, cell.energy, cell.merit
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    eprintln!(
        "best: F={:.5} at r={:.6} t={:.6} (L_out={})",
        search.best.merit, search.best.r, search.best.t, search.best.out_len
    );
    Ok(0)
}

fn cmd_verify(args: RegistryArg) -> Result<u8, String> {
    let registry = load_registry(&args.registry)?;
    let report = verify_registry(&registry);
    for row in &report.rows {
        println!(
            "L={} {} {}",
            row.len,
            if row.passed { "PASS" } else { "FAIL" },
            row.detail
        );
    }
    Ok(if report.all_passed() { 0 } else { EXIT_VERIFY })
}

fn cmd_merit_table(args: RegistryArg) -> Result<u8, String> {
    let registry = load_registry(&args.registry)?;
    print!("{}", merit_table_csv(&registry));
    Ok(0)
}
