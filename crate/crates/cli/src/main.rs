//! `adiabatic-sim`: run, sweep, and inspect the adiabatic BV and Simon simulations.
//!
//! Payloads (JSON records, CSV tables) go to stdout or `--out`; everything
//! else goes to stderr. Exit status is 0 on success, 1 on a usage or
//! configuration error, and 2 when a protocol run fails.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adiabatic_sim::hamiltonians::{gap_profile, two_level_gap_profile, InterpolatedHamiltonian};
use adiabatic_sim::oracles::{simon_build, verify_promise, BvMask, OracleRecord, Problem};
use adiabatic_sim::protocols::{
    compare_paths, run, sweep, EvolutionPath, RunConfig, RunReport, SweepAxis,
};
use adiabatic_sim::record::{sweep_csv, OutputRecord, SCHEMA_VERSION};
use adiabatic_sim::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "adiabatic-sim",
    version,
    about = "Adiabatic Bernstein-Vazirani and Simon simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a Bernstein-Vazirani mask.
    Bv(RunArgs),
    /// Recover a Simon xor-mask.
    Simon(SimonArgs),
    /// Aggregate many seeded runs along one parameter axis (CSV or JSON).
    Sweep(SweepArgs),
    /// Scan the spectral gap along the interpolation.
    Gap(GapArgs),
    /// Build a Simon oracle and check its promise exhaustively.
    VerifyOracle(VerifyArgs),
    /// Re-run the configuration stored in a record or config file.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Full,
    Factored,
}

impl From<PathArg> for EvolutionPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Full => EvolutionPath::Full,
            PathArg::Factored => EvolutionPath::Factored,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Bv,
    Simon,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Bv => Problem::Bv,
            ProblemArg::Simon => Problem::Simon,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    N,
    #[value(name = "T")]
    Time,
    Steps,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::N => SweepAxis::N,
            AxisArg::Time => SweepAxis::Time,
            AxisArg::Steps => SweepAxis::Steps,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Number of input bits.
    #[arg(long)]
    n: usize,
    /// Planted mask (decimal, 0x hex, or 0b binary); drawn from the seed when omitted.
    #[arg(long, value_parser = parse_mask)]
    a: Option<u64>,
    /// Total annealing time T.
    #[arg(long = "time", default_value_t = 50.0)]
    total_time: f64,
    /// Integration steps N.
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    #[arg(long, value_enum, default_value = "factored")]
    path: PathArg,
    /// Master seed.
    #[arg(long, env = "ADIABATIC_SIM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_repeats: Option<u32>,
    /// Write the payload here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self, problem: Problem) -> RunConfig {
        RunConfig {
            problem,
            n: self.n,
            a: self.a,
            total_time: self.total_time,
            steps: self.steps,
            path: self.path.into(),
            seed: self.seed,
            max_repeats: self.max_repeats,
            scramble_seed: None,
        }
    }
}

#[derive(Args)]
struct SimonArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Relabel the oracle outputs with a seeded permutation.
    #[arg(long)]
    scramble_seed: Option<u64>,
    /// Also evolve along the other path and report the largest amplitude deviation.
    #[arg(long)]
    compare_factored: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    values: Vec<f64>,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, value_parser = parse_mask)]
    a: Option<u64>,
    #[arg(long = "time", default_value_t = 50.0)]
    total_time: f64,
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    #[arg(long, value_enum, default_value = "factored")]
    path: PathArg,
    #[arg(long, env = "ADIABATIC_SIM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_repeats: Option<u32>,
    #[arg(long)]
    scramble_seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long, value_enum, default_value = "bv")]
    problem: ProblemArg,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Mask of the oracle; defaults to the all-ones mask.
    #[arg(long, value_parser = parse_mask)]
    a: Option<u64>,
    /// Number of grid points on [0, 1], endpoints included.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Scan the single-qubit block against its closed form instead.
    #[arg(long)]
    two_level: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_mask)]
    a: u64,
    #[arg(long)]
    scramble_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// An output record, or a bare run configuration, as JSON.
    input: PathBuf,
    /// Exit with status 2 if the replayed results differ from the stored ones.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Results payload of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunResults {
    #[serde(flatten)]
    report: RunReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_amplitude_deviation: Option<f64>,
}

#[derive(Serialize)]
struct VerifyOutput {
    schema_version: &'static str,
    oracle: OracleRecord,
    promise_holds: bool,
    witness: Option<(u64, u64)>,
}

enum Failure {
    Usage(String),
    Protocol(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Contradiction { .. }
            | Error::Integration { .. }
            | Error::ZeroProbabilityBranch { .. } => Failure::Protocol(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn parse_mask(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    let (digits, radix) = match t.get(..2) {
        Some("0x" | "0X") => (&t[2..], 16),
        Some("0b" | "0B") => (&t[2..], 2),
        _ => (t.as_str(), 10),
    };
    u64::from_str_radix(digits, radix).map_err(|e| format!("invalid mask {s:?}: {e}"))
}

fn emit(out: Option<&Path>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn execute(cfg: RunConfig, compare: bool) -> Result<OutputRecord<RunResults>, Failure> {
    cfg.validate()?;
    let cfg = cfg.resolved();
    let report = run(&cfg)?;
    let max_amplitude_deviation = if compare {
        Some(compare_paths(&cfg)?)
    } else {
        None
    };
    Ok(OutputRecord::new(
        cfg,
        RunResults {
            report,
            max_amplitude_deviation,
        },
    ))
}

fn summarize(rec: &OutputRecord<RunResults>) {
    let r = &rec.results.report;
    match r.recovered_a {
        Some(a) if r.success => eprintln!(
            "recovered a = {a:#x} after {} quantum run(s), {} restart(s)",
            r.quantum_runs, r.restarts
        ),
        _ => eprintln!(
            "failed to recover a = {:#x} within {} quantum run(s)",
            r.planted_a, r.quantum_runs
        ),
    }
    if let Some(d) = rec.results.max_amplitude_deviation {
        eprintln!("max amplitude deviation between paths: {d:.3e}");
    }
}

fn cmd_run(cfg: RunConfig, compare: bool, out: Option<&Path>) -> CmdResult {
    let rec = execute(cfg, compare)?;
    summarize(&rec);
    emit(out, &to_json(&rec))?;
    Ok(rec.results.report.success)
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let base = RunConfig {
        problem: args.problem.into(),
        n: args.n,
        a: args.a,
        total_time: args.total_time,
        steps: args.steps,
        path: args.path.into(),
        seed: args.seed,
        max_repeats: args.max_repeats,
        scramble_seed: args.scramble_seed,
    };
    let rows = sweep(args.axis.into(), &args.values, &base, args.trials)?;
    let payload = match args.format {
        FormatArg::Csv => sweep_csv(&rows),
        FormatArg::Json => to_json(&OutputRecord::new(base, rows)),
    };
    emit(args.out.as_deref(), &payload)?;
    Ok(true)
}

fn default_mask(problem: Problem, n: usize, a: Option<u64>) -> Result<u64, Failure> {
    let a = a.unwrap_or(if n >= 64 { u64::MAX } else { (1 << n) - 1 });
    if problem == Problem::Simon && a == 0 {
        return Err(Failure::Usage(
            "Simon's promise needs a positive mask".into(),
        ));
    }
    Ok(a)
}

fn cmd_gap(args: &GapArgs) -> CmdResult {
    let mut csv = format!("# schema_version={SCHEMA_VERSION}\n");
    let mut best = (f64::NAN, f64::INFINITY);
    if args.two_level {
        let profile = two_level_gap_profile::<f64>(args.grid)?;
        csv.push_str("s,gap,closed_form\n");
        for (s, g, c) in profile {
            let _ = writeln!(csv, "{s},{g},{c}");
            if g < best.1 {
                best = (s, g);
            }
        }
    } else {
        let problem = args.problem.into();
        let a = default_mask(problem, args.n, args.a)?;
        let h = match problem {
            Problem::Bv => InterpolatedHamiltonian::<f64>::bv(&BvMask::new(args.n, a)?)?,
            Problem::Simon => {
                InterpolatedHamiltonian::<f64>::simon(&simon_build(args.n, a, None)?)?
            }
        };
        let profile = gap_profile(&h, args.grid)?;
        csv.push_str("s,gap\n");
        for (s, g) in profile {
            let _ = writeln!(csv, "{s},{g}");
            if g < best.1 {
                best = (s, g);
            }
        }
    }
    eprintln!("minimum gap {:.6} at s = {:.4}", best.1, best.0);
    emit(args.out.as_deref(), &csv)?;
    Ok(true)
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let oracle = simon_build(args.n, args.a, args.scramble_seed)?;
    let report = verify_promise(&oracle)?;
    if let Some((w, y)) = report.witness {
        eprintln!("promise violated at ({w:#x}, {y:#x})");
    } else {
        eprintln!("promise holds for all {} inputs", 1u64 << args.n);
    }
    emit(
        args.out.as_deref(),
        &to_json(&VerifyOutput {
            schema_version: SCHEMA_VERSION,
            oracle: oracle.record(),
            promise_holds: report.holds,
            witness: report.witness,
        }),
    )?;
    Ok(report.holds)
}

fn cmd_replay(args: &ReplayArgs) -> CmdResult {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid JSON: {e}")))?;
    let (cfg, stored) = if value.get("config").is_some() {
        let rec: OutputRecord<Option<RunResults>> = serde_json::from_value(value)
            .map_err(|e| Failure::Usage(format!("not a run record: {e}")))?;
        rec.check_version()?;
        (rec.config, rec.results)
    } else {
        let cfg: RunConfig = serde_json::from_value(value)
            .map_err(|e| Failure::Usage(format!("not a run config: {e}")))?;
        (cfg, None)
    };
    let compare = stored
        .as_ref()
        .is_some_and(|r| r.max_amplitude_deviation.is_some());
    let rec = execute(cfg, compare)?;
    summarize(&rec);
    emit(args.out.as_deref(), &to_json(&rec))?;
    if args.check {
        if let Some(old) = stored {
            let same = old.report.same_outcome(&rec.results.report)
                && old.max_amplitude_deviation == rec.results.max_amplitude_deviation;
            if !same {
                return Err(Failure::Protocol(
                    "replayed results differ from the record".into(),
                ));
            }
            eprintln!("replay matches the stored results");
        }
    }
    Ok(rec.results.report.success)
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Bv(args) => cmd_run(args.config(Problem::Bv), false, args.out.as_deref()),
        Command::Simon(args) => {
            let cfg = RunConfig {
                scramble_seed: args.scramble_seed,
                ..args.run.config(Problem::Simon)
            };
            cmd_run(cfg, args.compare_factored, args.run.out.as_deref())
        }
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Gap(args) => cmd_gap(&args),
        Command::VerifyOracle(args) => cmd_verify(&args),
        Command::Replay(args) => cmd_replay(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Protocol(msg)) => {
            eprintln!("protocol failure: {msg}");
            ExitCode::from(2)
        }
    }
}
