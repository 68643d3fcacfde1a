use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lucasian::lucas::s_iterate_with;
use lucasian::modulus::SpecialFormModulus;
use lucasian::{
    applicable_rules, check_sun_conditions, class_test, class_test_verified, cross_check, decimal_digits, find_params,
    rule_table, sun_seed, sun_test, verify_lemma_tables, verify_rule_consistency, Candidate, CrossCheckMode, Outcome,
    Sign, SunParams,
};
use lucasian_cli::checkpoint::{resolve_path, CheckpointError, ScanMode, ScanRange, CHECKPOINT_DIR_ENV};
use lucasian_cli::record::{millis, ResultRecord};
use lucasian_cli::scan::{run_scan, ScanError, ScanOptions};
use serde_json::json;

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

/// Lucasian primality tests for N = k*2^m +- 1.
///
/// Every command writes JSON to standard output.
#[derive(Debug, Parser)]
#[command(name = "lucasian", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test one candidate. Exit status: 0 prime, 1 composite, 2 not applicable.
    Test(TestArgs),
    /// Test a range of candidates, one JSON line per applicable candidate.
    Scan(ScanArgs),
    /// Check the residue tables or the class-rule table.
    Verify(VerifyArgs),
    /// Compare verdicts with the reference oracle for every odd k < 2^m.
    CrossCheck(CrossCheckArgs),
    /// Time the squaring loop for one candidate.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct TestArgs {
    #[arg(long)]
    k: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, allow_hyphen_values = true)]
    sign: Sign,
    /// Run the general criterion with this b instead of the class rules.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<i64>,
    /// c for the general criterion (default 1).
    #[arg(long, requires = "b", allow_hyphen_values = true)]
    c: Option<i64>,
    /// Run every applicable class rule and fail if they disagree.
    #[arg(long, conflicts_with = "b")]
    verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Class,
    Generic,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    k_min: u64,
    #[arg(long)]
    k_max: u64,
    #[arg(long, default_value_t = 3)]
    m_min: u64,
    #[arg(long)]
    m_max: u64,
    /// Signs to scan: "-", "+", or "-+".
    #[arg(long, default_value = "-+", allow_hyphen_values = true, value_parser = parse_signs)]
    signs: SignSet,
    /// Checkpoint file; relative paths resolve under $LUCASIAN_CHECKPOINT_DIR.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Candidates per checkpoint write.
    #[arg(long, default_value_t = 64)]
    stride: usize,
    /// Stop after this many positions; rerun with the same checkpoint to resume.
    #[arg(long)]
    max_candidates: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Class)]
    mode: ModeArg,
    #[arg(long, default_value_t = 20)]
    b_max: u32,
    #[arg(long, default_value_t = 3)]
    c_max: u32,
    /// Include elapsed_ms in records (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone)]
struct SignSet(Vec<Sign>);

fn parse_signs(s: &str) -> Result<SignSet, String> {
    let mut signs = Vec::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        match part.parse::<Sign>() {
            Ok(sign) => signs.push(sign),
            Err(_) => {
                for ch in part.chars() {
                    signs.push(ch.to_string().parse::<Sign>().map_err(|e| e.to_string())?);
                }
            }
        }
    }
    signs.sort();
    signs.dedup();
    if signs.is_empty() {
        return Err("no signs given".into());
    }
    Ok(SignSet(signs))
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(subcommand)]
    target: VerifyTarget,
}

#[derive(Debug, Subcommand)]
enum VerifyTarget {
    /// Closed-form residue tables against the generic Jacobi symbol.
    Lemmas {
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
    /// Jacobi preconditions of every class rule over its residue classes.
    Rules,
}

#[derive(Debug, Args)]
struct CrossCheckArgs {
    #[arg(long, default_value_t = 3)]
    m_min: u64,
    #[arg(long)]
    m_max: u64,
    #[arg(long, default_value = "-+", allow_hyphen_values = true, value_parser = parse_signs)]
    signs: SignSet,
    #[arg(long, value_enum, default_value_t = ModeArg::Class)]
    mode: ModeArg,
    #[arg(long, default_value_t = 20)]
    b_max: u32,
    #[arg(long, default_value_t = 3)]
    c_max: u32,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    k: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, allow_hyphen_values = true)]
    sign: Sign,
    #[arg(long, default_value_t = 1)]
    repetitions: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("lucasian: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::new(EXIT_IO, err)
    }
}

impl From<ScanError> for Failure {
    fn from(err: ScanError) -> Self {
        let code = match &err {
            ScanError::Checkpoint(CheckpointError::Parse { .. })
            | ScanError::Checkpoint(CheckpointError::Schema { .. })
            | ScanError::Checkpoint(CheckpointError::RangeMismatch { .. }) => EXIT_DATA,
            ScanError::Checkpoint(_) | ScanError::Output(_) => EXIT_IO,
            ScanError::Pool(_) => EXIT_SOFTWARE,
        };
        Failure::new(code, err)
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(|e| Failure::new(EXIT_IO, e))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Verify(args) => cmd_verify(args),
        Command::CrossCheck(args) => cmd_cross_check(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn outcome_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Prime => 0,
        Outcome::Composite => 1,
        Outcome::NotApplicable => 2,
    }
}

fn cmd_test(args: TestArgs) -> Result<u8, Failure> {
    let cand = match Candidate::new(args.k, args.m, args.sign) {
        Ok(cand) => cand,
        Err(err) => {
            let record = ResultRecord::invalid(args.k, args.m, args.sign, err.to_string());
            print_json(&record)?;
            return Ok(2);
        }
    };
    let started = Instant::now();
    let verdict = match (args.b, args.verify) {
        (Some(b), _) => sun_test(&cand, SunParams::new(b, args.c.unwrap_or(1))),
        (None, true) => class_test_verified(&cand).map_err(|e| Failure::new(EXIT_SOFTWARE, e))?,
        (None, false) => class_test(&cand),
    };
    let record = ResultRecord::from_verdict(&cand, &verdict, Some(millis(started.elapsed())));
    print_json(&record)?;
    Ok(outcome_code(verdict.outcome))
}

fn cmd_scan(args: ScanArgs) -> Result<u8, Failure> {
    let mode = match args.mode {
        ModeArg::Class => ScanMode::Class,
        ModeArg::Generic => ScanMode::Generic {
            b_max: args.b_max,
            c_max: args.c_max,
        },
    };
    let range = ScanRange {
        k_min: args.k_min,
        k_max: args.k_max,
        m_min: args.m_min,
        m_max: args.m_max,
        signs: args.signs.0,
        mode,
    };
    if range.k_min > range.k_max || range.m_min > range.m_max {
        return Err(Failure::new(EXIT_USAGE, "empty scan range"));
    }
    let env_dir = std::env::var_os(CHECKPOINT_DIR_ENV).map(PathBuf::from);
    let checkpoint = resolve_path(args.checkpoint.as_deref(), env_dir.as_deref(), &range);
    let opts = ScanOptions {
        stride: args.stride,
        jobs: args.jobs,
        max_candidates: args.max_candidates,
        timing: args.timing,
        checkpoint,
    };
    let mut out = io::stdout().lock();
    run_scan(range, &opts, &mut out)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    match args.target {
        VerifyTarget::Lemmas { limit } => {
            let report = verify_lemma_tables(limit);
            let clean = report.is_clean();
            print_json(&json!({ "target": "lemmas", "clean": clean, "report": report }))?;
            Ok(if clean { 0 } else { 1 })
        }
        VerifyTarget::Rules => {
            let reports: Vec<_> = rule_table().iter().map(verify_rule_consistency).collect();
            let clean = reports.iter().all(|r| r.is_clean());
            print_json(&json!({
                "target": "rules",
                "clean": clean,
                "rules": rule_table(),
                "reports": reports,
            }))?;
            Ok(if clean { 0 } else { 1 })
        }
    }
}

fn cmd_cross_check(args: CrossCheckArgs) -> Result<u8, Failure> {
    let mode = match args.mode {
        ModeArg::Class => CrossCheckMode::ClassRules,
        ModeArg::Generic => CrossCheckMode::Generic {
            b_max: args.b_max,
            c_max: args.c_max,
        },
    };
    let report = cross_check(args.m_min, args.m_max, &args.signs.0, mode).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    print_json(&report)?;
    Ok(if report.is_clean() { 0 } else { 1 })
}

/// Parameters for timing: the class rule's b if one applies, else the first
/// admissible pair from a small search, else b = 3 (the loop runs either way).
fn bench_params(cand: &Candidate) -> SunParams {
    if let Ok(rules) = applicable_rules(cand) {
        if let Some((rule, _)) = rules.first() {
            return SunParams::new(rule.b, 1);
        }
    }
    find_params(cand, 20, 3).unwrap_or(SunParams::new(3, 1))
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    let cand = Candidate::new(args.k, args.m, args.sign).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let params = bench_params(&cand);
    let applicable = check_sun_conditions(&cand, params).satisfied;
    let reducer = SpecialFormModulus::for_candidate(&cand);
    let squarings = cand.m() - 2;
    let mut runs = Vec::new();
    for _ in 0..args.repetitions.max(1) {
        let started = Instant::now();
        let seed = sun_seed(&cand, params).map_err(|e| Failure::new(EXIT_SOFTWARE, e))?;
        let trace = s_iterate_with(&seed, squarings, &reducer).map_err(|e| Failure::new(EXIT_SOFTWARE, e))?;
        let elapsed = started.elapsed();
        let verdict = match (applicable, trace.vanished()) {
            (false, _) => Outcome::NotApplicable,
            (true, true) => Outcome::Prime,
            (true, false) => Outcome::Composite,
        };
        let per_squaring_us = if squarings == 0 {
            0.0
        } else {
            elapsed.as_secs_f64() * 1e6 / squarings as f64
        };
        runs.push(json!({
            "total_ms": millis(elapsed),
            "per_squaring_us": per_squaring_us,
            "verdict": verdict,
        }));
    }
    print_json(&json!({
        "k": cand.k(),
        "m": cand.m(),
        "sign": cand.sign(),
        "digits": decimal_digits(cand.n()),
        "squarings": squarings,
        "params": params,
        "runs": runs,
    }))?;
    Ok(0)
}
