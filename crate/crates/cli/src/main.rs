//! Command-line digit extraction for straight-line-program integers.
//!
//! Subcommands:
//!
//! * `digit`   — compute the `m`-th base-`b` digit of a program's value
//! * `gen-slp` — emit the repeated-squaring program for `a^t`
//! * `bench`   — sweep a grid of power workloads, CSV on stdout
//!
//! Exit codes: 0 success, 2 parse error, 3 infeasible plan, 4 verification
//! mismatch, 1 anything else.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use slpdigit::extract::{
    extract_digits_in, make_plan_with_caps, DigitReport, ExtractionPlan, PlanCaps,
};
use slpdigit::oracle;
use slpdigit::slp::power_digit_approx;
use slpdigit::{Error, SlpProgram, Workspace};

#[derive(Parser)]
#[command(name = "slpdigit", version, about = "Single-digit extraction for straight-line-program integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the m-th base-b digit of the program's value
    Digit(DigitArgs),
    /// Generate the repeated-squaring program for a power a^t
    GenSlp(GenSlpArgs),
    /// Run a grid of power workloads and emit CSV measurements
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct DigitArgs {
    /// SLP v1 program file
    #[arg(long, value_name = "FILE", conflicts_with = "pow")]
    slp: Option<PathBuf>,
    /// Inline power spec `a^t`, e.g. 2^1000
    #[arg(long, value_name = "A^T")]
    pow: Option<String>,
    /// Output base b
    #[arg(long, default_value_t = 10)]
    base: u64,
    /// Digit index m (1 = least significant)
    #[arg(short = 'm', long = "digit-index")]
    digit_index: u64,
    /// Approximation level y: the report carries y+1 digits
    #[arg(short = 'y', long = "level", default_value_t = 4)]
    level: u64,
    /// Digit-count approximation A (factor-2 slack suffices); skips the
    /// exact-evaluation estimate
    #[arg(long, value_name = "A")]
    digits_approx: Option<u64>,
    /// Worker threads for the term loop
    #[arg(long, default_value_t = 1)]
    workers: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cross-check against the exact oracle (desk scale only)
    #[arg(long)]
    verify: bool,
    /// Cap on the split parameters S and T
    #[arg(long, default_value_t = 1 << 26)]
    max_split: u64,
    /// Cap on the per-term modulus size in bits
    #[arg(long, default_value_t = 1 << 31)]
    max_modulus_bits: u64,
}

#[derive(Args)]
struct GenSlpArgs {
    /// Power spec `a^t`, e.g. 2^10
    #[arg(long, value_name = "A^T")]
    pow: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated exponent grid, e.g. 1000,10000
    #[arg(long = "t-grid", value_delimiter = ',', required = true)]
    t_grid: Vec<u64>,
    /// Power base a
    #[arg(long, default_value_t = 2)]
    pow_base: u64,
    /// Output base b
    #[arg(long, default_value_t = 10)]
    base: u64,
    /// Approximation level y
    #[arg(short = 'y', long = "level", default_value_t = 1)]
    level: u64,
    /// Comma-separated worker counts
    #[arg(long, value_delimiter = ',', default_value = "1")]
    workers: Vec<u64>,
    /// Digit indices, one per grid point; defaults to t/2
    #[arg(short = 'm', long = "digit-indices", value_delimiter = ',')]
    digit_indices: Option<Vec<u64>>,
}

enum Failure {
    Parse(String),
    Infeasible(String),
    Verify(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Verify(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Infeasible(m) | Failure::Verify(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Parse { .. } | Error::ForwardReference { .. } => Failure::Parse(err.to_string()),
            Error::Infeasible(_) | Error::Overflow(_) => Failure::Infeasible(err.to_string()),
            _ => Failure::Other(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Digit(args) => cmd_digit(args),
        Command::GenSlp(args) => cmd_gen_slp(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn parse_power_spec(spec: &str) -> Result<(u64, u64), Failure> {
    let (a, t) = spec
        .split_once('^')
        .ok_or_else(|| Failure::Parse(format!("power spec `{spec}` is not of the form a^t")))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| Failure::Parse(format!("invalid power base `{a}`")))?;
    let t: u64 = t
        .trim()
        .parse()
        .map_err(|_| Failure::Parse(format!("invalid exponent `{t}`")))?;
    if a < 2 {
        return Err(Failure::Parse("power base must be at least 2".into()));
    }
    if t < 1 {
        return Err(Failure::Parse("exponent must be at least 1".into()));
    }
    Ok((a, t))
}

enum Source {
    File(SlpProgram),
    Power { prog: SlpProgram, a: u64, t: u64 },
}

impl Source {
    fn program(&self) -> &SlpProgram {
        match self {
            Source::File(prog) | Source::Power { prog, .. } => prog,
        }
    }
}

fn load_source(args: &DigitArgs) -> Result<Source, Failure> {
    match (&args.slp, &args.pow) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Other(format!("cannot read {}: {e}", path.display())))?;
            Ok(Source::File(SlpProgram::parse(&text)?))
        }
        (None, Some(spec)) => {
            let (a, t) = parse_power_spec(spec)?;
            Ok(Source::Power { prog: SlpProgram::power(a, t), a, t })
        }
        _ => Err(Failure::Parse(
            "exactly one SLP source is required: --slp FILE or --pow A^T".into(),
        )),
    }
}

fn digits_string(digits: &[u64], base: u64) -> String {
    if base <= 36 {
        digits
            .iter()
            .map(|&d| {
                char::from_digit(d as u32, base as u32)
                    .expect("digit below base")
                    .to_ascii_uppercase()
            })
            .collect()
    } else {
        digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Serialize)]
struct JsonReport {
    gamma_digits: String,
    inferred_digit: u64,
    ambiguous: bool,
    #[serde(rename = "S")]
    split: u64,
    #[serde(rename = "T")]
    terms: u64,
    #[serde(rename = "k")]
    layer: u64,
    #[serde(rename = "P")]
    prime_limit: u64,
    prime_count: u64,
    max_operand_bits: u64,
    elapsed_ms: u64,
    workers: u64,
}

fn print_report(report: &DigitReport, base: u64, format: Format) {
    match format {
        Format::Text => {
            println!("gamma=0.{} (base {base})", digits_string(report.gamma.digits(), base));
            println!("digit={}", report.inferred_digit);
            println!("ambiguous={}", report.ambiguous);
            println!("wrapped={}", report.wrapped);
            let s = &report.stats;
            println!(
                "S={} T={} k={} P={} primes={}",
                s.split, s.terms, s.layer, s.prime_limit, s.prime_count
            );
            println!("max_operand_bits={}", s.max_operand_bits);
            println!("peak_workspace_bits={}", s.peak_workspace_bits);
            println!("mod_mul_count={}", s.mod_mul_count);
            println!("elapsed_ms={}", s.elapsed.as_millis());
            println!("workers={}", s.workers);
        }
        Format::Json => {
            let s = &report.stats;
            let json = JsonReport {
                gamma_digits: digits_string(report.gamma.digits(), base),
                inferred_digit: report.inferred_digit,
                ambiguous: report.ambiguous,
                split: s.split,
                terms: s.terms,
                layer: s.layer,
                prime_limit: s.prime_limit,
                prime_count: s.prime_count,
                max_operand_bits: s.max_operand_bits,
                elapsed_ms: s.elapsed.as_millis() as u64,
                workers: s.workers,
            };
            println!("{}", serde_json::to_string(&json).expect("report serializes"));
        }
    }
}

fn build_plan(args: &DigitArgs, source: &Source) -> Result<ExtractionPlan, Failure> {
    if args.base < 2 {
        return Err(Failure::Parse("base must be at least 2".into()));
    }
    if args.digit_index < 1 {
        return Err(Failure::Parse("digit index starts at 1".into()));
    }
    if args.level < 1 {
        return Err(Failure::Parse("level must be at least 1".into()));
    }
    if args.workers < 1 {
        return Err(Failure::Parse("worker count must be at least 1".into()));
    }
    let digits_approx = match (args.digits_approx, source) {
        (Some(a), _) => a,
        (None, Source::Power { a, t, .. }) => power_digit_approx(*a, *t, args.base),
        (None, Source::File(prog)) => prog.estimate_digit_count(args.base).map_err(|e| {
            Failure::Other(format!(
                "{e}; pass --digits-approx to avoid the exact digit-count estimate"
            ))
        })?,
    };
    let caps = PlanCaps { max_split: args.max_split, max_modulus_bits: args.max_modulus_bits };
    Ok(make_plan_with_caps(args.base, args.digit_index, args.level, digits_approx, &caps)?)
}

fn verify_report(
    report: &DigitReport,
    prog: &SlpProgram,
    base: u64,
    digit_index: u64,
    level: u64,
) -> Result<(), Failure> {
    let ok = oracle::is_level_approximation(prog, base, digit_index, level, &report.gamma)
        .map_err(|e| Failure::Other(format!("verification needs the exact oracle: {e}")))?;
    if !ok {
        return Err(Failure::Verify(format!(
            "gamma is not a level-{level} approximation: |gamma - nu| >= b^-{level}"
        )));
    }
    let exact_digits = oracle::exact_nu_digits(prog, base, digit_index, 1)
        .map_err(|e| Failure::Other(e.to_string()))?;
    let true_digit = exact_digits[0];
    if !report.ambiguous && report.inferred_digit != true_digit {
        return Err(Failure::Verify(format!(
            "unambiguous digit mismatch: reported {} but exact digit is {true_digit}",
            report.inferred_digit
        )));
    }
    if report.ambiguous {
        let delta = report.inferred_digit.abs_diff(true_digit);
        if delta > 1 && delta != base - 1 {
            return Err(Failure::Verify(format!(
                "ambiguous digit {} is not within one of the exact digit {true_digit}",
                report.inferred_digit
            )));
        }
    }
    Ok(())
}

fn cmd_digit(args: DigitArgs) -> Result<(), Failure> {
    let source = load_source(&args)?;
    let plan = build_plan(&args, &source)?;
    let ws = Workspace::new();
    let report = extract_digits_in(&plan, source.program(), args.workers, &ws);
    if args.verify {
        verify_report(&report, source.program(), args.base, args.digit_index, args.level)?;
    }
    print_report(&report, args.base, args.format);
    Ok(())
}

fn cmd_gen_slp(args: GenSlpArgs) -> Result<(), Failure> {
    let (a, t) = parse_power_spec(&args.pow)?;
    print!("{}", SlpProgram::power(a, t).to_text());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    if let Some(indices) = &args.digit_indices {
        if indices.len() != args.t_grid.len() {
            return Err(Failure::Parse(
                "--digit-indices must list one index per grid point".into(),
            ));
        }
    }
    println!("t,y,M,elapsed_ms,peak_workspace_bits,mod_mul_count");
    for (i, &t) in args.t_grid.iter().enumerate() {
        if t < 1 {
            return Err(Failure::Parse("grid exponents must be at least 1".into()));
        }
        let digit_index = args
            .digit_indices
            .as_ref()
            .map(|indices| indices[i])
            .unwrap_or_else(|| (t / 2).max(1));
        let digits_approx = power_digit_approx(args.pow_base, t, args.base);
        let plan = make_plan_with_caps(
            args.base,
            digit_index,
            args.level,
            digits_approx,
            &PlanCaps::default(),
        )?;
        let prog = SlpProgram::power(args.pow_base, t);
        for &workers in &args.workers {
            if workers < 1 {
                return Err(Failure::Parse("worker counts must be at least 1".into()));
            }
            let ws = Workspace::new();
            let report = extract_digits_in(&plan, &prog, workers, &ws);
            println!(
                "{t},{},{workers},{},{},{}",
                args.level,
                report.stats.elapsed.as_millis(),
                report.stats.peak_workspace_bits,
                report.stats.mod_mul_count
            );
        }
    }
    Ok(())
}
