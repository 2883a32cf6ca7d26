//! Command-line interface to the exchange-shuffle counting engine.
//!
//! Five subcommands cover the library surface: `mult` evaluates one
//! multiplicity (structured engine, enumeration oracle, or both with a
//! cross-check), `most-likely` reports the permutations of maximal
//! multiplicity at one degree, `fixed-points` prints exact finite-degree or
//! limiting fixed-point laws, `table` dumps every multiplicity of a small
//! degree, and `verify` runs the library's consistency battery.
//!
//! Invariants:
//! - Output is deterministic for fixed inputs regardless of `--threads`.
//! - Counts are printed in full decimal, never floating point; exact
//!   rationals print as `numerator/denominator`. The `limit` method is the
//!   single floating-point surface.
//! - Exit codes: 0 success, 1 usage error, 2 enumeration cap exceeded,
//!   3 invariant violation (method disagreement or a failed check).

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};

use xshuffle_core::engine::{Engine, EngineCaps};
use xshuffle_core::extremal;
use xshuffle_core::oracle::{total_words, Oracle, OracleCaps};
use xshuffle_core::perm::Permutation;
use xshuffle_core::series;
use xshuffle_core::verify::{run_suite, CheckOutcome, Suite, VerifyConfig};
use xshuffle_core::{BigCount, Error, Mode};

/// Exact counting for the exchange shuffle.
#[derive(Parser)]
#[command(name = "xshuffle", version, about)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args)]
struct Config {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads, 0 meaning one per core; the XSHUFFLE_THREADS
    /// environment variable supplies the default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Degree cap for the oracle's word sweeps; permutation-word sweeps
    /// allow one more vertex, rooted-tree sweeps two more.
    #[arg(long, global = true)]
    oracle_cap: Option<usize>,
    /// Largest cycle length the structured engine enumerates rooted trees
    /// for.
    #[arg(long, global = true)]
    tree_cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicity of one permutation under the uniform word model.
    Mult {
        /// Cycle notation, e.g. "(4 3)(2 1)"; "" is the identity.
        perm: String,
        /// Degree; defaults to the largest element mentioned.
        #[arg(long)]
        n: Option<usize>,
        /// How to count.
        #[arg(long, value_enum, default_value_t = MultMethod::Structured)]
        method: MultMethod,
    },
    /// Permutations of maximal multiplicity at one degree.
    MostLikely {
        /// Degree, at most 40.
        n: usize,
        /// Emit every class's maximum as a table instead of the winners.
        #[arg(long)]
        full_table: bool,
    },
    /// Distribution of the number of fixed points.
    FixedPoints {
        /// Degree; required by the exact methods, ignored by `limit`.
        #[arg(long)]
        n: Option<usize>,
        /// Word model.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// How to compute the law.
        #[arg(long, value_enum, default_value_t = FpMethod::Egf)]
        method: FpMethod,
        /// Largest fixed-point count tabulated by `limit`.
        #[arg(long, default_value_t = 10)]
        k_max: usize,
    },
    /// Every permutation of a small degree with its multiplicity.
    Table {
        /// Degree, bounded by the oracle cap.
        #[arg(long)]
        n: usize,
        /// Word model.
        #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
        mode: ModeArg,
    },
    /// Consistency battery cross-checking engine, oracle, and series.
    Verify {
        /// Which suite to run.
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Exhaustive-enumeration budget; raises the oracle and tree caps
        /// to match unless those are set explicitly.
        #[arg(long)]
        n_max: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MultMethod {
    /// Component recombination over the shuffle digraph.
    Structured,
    /// Exhaustive word enumeration.
    Oracle,
    /// Both, cross-checked for equality.
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Uniform,
    Permutation,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Uniform => Mode::Uniform,
            ModeArg::Permutation => Mode::Permutation,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FpMethod {
    /// Exact rationals from the generating-function engine.
    Egf,
    /// Exact rationals from word enumeration.
    Oracle,
    /// Floating-point limiting law.
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Symmetry,
    Structure,
    Series,
    Extremal,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Symmetry => Suite::Symmetry,
            SuiteArg::Structure => Suite::Structure,
            SuiteArg::Series => Suite::Series,
            SuiteArg::Extremal => Suite::Extremal,
            SuiteArg::All => Suite::All,
        }
    }
}

/// A failure carrying the process exit code it maps to, plus any report
/// that should still reach stdout (a verify run that found violations).
struct Failure {
    code: u8,
    message: String,
    stdout: Option<String>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
            stdout: None,
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
            stdout: None,
        }
    }
}

impl From<Error> for Failure {
    /// Cap overruns exit 2; arithmetic that can only fail through a library
    /// bug exits 3; everything else is bad input.
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => 2,
            Error::InexactDivision(_) | Error::Truncation(_) | Error::InvalidOperand(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
            stdout: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive as "errors" but exit clean;
            // genuine usage errors take code 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(report) = &failure.stdout {
                print!("{report}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Sizes the worker pool and dispatches the subcommand, returning the full
/// report to print on stdout.
fn run(cli: Cli) -> Result<String, Failure> {
    if let Some(threads) = thread_count(cli.config.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    let cfg = &cli.config;
    match cli.command {
        Command::Mult { perm, n, method } => cmd_mult(cfg, &perm, n, method),
        Command::MostLikely { n, full_table } => cmd_most_likely(cfg, n, full_table),
        Command::FixedPoints {
            n,
            mode,
            method,
            k_max,
        } => cmd_fixed_points(cfg, n, mode.into(), method, k_max),
        Command::Table { n, mode } => cmd_table(cfg, n, mode.into()),
        Command::Verify { suite, n_max } => cmd_verify(cfg, suite.into(), n_max),
    }
}

/// The worker-thread count: the flag if given, else XSHUFFLE_THREADS, else
/// none (keep rayon's default pool).
fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("XSHUFFLE_THREADS") {
        Ok(raw) => raw.trim().parse::<usize>().map(Some).map_err(|_| {
            Failure::usage(format!("XSHUFFLE_THREADS must be a thread count, got {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::usage(format!("XSHUFFLE_THREADS: {e}"))),
    }
}

/// Oracle caps from the flag, keeping the default stagger between word,
/// permutation-word, and rooted-tree sweeps; `floor` lifts the defaults so
/// a verify budget is never starved by them.
fn oracle_caps(flag: Option<usize>, floor: usize) -> OracleCaps {
    let base = OracleCaps::default();
    match flag {
        Some(cap) => OracleCaps {
            word_support: cap,
            perm_word_support: cap + 1,
            tree_support: cap + 2,
        },
        None => OracleCaps {
            word_support: base.word_support.max(floor),
            perm_word_support: base.perm_word_support.max(floor + 1),
            tree_support: base.tree_support.max(floor + 2),
        },
    }
}

/// Engine caps from the flag, lifted to `floor` when defaulted.
fn engine_caps(flag: Option<usize>, floor: usize) -> EngineCaps {
    let base = EngineCaps::default();
    EngineCaps {
        tree_len: flag.unwrap_or(base.tree_len.max(floor)),
        ..base
    }
}

/// Quotes a CSV field when it contains a comma, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Serializes a JSON document with a trailing newline.
fn json_doc(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    out.push('\n');
    out
}

/// Evaluates one multiplicity by the requested method(s), cross-checking
/// when both are asked for.
fn cmd_mult(
    cfg: &Config,
    raw: &str,
    n: Option<usize>,
    method: MultMethod,
) -> Result<String, Failure> {
    let perm = Permutation::parse_cycles(raw, n)?;
    let structured = match method {
        MultMethod::Structured | MultMethod::Both => {
            let engine = Engine::new(engine_caps(cfg.tree_cap, 0));
            Some(engine.multiplicity(&perm)?)
        }
        MultMethod::Oracle => None,
    };
    let enumerated = match method {
        MultMethod::Oracle | MultMethod::Both => {
            let oracle = Oracle::new(oracle_caps(cfg.oracle_cap, 0));
            Some(oracle.multiplicity(&perm)?)
        }
        MultMethod::Structured => None,
    };
    if let (Some(s), Some(o)) = (&structured, &enumerated) {
        if s != o {
            return Err(Failure::invariant(format!(
                "method disagreement for {perm}: structured {s}, oracle {o}"
            )));
        }
    }
    let rows: Vec<(&str, &BigCount)> = [
        ("structured", structured.as_ref()),
        ("oracle", enumerated.as_ref()),
    ]
    .into_iter()
    .filter_map(|(name, count)| count.map(|c| (name, c)))
    .collect();
    Ok(match cfg.format {
        Format::Text => {
            if rows.len() == 1 {
                format!("{}\n", rows[0].1)
            } else {
                rows.iter()
                    .map(|(name, count)| format!("{name}: {count}\n"))
                    .collect()
            }
        }
        Format::Csv => {
            let mut out = String::from("method,count\n");
            for (name, count) in &rows {
                let _ = writeln!(out, "{name},{count}");
            }
            out
        }
        Format::Json => {
            let mut doc = json!({
                "permutation": perm.to_string(),
                "degree": perm.degree(),
            });
            for (name, count) in &rows {
                doc[name] = Value::String(count.to_string());
            }
            json_doc(&doc)
        }
    })
}

/// Reports the winning permutations of one degree, or with `full_table`
/// every class maximum.
fn cmd_most_likely(cfg: &Config, n: usize, full_table: bool) -> Result<String, Failure> {
    if n == 0 || n > extremal::CLASS_DEGREE_CAP {
        return Err(Failure::usage(format!(
            "degree must lie in 1..={}, got {n}",
            extremal::CLASS_DEGREE_CAP
        )));
    }
    let engine = Engine::new(engine_caps(cfg.tree_cap, 0));
    let reports = extremal::most_likely(&engine, n)?;
    let winners = extremal::winners(&reports);
    let max_value = &winners[0].max_value;

    if full_table {
        return Ok(match cfg.format {
            Format::Json => {
                let entries: Vec<Value> = reports
                    .iter()
                    .map(|r| {
                        json!({
                            "n": n,
                            "partition": r.class.to_string(),
                            "maxValue": r.max_value.to_string(),
                            "canonicalMaximizer": r.canonical_maximizer.to_string(),
                            "isGlobalWinner": r.max_value == *max_value,
                        })
                    })
                    .collect();
                json_doc(&Value::Array(entries))
            }
            // The table is inherently rectangular; text falls back to CSV.
            Format::Text | Format::Csv => {
                let mut out = String::from("n,partition,maxValue,canonicalMaximizer,isGlobalWinner\n");
                for r in &reports {
                    let _ = writeln!(
                        out,
                        "{n},{},{},{},{}",
                        r.class,
                        r.max_value,
                        csv_field(&r.canonical_maximizer.to_string()),
                        r.max_value == *max_value
                    );
                }
                out
            }
        });
    }

    let attaining: BigCount = winners.iter().map(|r| r.maximizer_count.clone()).sum();
    Ok(match cfg.format {
        Format::Text => {
            let mut out = format!(
                "degree {n}: maximal multiplicity {max_value} of {} words, {attaining} attaining permutation(s)\n",
                total_words(n, Mode::Uniform)
            );
            for report in &winners {
                for p in extremal::block_maximizers(&report.class) {
                    let _ = writeln!(out, "{p}");
                }
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("n,class,maxValue,permutation\n");
            for report in &winners {
                for p in extremal::block_maximizers(&report.class) {
                    let _ = writeln!(
                        out,
                        "{n},{},{max_value},{}",
                        report.class,
                        csv_field(&p.to_string())
                    );
                }
            }
            out
        }
        Format::Json => {
            let winner_docs: Vec<Value> = winners
                .iter()
                .map(|report| {
                    let perms: Vec<Value> = extremal::block_maximizers(&report.class)
                        .iter()
                        .map(|p| Value::String(p.to_string()))
                        .collect();
                    json!({
                        "class": report.class.to_string(),
                        "count": report.maximizer_count.to_string(),
                        "permutations": perms,
                    })
                })
                .collect();
            json_doc(&json!({
                "n": n,
                "maxValue": max_value.to_string(),
                "attaining": attaining.to_string(),
                "winners": winner_docs,
            }))
        }
    })
}

/// Prints a fixed-point law: exact rationals for the finite-degree methods,
/// floats for the limiting one.
fn cmd_fixed_points(
    cfg: &Config,
    n: Option<usize>,
    mode: Mode,
    method: FpMethod,
    k_max: usize,
) -> Result<String, Failure> {
    if let FpMethod::Limit = method {
        let law = series::limit_distribution(mode, k_max);
        let entries: Vec<(usize, f64)> = law.pk.iter().copied().enumerate().collect();
        return Ok(match cfg.format {
            Format::Text => entries
                .iter()
                .map(|(k, p)| format!("{k}: {p:.6}\n"))
                .collect(),
            Format::Csv => {
                let mut out = String::from("k,probability\n");
                for (k, p) in &entries {
                    let _ = writeln!(out, "{k},{p:.6}");
                }
                out
            }
            Format::Json => {
                let dist: Vec<Value> = entries
                    .iter()
                    .map(|(k, p)| json!({ "k": k, "p": p }))
                    .collect();
                let (a, b, c) = law.quad;
                json_doc(&json!({
                    "mode": mode.as_str(),
                    "method": "limit",
                    "quad": { "a": a, "b": b, "c": c },
                    "mean": law.mean(),
                    "tailDeficit": law.tail_deficit(),
                    "distribution": dist,
                }))
            }
        });
    }

    let method_name = if let FpMethod::Egf = method { "egf" } else { "oracle" };
    let n = n.ok_or_else(|| {
        Failure::usage(format!("--n is required for --method {method_name}"))
    })?;
    let coeffs: Vec<series::Rat> = match method {
        FpMethod::Egf => {
            if n > series::Z_MAX {
                return Err(Failure::usage(format!(
                    "degree {n} exceeds the series order {}",
                    series::Z_MAX
                )));
            }
            series::fixed_point_poly(n, mode)?.coeffs().to_vec()
        }
        FpMethod::Oracle => {
            let oracle = Oracle::new(oracle_caps(cfg.oracle_cap, 0));
            oracle.fixed_point_dist(n, mode)?
        }
        FpMethod::Limit => unreachable!("handled above"),
    };
    let entries: Vec<(usize, &series::Rat)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Ok(match cfg.format {
        Format::Text => entries
            .iter()
            .map(|(k, p)| format!("{k}: {p}\n"))
            .collect(),
        Format::Csv => {
            let mut out = String::from("k,probability\n");
            for (k, p) in &entries {
                let _ = writeln!(out, "{k},{p}");
            }
            out
        }
        Format::Json => {
            let dist: Vec<Value> = entries
                .iter()
                .map(|(k, p)| json!({ "k": k, "p": p.to_string() }))
                .collect();
            json_doc(&json!({
                "n": n,
                "mode": mode.as_str(),
                "method": method_name,
                "distribution": dist,
            }))
        }
    })
}

/// Dumps the full multiplicity table of one degree, one permutation per
/// row in the permutations' canonical order.
fn cmd_table(cfg: &Config, n: usize, mode: Mode) -> Result<String, Failure> {
    let oracle = Oracle::new(oracle_caps(cfg.oracle_cap, 0));
    let counts = oracle.count_all(n, mode)?;
    Ok(match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for (perm, count) in counts.iter() {
                let _ = writeln!(out, "{perm}\t{count}");
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("permutation,count\n");
            for (perm, count) in counts.iter() {
                let _ = writeln!(out, "{},{count}", csv_field(&perm.to_string()));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = counts
                .iter()
                .map(|(perm, count)| {
                    json!({
                        "permutation": perm.to_string(),
                        "count": count.to_string(),
                    })
                })
                .collect();
            json_doc(&json!({
                "n": n,
                "mode": mode.as_str(),
                "total": total_words(n, mode).to_string(),
                "counts": rows,
            }))
        }
    })
}

/// Runs one verification suite and reports per-check outcomes with timing;
/// any failed check exits with code 3, the report still on stdout.
fn cmd_verify(cfg: &Config, suite: Suite, n_max: Option<usize>) -> Result<String, Failure> {
    let mut verify_cfg = VerifyConfig::default();
    if let Some(n_max) = n_max {
        verify_cfg.n_max = n_max;
    }
    let oracle = Oracle::new(oracle_caps(cfg.oracle_cap, verify_cfg.n_max));
    let engine = Engine::new(engine_caps(cfg.tree_cap, verify_cfg.n_max));
    let outcomes = run_suite(&oracle, &engine, suite, &verify_cfg);
    let failed = outcomes.iter().filter(|o| !o.passed).count();

    let report = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for o in &outcomes {
                let _ = writeln!(out, "{}", outcome_line(o));
            }
            let _ = writeln!(
                out,
                "{} of {} checks passed",
                outcomes.len() - failed,
                outcomes.len()
            );
            out
        }
        Format::Csv => {
            let mut out = String::from("name,passed,millis,detail\n");
            for o in &outcomes {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_field(o.name),
                    o.passed,
                    o.millis,
                    csv_field(&o.detail)
                );
            }
            out
        }
        Format::Json => {
            let checks: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.name,
                        "passed": o.passed,
                        "millis": o.millis as u64,
                        "detail": o.detail,
                    })
                })
                .collect();
            json_doc(&json!({
                "suite": suite.as_str(),
                "nMax": verify_cfg.n_max,
                "passed": failed == 0,
                "checks": checks,
            }))
        }
    };
    if failed > 0 {
        Err(Failure {
            code: 3,
            message: format!("{failed} of {} checks failed", outcomes.len()),
            stdout: Some(report),
        })
    } else {
        Ok(report)
    }
}

/// One aligned text line per check outcome.
fn outcome_line(o: &CheckOutcome) -> String {
    format!(
        "{} [{:>6} ms] {}: {}",
        if o.passed { "pass" } else { "FAIL" },
        o.millis,
        o.name,
        o.detail
    )
}
