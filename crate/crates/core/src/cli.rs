//! Command-line frontend.
//!
//! Exit codes: 0 ok, 1 selftest failure, 2 usage or parse error, 3 oracle
//! failure, 4 resource cap exceeded.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{self, Faults, Scale};
use crate::cnf::{conjoin, emit_dimacs, parse_dimacs, Cnf};
use crate::counter::{self, AbortReason, AcountConfig, LevelTally, Mode};
use crate::fourier::{self, ExtractionParams, FourierError};
use crate::hash::{build_hash, encode_hash, RowFamily, MAX_ENCODABLE_SUPPORT};
use crate::seed;
use crate::solver::{exact_count_with_budget, Dpll, ExternalSolver, ResourceLimits, SatOracle, Status, DEFAULT_ENUMERATION_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// Environment variable naming the default external solver.
pub const SOLVER_ENV: &str = "ACOUNT_SOLVER";

#[derive(Debug, Parser)]
#[command(name = "acount", version, about = "Approximate model counting with local XOR hashes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the number of models of a DIMACS formula.
    Count(CountArgs),
    /// Count models exactly by enumeration.
    Exact(ExactArgs),
    /// Append the CNF encoding of a random hash to a formula.
    Encode(EncodeArgs),
    /// Run a numeric checker and stream JSON lines.
    Analyze(AnalyzeArgs),
    /// Run the acceptance suite at reduced trial counts.
    Selftest(SelftestArgs),
    /// Decide a DIMACS file with the internal solver, SAT-competition style.
    #[command(hide = true)]
    Solve { input: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Bernoulli,
    #[value(name = "fixed_k", alias = "fixed-k")]
    FixedK,
    Hybrid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Bernoulli => Mode::Bernoulli,
            ModeArg::FixedK => Mode::FixedK,
            ModeArg::Hybrid => Mode::Hybrid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bernoulli,
    #[value(name = "fixed_k", alias = "fixed-k")]
    FixedK,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// `internal`, or the path of a SAT-competition style solver. Defaults
    /// to $ACOUNT_SOLVER, then `internal`.
    #[arg(long)]
    solver: Option<String>,
    /// Per-query time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Debug, Args)]
struct CountArgs {
    /// DIMACS file; stdin when absent or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bernoulli")]
    mode: ModeArg,
    /// Row-width budget; defaults to the smallest k with 4·log(16n) <= k+1,
    /// clipped to n-1 (5 in fixed_k mode).
    #[arg(long)]
    k: Option<usize>,
    /// Exact-counting threshold exponent for hybrid mode.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Master seed; a fresh one is drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "reps", default_value_t = 1)]
    reps_multiplier: usize,
    /// Run the trials of each level in parallel.
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct ExactArgs {
    input: Option<PathBuf>,
    /// Largest variable count to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    input: Option<PathBuf>,
    /// Number of hash rows; 0 echoes the input formula.
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "bernoulli")]
    family: FamilyArg,
    /// Row width (fixed_k) or width budget used for the default bias.
    #[arg(long)]
    k: Option<usize>,
    /// Row bias for the Bernoulli family; defaults to (k+1)/(2n).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Checker {
    Identity,
    Contractive,
    #[value(name = "A-bound")]
    ABound,
    #[value(name = "mu-p")]
    MuP,
    #[value(name = "fixed-k")]
    FixedK,
    Kkl,
    Conditioning,
    Extraction,
    Locality,
}

impl Checker {
    fn name(self) -> &'static str {
        match self {
            Checker::Identity => "identity",
            Checker::Contractive => "contractive",
            Checker::ABound => "A-bound",
            Checker::MuP => "mu-p",
            Checker::FixedK => "fixed-k",
            Checker::Kkl => "kkl",
            Checker::Conditioning => "conditioning",
            Checker::Extraction => "extraction",
            Checker::Locality => "locality",
        }
    }

    /// Largest admissible `n`.
    fn cap(self) -> usize {
        match self {
            Checker::Identity => fourier::MAX_DIM,
            Checker::Contractive | Checker::Kkl => fourier::EXACT_PAIR_DIM,
            Checker::MuP | Checker::FixedK => fourier::EXACT_SUBSET_DIM,
            Checker::Conditioning => 16,
            Checker::Extraction => fourier::MAX_DIM,
            Checker::ABound => usize::MAX,
            Checker::Locality => 1024,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long, value_enum)]
    checker: Checker,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Number of random instances (one record each).
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size `AxP` for A-bound.
    #[arg(long, default_value = "20x20")]
    grid: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    eta: f64,
    /// Hash rows for conditioning and extraction.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Min-entropy of the random flat distributions; random when absent.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    zeta: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Hash draws per extraction or locality record.
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, value_enum, default_value = "bernoulli")]
    family: FamilyArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fault {
    #[value(name = "xor-encoding")]
    XorEncoding,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Smallest corpora only.
    #[arg(long)]
    fast: bool,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

/// A failure that ends the process with a specific exit code.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Exit {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Exit>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Count(a) => cmd_count(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Selftest(a) => cmd_selftest(a),
        Command::Solve { input } => cmd_solve(&input),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("acount: {}", e.message);
            e.code
        }
    }
}

fn read_formula(input: Option<&Path>) -> Result<Cnf, Exit> {
    let text = match input {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)
            .map_err(|e| Exit::new(EXIT_USAGE, format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut buf = String::new();
            io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Exit::new(EXIT_USAGE, format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let parsed = parse_dimacs(&text).map_err(|e| Exit::new(EXIT_USAGE, format!("parse error: {e}")))?;
    for w in &parsed.warnings {
        eprintln!("acount: warning: {w}");
    }
    Ok(parsed.cnf)
}

fn fresh_seed() -> u64 {
    rand::rng().random()
}

fn make_oracle(args: &SolverArgs) -> Result<(Box<dyn SatOracle>, String), Exit> {
    let choice = args
        .solver
        .clone()
        .or_else(|| std::env::var(SOLVER_ENV).ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| "internal".into());
    let timeout = match args.timeout {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(Exit::new(EXIT_USAGE, format!("timeout must be positive, got {t}")))
        }
        t => t.map(Duration::from_secs_f64),
    };
    if choice == "internal" {
        let limits = ResourceLimits {
            timeout,
            ..ResourceLimits::default()
        };
        return Ok((Box::new(Dpll::new(limits)), "internal".into()));
    }
    let solver = ExternalSolver::new(&choice)
        .map_err(|e| Exit::new(EXIT_ORACLE, e.to_string()))?
        .with_timeout(timeout);
    let name = solver.program().display().to_string();
    Ok((Box::new(solver), name))
}

fn print_json(value: &impl Serialize) -> Result<(), Exit> {
    let line = serde_json::to_string(value).expect("records serialize");
    let mut out = io::stdout().lock();
    match writeln!(out, "{line}") {
        Ok(()) => Ok(()),
        // the reader went away, e.g. `| head`
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(EXIT_OK),
        Err(e) => Err(Exit::new(EXIT_USAGE, format!("cannot write output: {e}"))),
    }
}

#[derive(Debug, Serialize)]
struct CountRecord<'a> {
    estimate: u128,
    log2_estimate: Option<f64>,
    stopped_at_l: Option<usize>,
    mode: &'static str,
    k: usize,
    kappa: Option<f64>,
    seed: u64,
    oracle_queries: u64,
    wall_ms: u128,
    aborted: bool,
    abort_reason: Option<&'a AbortReason>,
    exact_path: bool,
    n: usize,
    p: Option<f64>,
    delta: Option<f64>,
    reps_multiplier: usize,
    parallel: bool,
    solver: &'a str,
    guarantee_regime: bool,
    trials_log: &'a [LevelTally],
}

fn cmd_count(a: CountArgs) -> CmdResult {
    let f = read_formula(a.input.as_deref())?;
    let n = f.num_vars();
    let mode = Mode::from(a.mode);
    let k = a.k.unwrap_or(match mode {
        Mode::FixedK => 5.min(n),
        _ => counter::default_k(n),
    });
    let seed = a.seed.unwrap_or_else(fresh_seed);
    let cfg = AcountConfig::new(mode, k, seed)
        .with_delta(a.delta)
        .with_reps(a.reps_multiplier)
        .with_parallel(a.parallel);
    cfg.validate(n).map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?;
    let (oracle, solver_name) = make_oracle(&a.solver)?;

    let start = Instant::now();
    let r = counter::count(&f, &cfg, &oracle).map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?;
    let wall_ms = start.elapsed().as_millis();

    let record = CountRecord {
        estimate: r.estimate,
        log2_estimate: r.log2_estimate(),
        stopped_at_l: r.stopped_at_l,
        mode: mode.as_str(),
        k,
        kappa: (mode != Mode::FixedK).then(|| fourier::kappa_for_width(k, n)),
        seed,
        oracle_queries: r.oracle_queries,
        wall_ms,
        aborted: r.aborted.is_some(),
        abort_reason: r.aborted.as_ref(),
        exact_path: r.exact_path,
        n,
        p: r.p,
        delta: (mode == Mode::Hybrid).then_some(a.delta),
        reps_multiplier: a.reps_multiplier,
        parallel: a.parallel,
        solver: &solver_name,
        guarantee_regime: match mode {
            Mode::FixedK => k >= 5,
            _ => counter::bernoulli_regime_holds(n, k),
        },
        trials_log: &r.trials_log,
    };
    match a.format {
        Format::Json => print_json(&record)?,
        Format::Plain => {
            println!("estimate {}", record.estimate);
            println!("mode {} k {} seed {}", record.mode, record.k, record.seed);
            println!("stopped_at_l {:?} oracle_queries {}", record.stopped_at_l, record.oracle_queries);
            if let Some(reason) = record.abort_reason {
                println!("aborted {reason:?}");
            }
        }
    }
    Ok(match r.aborted {
        Some(AbortReason::OracleUnknown { .. }) => EXIT_ORACLE,
        _ => EXIT_OK,
    })
}

fn cmd_exact(a: ExactArgs) -> CmdResult {
    let f = read_formula(a.input.as_deref())?;
    let s = exact_count_with_budget(&f, a.budget).map_err(|e| Exit::new(EXIT_CAP, e.to_string()))?;
    match a.format {
        Format::Json => print_json(&json!({ "exact": s }))?,
        Format::Plain => println!("{s}"),
    }
    Ok(EXIT_OK)
}

const TAG_ENCODE: u64 = 0xe7c0de;

fn cmd_encode(a: EncodeArgs) -> CmdResult {
    let f = read_formula(a.input.as_deref())?;
    if a.m == 0 {
        print!("{}", emit_dimacs(&f));
        return Ok(EXIT_OK);
    }
    let n = f.num_vars();
    let seed = a.seed.unwrap_or_else(fresh_seed);
    let family = match a.family {
        FamilyArg::Bernoulli => {
            let k = a.k.unwrap_or_else(|| counter::default_k(n));
            RowFamily::Bernoulli {
                p: a.p.unwrap_or_else(|| counter::bernoulli_bias(n, k)),
            }
        }
        FamilyArg::FixedK => RowFamily::FixedWidth { k: a.k.unwrap_or(5.min(n)) },
    };
    let mut rng = seed::stream(seed, &[TAG_ENCODE]);
    let h = build_hash(n, a.m, family, &mut rng).map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?;
    if let Some(wide) = h.rows().iter().find(|r| r.width() > MAX_ENCODABLE_SUPPORT) {
        return Err(Exit::new(
            EXIT_CAP,
            format!("row of width {} exceeds the encodable width {MAX_ENCODABLE_SUPPORT}", wide.width()),
        ));
    }
    let out = conjoin(&f, &encode_hash(&h)).expect("hash shares the formula's variables");
    let mut text = format!("c seed {seed}\n");
    for row in h.rows() {
        text.push_str(&format!("c {}\n", row.to_comment()));
    }
    text.push_str(&emit_dimacs(&out));
    print!("{text}");
    Ok(EXIT_OK)
}

fn parse_grid(grid: &str) -> Result<(usize, usize), Exit> {
    let bad = || Exit::new(EXIT_USAGE, format!("grid `{grid}` is not of the form AxP with A, P >= 2"));
    let (a, p) = grid.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    if a < 2 || p < 2 {
        return Err(bad());
    }
    Ok((a, p))
}

#[derive(Debug, Serialize)]
struct Record {
    checker: &'static str,
    params: serde_json::Value,
    lhs: f64,
    rhs: f64,
    margin: f64,
    holds: bool,
}

fn record(checker: Checker, params: serde_json::Value, lhs: f64, rhs: f64, holds: bool) -> Record {
    Record {
        checker: checker.name(),
        params,
        lhs,
        rhs,
        margin: rhs - lhs,
        holds,
    }
}

fn fourier_exit(e: FourierError) -> Exit {
    match e {
        FourierError::DimensionTooLarge { .. } => Exit::new(EXIT_CAP, e.to_string()),
        other => Exit::new(EXIT_USAGE, other.to_string()),
    }
}

fn random_t<R: Rng>(a: &AnalyzeArgs, low: usize, rng: &mut R) -> Result<usize, Exit> {
    match a.t {
        Some(t) if t > a.n => Err(Exit::new(EXIT_USAGE, format!("t = {t} exceeds n = {}", a.n))),
        Some(t) => Ok(t),
        None => Ok(rng.random_range(low.min(a.n)..=a.n)),
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> CmdResult {
    let checker = a.checker;
    if a.n > checker.cap() {
        return Err(Exit::new(
            EXIT_CAP,
            format!("n = {} exceeds the {} cap of {}", a.n, checker.name(), checker.cap()),
        ));
    }
    if a.n == 0 && checker != Checker::ABound {
        return Err(Exit::new(EXIT_USAGE, "n must be positive"));
    }
    let seed = a.seed.unwrap_or_else(fresh_seed);
    let n = a.n;

    if checker == Checker::ABound {
        let (rows, cols) = parse_grid(&a.grid)?;
        for i in 0..rows {
            let alpha = 0.01 + i as f64 * (1.0 / 9.0 - 0.01) / (rows - 1) as f64;
            for j in 0..cols {
                let p = 0.05 + j as f64 * 0.45 / (cols - 1) as f64;
                let sup = fourier::norm_ratio_sup(alpha, p);
                let bound = fourier::norm_ratio_sup_bound(alpha, p);
                let holds = sup.value <= bound + 1e-9 && sup.value >= 1.0;
                let params = json!({ "seed": seed, "alpha": alpha, "p": p, "argmax": sup.argmax });
                print_json(&record(checker, params, sup.value, bound, holds))?;
            }
        }
        return Ok(EXIT_OK);
    }

    for trial in 0..a.trials {
        let mut rng = seed::stream(seed, &[trial as u64]);
        let rec = match checker {
            Checker::Identity => {
                let f = fourier::random_distribution(n, &mut rng).map_err(fourier_exit)?;
                let set = rng.random_range(0..1u32 << n);
                let direct = fourier::normalized_coefficient(&f, set);
                let bias = fourier::parity_bias(&f, set);
                let params = json!({ "seed": seed, "trial": trial, "n": n, "set": set, "coefficient": direct });
                let diff = (direct - bias).abs();
                record(checker, params, diff, 1e-12, diff <= 1e-12)
            }
            Checker::Contractive => {
                let p = a.p.unwrap_or(0.25);
                let alpha = a.alpha.unwrap_or(1.0 / 9.0);
                let f = fourier::random_signed(n, rng.random(), &mut rng).map_err(fourier_exit)?;
                let g = fourier::random_signed(n, rng.random(), &mut rng).map_err(fourier_exit)?;
                let out = fourier::check_contractive(&f, &g, p, alpha).map_err(fourier_exit)?;
                let params = json!({ "seed": seed, "trial": trial, "n": n, "p": p, "alpha": alpha });
                record(checker, params, out.lhs, out.rhs, out.holds)
            }
            Checker::MuP => {
                let p = a.p.unwrap_or(0.25);
                let t = random_t(&a, 0, &mut rng)?;
                let f = fourier::random_flat(n, t, &mut rng).map_err(fourier_exit)?;
                let lhs = fourier::expected_abs_coeff_mu_p(&f, p).map_err(fourier_exit)?;
                let rhs = fourier::mu_p_bound(n, t as f64 / n as f64, p);
                let params = json!({ "seed": seed, "trial": trial, "n": n, "t": t, "p": p });
                record(checker, params, lhs, rhs, lhs <= rhs * (1.0 + 1e-9))
            }
            Checker::FixedK => {
                let k = a.k.unwrap_or(3);
                let t = random_t(&a, 0, &mut rng)?;
                let f = fourier::random_flat(n, t, &mut rng).map_err(fourier_exit)?;
                let lhs = fourier::expected_abs_coeff_fixed_k(&f, k).map_err(fourier_exit)?;
                let rhs = fourier::fixed_width_bound(n, t as f64, k, a.zeta);
                let params = json!({ "seed": seed, "trial": trial, "n": n, "t": t, "k": k, "zeta": a.zeta });
                record(checker, params, lhs, rhs, lhs <= rhs * (1.0 + 1e-9))
            }
            Checker::Kkl => {
                let delta = a.delta.unwrap_or(0.5);
                let f = fourier::random_signed(n, rng.random(), &mut rng).map_err(fourier_exit)?;
                let out = fourier::check_kkl_bound(&f, delta).map_err(fourier_exit)?;
                let params = json!({ "seed": seed, "trial": trial, "n": n, "delta": delta });
                record(checker, params, out.lhs, out.rhs, out.holds)
            }
            Checker::Conditioning => {
                let t = random_t(&a, n / 2, &mut rng)?;
                let f = fourier::random_flat(n, t, &mut rng).map_err(fourier_exit)?;
                let p = a.p.unwrap_or(0.5);
                let h = build_hash(n, a.m.max(1), RowFamily::Bernoulli { p }, &mut rng)
                    .map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?;
                let r = fourier::check_conditioning_chain(&f, &h, a.eta).map_err(fourier_exit)?;
                let params = json!({
                    "seed": seed, "trial": trial, "n": n, "t": t, "m": h.num_rows(), "p": p, "eta": a.eta,
                    "condition_holds": r.condition_holds, "failed_row": r.failed_row,
                    "prefix_bounds_hold": r.prefix_bounds_hold,
                });
                record(checker, params, r.total_deviation, r.total_deviation_bound, r.consistent())
            }
            Checker::Extraction => {
                let t = random_t(&a, n / 2, &mut rng)?;
                let support: Vec<u32> = if t == n {
                    (0..1u32 << n).collect()
                } else {
                    rand::seq::index::sample(&mut rng, 1 << n, 1 << t).iter().map(|x| x as u32).collect()
                };
                let family = match a.family {
                    FamilyArg::Bernoulli => RowFamily::Bernoulli {
                        p: a.p.unwrap_or_else(|| counter::bernoulli_bias(n, a.k.unwrap_or_else(|| counter::default_k(n)))),
                    },
                    FamilyArg::FixedK => RowFamily::FixedWidth { k: a.k.unwrap_or(5.min(n)) },
                };
                let params = ExtractionParams {
                    n,
                    family,
                    m: a.m,
                    targets: (0..a.m).map(|_| rng.random()).collect(),
                    eps: a.eps,
                    zeta: a.zeta,
                };
                let r = fourier::extraction_estimate(&support, &params, a.draws, &mut rng).map_err(fourier_exit)?;
                let lhs = r.analytic_bound.unwrap_or(0.0) - 3.0 * r.std_error;
                let json_params = json!({
                    "seed": seed, "trial": trial, "n": n, "t": t, "m": a.m, "eps": a.eps, "zeta": a.zeta,
                    "family": family, "draws": a.draws, "failure_parameter": r.failure_parameter,
                    "vacuous": r.analytic_bound.is_none(),
                });
                record(checker, json_params, lhs, r.frequency, lhs <= r.frequency)
            }
            Checker::Locality => {
                let k = a.k.unwrap_or_else(|| counter::default_k(n));
                let p = counter::bernoulli_bias(n, k);
                let family = RowFamily::Bernoulli { p };
                let draws = a.draws.max(1);
                let mut local = 0usize;
                for _ in 0..draws {
                    let mut all = true;
                    for _ in 0..n {
                        let row = family.sample_row(n, &mut rng).map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?;
                        all &= row.width() <= k;
                    }
                    local += usize::from(all);
                }
                let fraction = local as f64 / draws as f64;
                let lhs = 7.0 / 8.0 - 3.0 * (7.0 / 64.0 / draws as f64).sqrt();
                let params = json!({ "seed": seed, "trial": trial, "n": n, "k": k, "p": p, "draws": draws });
                record(checker, params, lhs, fraction, lhs <= fraction)
            }
            Checker::ABound => unreachable!("handled above"),
        };
        print_json(&rec)?;
    }
    Ok(EXIT_OK)
}

fn cmd_selftest(a: SelftestArgs) -> CmdResult {
    let scale = if a.fast { Scale::Fast } else { Scale::Reduced };
    let faults = Faults {
        xor_encoding: a.inject_fault == Some(Fault::XorEncoding),
    };
    let mut failed = 0;
    for id in acceptance::criterion_ids() {
        let report = acceptance::run_criterion(id, scale, faults).expect("listed id");
        failed += usize::from(!report.passed);
        eprintln!("{report}");
    }
    eprintln!("{} criteria, {failed} failed", acceptance::criterion_ids().len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_SELFTEST })
}

fn cmd_solve(input: &Path) -> CmdResult {
    let f = read_formula(Some(input))?;
    let r = Dpll::default().decide(&f);
    let mut out = io::stdout().lock();
    let code = match r.status {
        Status::Sat => {
            let _ = writeln!(out, "s SATISFIABLE");
            let lits: Vec<String> = r
                .witness
                .unwrap_or_default()
                .iter()
                .enumerate()
                .map(|(i, &v)| if v { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                .collect();
            let _ = writeln!(out, "v {} 0", lits.join(" "));
            10
        }
        Status::Unsat => {
            let _ = writeln!(out, "s UNSATISFIABLE");
            20
        }
        Status::Unknown => {
            let _ = writeln!(out, "s UNKNOWN");
            0
        }
    };
    Ok(code)
}
