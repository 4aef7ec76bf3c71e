//! Approximate model counting with local XOR hashes and a SAT oracle.
//!
//! Three algorithms share one configuration: [`acount`] (Bernoulli rows of
//! bias `(k+1)/(2n)`), [`acount_constant`] (rows of exactly `k` variables)
//! and [`hybrid_count`] (hash down until the residual formula has fewer
//! than `⌊2^{δn}⌋` models, then count those exactly).
//!
//! All randomness comes from position-based streams of the master seed, so
//! sequential and parallel runs produce identical [`CountEstimate`]s.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{conjoin, Cnf, CnfError};
use crate::fourier::kappa_for_width;
use crate::hash::{encode_hash, HashError, HashFunction, RowFamily};
use crate::seed;
use crate::solver::{count_up_to, SatOracle, SolverError, Status};

/// Largest supported variable count; estimates are kept in a `u128`.
pub const MAX_VARS: usize = 126;
/// Redraws of an oversized hash before a run gives up.
pub const MAX_REDRAWS: u32 = 3;
/// Largest `⌊δn⌋` for which the hybrid cap is enumerated.
pub const MAX_HYBRID_CAP_LOG2: f64 = 24.0;

const TAG_TRIAL: u64 = 1;
const TAG_HYBRID: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bernoulli,
    FixedK,
    Hybrid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bernoulli => "bernoulli",
            Mode::FixedK => "fixed_k",
            Mode::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcountConfig {
    /// Row-width budget (Bernoulli, hybrid) or exact row width (fixed_k).
    pub k: usize,
    pub mode: Mode,
    /// Exact-counting threshold exponent, hybrid mode only.
    pub delta: f64,
    /// Scales both the trials per level and the stopping threshold.
    pub reps_multiplier: usize,
    pub seed: u64,
    /// Run the trials of one level on the rayon pool.
    pub parallel: bool,
}

impl AcountConfig {
    pub fn new(mode: Mode, k: usize, seed: u64) -> Self {
        AcountConfig {
            k,
            mode,
            delta: 0.25,
            reps_multiplier: 1,
            seed,
            parallel: false,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_reps(mut self, reps_multiplier: usize) -> Self {
        self.reps_multiplier = reps_multiplier;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the configuration against a formula over `n` variables.
    pub fn validate(&self, n: usize) -> Result<(), CountError> {
        let bad = |msg: String| Err(CountError::Config(msg));
        if !(2..=MAX_VARS).contains(&n) {
            return bad(format!("need 2 <= n <= {MAX_VARS}, got n = {n}"));
        }
        if self.reps_multiplier == 0 {
            return bad("reps_multiplier must be positive".into());
        }
        match self.mode {
            Mode::Bernoulli | Mode::Hybrid if !(1..n).contains(&self.k) => {
                bad(format!("k = {} must lie in 1..={} so that (k+1)/(2n) <= 1/2", self.k, n - 1))
            }
            Mode::FixedK if self.k < 5 || self.k > n => {
                bad(format!("fixed_k mode needs 5 <= k <= n, got k = {} with n = {n}", self.k))
            }
            Mode::Hybrid if !(self.delta > 0.0 && self.delta < 1.0) => {
                bad(format!("delta = {} must lie in (0, 1)", self.delta))
            }
            Mode::Hybrid if (self.delta * n as f64).floor() > MAX_HYBRID_CAP_LOG2 => bad(format!(
                "delta * n = {} exceeds the exact-counting cap 2^{MAX_HYBRID_CAP_LOG2}",
                self.delta * n as f64
            )),
            _ => Ok(()),
        }
    }
}

/// `min(⌈4·log(16n)⌉ - 1, n - 1)`: the smallest `k` with
/// `4·log(16n) ≤ k + 1`, clipped so that the row bias stays at most 1/2.
pub fn default_k(n: usize) -> usize {
    let smallest = (4.0 * (16.0 * n as f64).log2()).ceil() as usize - 1;
    smallest.min(n.saturating_sub(1)).max(1)
}

/// Whether `4·log(16n) ≤ k + 1 ≤ n`.
pub fn bernoulli_regime_holds(n: usize, k: usize) -> bool {
    4.0 * (16.0 * n as f64).log2() <= (k + 1) as f64 && k < n
}

/// `⌈log n⌉` trials unit.
pub fn log_ceil(n: usize) -> usize {
    (n as f64).log2().ceil() as usize
}

/// Row bias of [`acount`]: `(k+1)/(2n)`.
pub fn bernoulli_bias(n: usize, k: usize) -> f64 {
    (k + 1) as f64 / (2 * n) as f64
}

/// Row bias of [`hybrid_count`]: `min(2δ, (k+1)/(2n))`.
pub fn hybrid_bias(n: usize, k: usize, delta: f64) -> f64 {
    (2.0 * delta).min(bernoulli_bias(n, k))
}

/// `[¼·2^{-n/κ}·s, 4s]`, the Bernoulli-mode guarantee interval.
pub fn bernoulli_interval(s: f64, n: usize, k: usize) -> (f64, f64) {
    let kappa = kappa_for_width(k, n);
    (0.25 * (-(n as f64) / kappa).exp2() * s, 4.0 * s)
}

/// `[¼·2^{-n + (log n / k)·n^{1-4/k}}·s, 4s]`, the fixed-width guarantee interval.
pub fn fixed_k_interval(s: f64, n: usize, k: usize) -> (f64, f64) {
    let nf = n as f64;
    let kf = k as f64;
    let exponent = -nf + nf.log2() / kf * nf.powf(1.0 - 4.0 / kf);
    (0.25 * exponent.min(0.0).exp2() * s, 4.0 * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelTally {
    pub l: usize,
    pub sat: usize,
    pub unsat: usize,
    /// Hashes redrawn because a row was wider than `k`.
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum AbortReason {
    /// The oracle answered UNKNOWN; `l = 0` is the satisfiability pre-check.
    OracleUnknown { l: usize, trial: usize, diagnostic: String },
    /// Every redraw of one trial's hash still had a row wider than `k`.
    OversizedRows { l: usize, trial: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountEstimate {
    pub estimate: u128,
    pub mode: Mode,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Row bias for Bernoulli and hybrid rows.
    pub p: Option<f64>,
    /// Level at which counting stopped; `None` if it stopped before the
    /// loop or ran out of levels.
    pub stopped_at_l: Option<usize>,
    pub trials_per_level: usize,
    pub threshold: usize,
    pub trials_log: Vec<LevelTally>,
    pub aborted: Option<AbortReason>,
    pub oracle_queries: u64,
    /// Hybrid only: the count came from enumeration without hashing.
    pub exact_path: bool,
}

impl CountEstimate {
    fn empty(f: &Cnf, cfg: &AcountConfig, p: Option<f64>) -> Self {
        let unit = log_ceil(f.num_vars()) * cfg.reps_multiplier;
        CountEstimate {
            estimate: 0,
            mode: cfg.mode,
            n: f.num_vars(),
            k: cfg.k,
            seed: cfg.seed,
            p,
            stopped_at_l: None,
            trials_per_level: if cfg.mode == Mode::Hybrid { 0 } else { 8 * unit },
            threshold: if cfg.mode == Mode::Hybrid { 0 } else { 4 * unit },
            trials_log: Vec::new(),
            aborted: None,
            oracle_queries: 0,
            exact_path: false,
        }
    }

    pub fn log2_estimate(&self) -> Option<f64> {
        (self.estimate > 0).then(|| (self.estimate as f64).log2())
    }
}

#[derive(Debug, Error)]
pub enum CountError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Dispatches on `cfg.mode`.
pub fn count<O: SatOracle + ?Sized>(f: &Cnf, cfg: &AcountConfig, oracle: &O) -> Result<CountEstimate, CountError> {
    match cfg.mode {
        Mode::Bernoulli => acount(f, cfg, oracle),
        Mode::FixedK => acount_constant(f, cfg, oracle),
        Mode::Hybrid => hybrid_count(f, cfg, oracle),
    }
}

/// ACOUNT with Bernoulli rows of bias `(k+1)/(2n)`.
///
/// A trial whose hash has a row wider than `k` is redrawn, at most
/// [`MAX_REDRAWS`] times, before the run aborts.
pub fn acount<O: SatOracle + ?Sized>(f: &Cnf, cfg: &AcountConfig, oracle: &O) -> Result<CountEstimate, CountError> {
    if cfg.mode != Mode::Bernoulli {
        return Err(CountError::Config("acount needs bernoulli mode".into()));
    }
    cfg.validate(f.num_vars())?;
    let p = bernoulli_bias(f.num_vars(), cfg.k);
    level_scan(f, cfg, oracle, RowFamily::Bernoulli { p }, Some(p))
}

/// ACOUNT with rows of exactly `k` variables; no row is ever oversized.
pub fn acount_constant<O: SatOracle + ?Sized>(
    f: &Cnf,
    cfg: &AcountConfig,
    oracle: &O,
) -> Result<CountEstimate, CountError> {
    if cfg.mode != Mode::FixedK {
        return Err(CountError::Config("acount_constant needs fixed_k mode".into()));
    }
    cfg.validate(f.num_vars())?;
    level_scan(f, cfg, oracle, RowFamily::FixedWidth { k: cfg.k }, None)
}

enum Trial {
    Sat,
    Unsat,
    Unknown(String),
    Oversized,
}

struct TrialOutcome {
    result: Trial,
    redraws: usize,
    queries: u64,
}

fn run_trial<O: SatOracle + ?Sized>(
    f: &Cnf,
    cfg: &AcountConfig,
    oracle: &O,
    family: RowFamily,
    l: usize,
    trial: usize,
) -> Result<TrialOutcome, CountError> {
    let n = f.num_vars();
    let mut redraws = 0;
    for attempt in 0..=MAX_REDRAWS {
        let mut rng = seed::stream(cfg.seed, &[TAG_TRIAL, l as u64, trial as u64, attempt as u64]);
        let h = crate::hash::build_hash(n, l, family, &mut rng)?;
        if h.rows().iter().any(|r| r.width() > cfg.k) {
            redraws += 1;
            continue;
        }
        let query = conjoin(f, &encode_hash(&h))?;
        let answer = oracle.decide(&query);
        let result = match answer.status {
            Status::Sat => Trial::Sat,
            Status::Unsat => Trial::Unsat,
            Status::Unknown => Trial::Unknown(answer.diagnostic.unwrap_or_default()),
        };
        return Ok(TrialOutcome {
            result,
            redraws,
            queries: 1,
        });
    }
    Ok(TrialOutcome {
        result: Trial::Oversized,
        redraws,
        queries: 0,
    })
}

/// Satisfiability pre-check shared by all modes. Returns `true` when the
/// run is finished.
fn pre_check<O: SatOracle + ?Sized>(f: &Cnf, oracle: &O, out: &mut CountEstimate) -> bool {
    out.oracle_queries += 1;
    let answer = oracle.decide(f);
    match answer.status {
        Status::Sat => false,
        Status::Unsat => true,
        Status::Unknown => {
            out.aborted = Some(AbortReason::OracleUnknown {
                l: 0,
                trial: 0,
                diagnostic: answer.diagnostic.unwrap_or_default(),
            });
            true
        }
    }
}

fn level_scan<O: SatOracle + ?Sized>(
    f: &Cnf,
    cfg: &AcountConfig,
    oracle: &O,
    family: RowFamily,
    p: Option<f64>,
) -> Result<CountEstimate, CountError> {
    let n = f.num_vars();
    let mut out = CountEstimate::empty(f, cfg, p);
    if pre_check(f, oracle, &mut out) {
        return Ok(out);
    }
    let trials = out.trials_per_level;
    for l in 1..=n + 1 {
        let outcomes: Vec<TrialOutcome> = if cfg.parallel {
            (0..trials)
                .into_par_iter()
                .map(|t| run_trial(f, cfg, oracle, family, l, t))
                .collect::<Result<_, _>>()?
        } else {
            (0..trials)
                .map(|t| run_trial(f, cfg, oracle, family, l, t))
                .collect::<Result<_, _>>()?
        };
        let mut tally = LevelTally {
            l,
            sat: 0,
            unsat: 0,
            redraws: 0,
        };
        for (t, o) in outcomes.into_iter().enumerate() {
            tally.redraws += o.redraws;
            out.oracle_queries += o.queries;
            match o.result {
                Trial::Sat => tally.sat += 1,
                Trial::Unsat => tally.unsat += 1,
                Trial::Unknown(diagnostic) => {
                    out.aborted.get_or_insert(AbortReason::OracleUnknown { l, trial: t, diagnostic });
                }
                Trial::Oversized => {
                    out.aborted.get_or_insert(AbortReason::OversizedRows { l, trial: t });
                }
            }
        }
        out.trials_log.push(tally);
        if out.aborted.is_some() {
            return Ok(out);
        }
        if tally.unsat > out.threshold {
            out.estimate = 1u128 << (l - 1);
            out.stopped_at_l = Some(l);
            return Ok(out);
        }
    }
    Ok(out)
}

/// Exact for at most `⌊2^{δn}⌋` models; otherwise adds Bernoulli rows of bias
/// [`hybrid_bias`] one at a time, for `l = 1..=⌈(1-δ)n⌉`, until the hashed
/// formula has fewer than `⌊2^{δn}⌋` models, and returns that count times
/// `2^l`. If no level gets below the cap, the last level's models are
/// counted exactly.
pub fn hybrid_count<O: SatOracle + ?Sized>(f: &Cnf, cfg: &AcountConfig, oracle: &O) -> Result<CountEstimate, CountError> {
    if cfg.mode != Mode::Hybrid {
        return Err(CountError::Config("hybrid_count needs hybrid mode".into()));
    }
    let n = f.num_vars();
    cfg.validate(n)?;
    let p = hybrid_bias(n, cfg.k, cfg.delta);
    let family = RowFamily::Bernoulli { p };
    let cap = (cfg.delta * n as f64).exp2().floor() as u64;
    let mut out = CountEstimate::empty(f, cfg, Some(p));

    let counted = |g: &Cnf, cap: u64, l: usize, out: &mut CountEstimate| -> Option<u64> {
        let probe = Counting(oracle, std::sync::atomic::AtomicU64::new(0));
        let result = count_up_to(g, cap, &probe);
        out.oracle_queries += probe.1.into_inner();
        match result {
            Ok(c) => Some(c),
            Err(e) => {
                let diagnostic = match e {
                    SolverError::OracleUnknown(d) => d,
                    other => other.to_string(),
                };
                out.aborted = Some(AbortReason::OracleUnknown { l, trial: 0, diagnostic });
                None
            }
        }
    };

    let Some(c) = counted(f, cap + 1, 0, &mut out) else {
        return Ok(out);
    };
    if c <= cap {
        out.estimate = c as u128;
        out.exact_path = true;
        return Ok(out);
    }

    let levels = ((1.0 - cfg.delta) * n as f64).ceil() as usize;
    let mut h: Option<HashFunction> = None;
    let mut g = f.clone();
    for l in 1..=levels {
        let row = match draw_local_row(n, cfg, family, l)? {
            Some(row) => row,
            None => {
                out.aborted = Some(AbortReason::OversizedRows { l, trial: 0 });
                return Ok(out);
            }
        };
        match &mut h {
            Some(h) => h.push_row(row.clone())?,
            None => h = Some(HashFunction::new(n, vec![row.clone()])?),
        }
        g = conjoin(&g, &crate::hash::xor_to_cnf(&row, n))?;
        out.trials_log.push(LevelTally {
            l,
            sat: 1,
            unsat: 0,
            redraws: 0,
        });
        let Some(c) = counted(&g, cap, l, &mut out) else {
            return Ok(out);
        };
        if c < cap {
            out.estimate = (c as u128) << l;
            out.stopped_at_l = Some(l);
            return Ok(out);
        }
    }
    let Some(c) = counted(&g, u64::MAX, levels, &mut out) else {
        return Ok(out);
    };
    out.estimate = (c as u128) << levels;
    Ok(out)
}

/// One hybrid row with uniform target, redrawn while wider than `k`.
fn draw_local_row(
    n: usize,
    cfg: &AcountConfig,
    family: RowFamily,
    l: usize,
) -> Result<Option<crate::hash::XorConstraint>, CountError> {
    for attempt in 0..=MAX_REDRAWS {
        let mut rng = seed::stream(cfg.seed, &[TAG_HYBRID, l as u64, attempt as u64]);
        let h = crate::hash::build_hash(n, 1, family, &mut rng)?;
        let row = h.rows()[0].clone();
        if row.width() <= cfg.k {
            return Ok(Some(row));
        }
    }
    Ok(None)
}

/// Forwards to an oracle while counting queries.
struct Counting<'a, O: ?Sized>(&'a O, std::sync::atomic::AtomicU64);

impl<O: SatOracle + ?Sized> SatOracle for Counting<'_, O> {
    fn decide(&self, f: &Cnf) -> crate::solver::SolveResult {
        self.1.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        self.0.decide(f)
    }
    fn capabilities(&self) -> crate::solver::Capabilities {
        self.0.capabilities()
    }
    fn name(&self) -> String {
        self.0.name()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatSummary {
    pub runs: Vec<CountEstimate>,
    /// Lower median of the estimates.
    pub median: u128,
    pub in_interval: usize,
    pub fraction_in_interval: f64,
    pub aborted: usize,
}

/// Seed of run `i` of a repeated experiment; run 0 keeps the master seed.
pub fn repeat_seed(master: u64, i: usize) -> u64 {
    if i == 0 {
        master
    } else {
        seed::derive_seed(master, &[i as u64])
    }
}

/// `repeats` independent runs of the configured algorithm. The fraction of
/// estimates inside `interval` (inclusive) is reported when given.
pub fn run_repeated<O: SatOracle + ?Sized>(
    f: &Cnf,
    cfg: &AcountConfig,
    oracle: &O,
    repeats: usize,
    interval: Option<(f64, f64)>,
) -> Result<RepeatSummary, CountError> {
    if repeats == 0 {
        return Err(CountError::Config("repeats must be at least 1".into()));
    }
    let runs: Vec<CountEstimate> = (0..repeats)
        .map(|i| count(f, &cfg.with_seed(repeat_seed(cfg.seed, i)), oracle))
        .collect::<Result<_, _>>()?;
    let mut sorted: Vec<u128> = runs.iter().map(|r| r.estimate).collect();
    sorted.sort_unstable();
    let median = sorted[(repeats - 1) / 2];
    let in_interval = interval.map_or(0, |(lo, hi)| {
        runs.iter()
            .filter(|r| (lo..=hi).contains(&(r.estimate as f64)))
            .count()
    });
    Ok(RepeatSummary {
        median,
        in_interval,
        fraction_in_interval: in_interval as f64 / repeats as f64,
        aborted: runs.iter().filter(|r| r.aborted.is_some()).count(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{exact_count, Dpll, SolveResult};
    use std::sync::Mutex;

    fn free(n: usize) -> Cnf {
        Cnf::new(n)
    }

    /// `x_1..x_j` fixed to true, the rest free: `2^{n-j}` models.
    fn pinned(n: usize, j: usize) -> Cnf {
        let clauses: Vec<Vec<i64>> = (1..=j as i64).map(|v| vec![v]).collect();
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        Cnf::from_dimacs_clauses(n, &refs).unwrap()
    }

    fn contradiction(n: usize) -> Cnf {
        Cnf::from_dimacs_clauses(n, &[&[1], &[-1]]).unwrap()
    }

    struct Recording<'a> {
        inner: &'a Dpll,
        widths: Mutex<Vec<usize>>,
    }

    impl SatOracle for Recording<'_> {
        fn decide(&self, f: &Cnf) -> SolveResult {
            self.widths.lock().unwrap().push(f.num_vars());
            self.inner.decide(f)
        }
        fn capabilities(&self) -> crate::solver::Capabilities {
            self.inner.capabilities()
        }
        fn name(&self) -> String {
            "recording".into()
        }
    }

    struct Refuses;

    impl SatOracle for Refuses {
        fn decide(&self, _: &Cnf) -> SolveResult {
            SolveResult::unknown(Default::default(), "budget")
        }
        fn capabilities(&self) -> crate::solver::Capabilities {
            crate::solver::Capabilities {
                witnesses: false,
                deterministic: true,
            }
        }
        fn name(&self) -> String {
            "refuses".into()
        }
    }

    #[test]
    fn defaults_and_regime() {
        assert_eq!(default_k(16), 15);
        assert!(!bernoulli_regime_holds(16, 15));
        // 4·log(16·4096) = 64
        assert_eq!(default_k(4096), 63);
        assert!(bernoulli_regime_holds(4096, 63));
        assert!(!bernoulli_regime_holds(4096, 62));
        assert_eq!(log_ceil(16), 4);
        assert_eq!(log_ceil(17), 5);
    }

    #[test]
    fn config_validation() {
        let f = free(16);
        assert!(AcountConfig::new(Mode::Bernoulli, 16, 0).validate(16).is_err());
        assert!(AcountConfig::new(Mode::Bernoulli, 0, 0).validate(16).is_err());
        assert!(AcountConfig::new(Mode::FixedK, 4, 0).validate(16).is_err());
        assert!(AcountConfig::new(Mode::FixedK, 16, 0).validate(16).is_ok());
        assert!(AcountConfig::new(Mode::Hybrid, 7, 0).with_delta(1.0).validate(16).is_err());
        assert!(AcountConfig::new(Mode::Bernoulli, 7, 0).with_reps(0).validate(16).is_err());
        assert!(acount(&free(1), &AcountConfig::new(Mode::Bernoulli, 1, 0), &Dpll::default()).is_err());
        assert!(acount(&f, &AcountConfig::new(Mode::FixedK, 7, 0), &Dpll::default()).is_err());
    }

    #[test]
    fn unsatisfiable_inputs_give_zero() {
        let f = contradiction(8);
        let dpll = Dpll::default();
        for cfg in [
            AcountConfig::new(Mode::Bernoulli, 5, 1),
            AcountConfig::new(Mode::FixedK, 5, 1),
            AcountConfig::new(Mode::Hybrid, 5, 1),
        ] {
            let r = count(&f, &cfg, &dpll).unwrap();
            assert_eq!(r.estimate, 0);
            assert!(r.aborted.is_none());
        }
    }

    #[test]
    fn pure_estimates_are_powers_of_two_with_stopping_evidence() {
        let dpll = Dpll::default();
        for s in 0..20 {
            let f = pinned(10, s % 10);
            let cfg = AcountConfig::new(Mode::Bernoulli, 7, s as u64);
            let r = acount(&f, &cfg, &dpll).unwrap();
            assert!(r.aborted.is_none(), "{r:?}");
            let l = r.stopped_at_l.expect("free variables always get cut");
            assert_eq!(r.estimate, 1 << (l - 1));
            let last = r.trials_log.last().unwrap();
            assert_eq!(last.l, l);
            assert!(last.unsat > r.threshold);
            assert_eq!(last.sat + last.unsat, r.trials_per_level);
            for earlier in &r.trials_log[..r.trials_log.len() - 1] {
                assert!(earlier.unsat <= r.threshold);
            }
        }
    }

    #[test]
    fn trials_scale_with_multiplier() {
        let r = acount(&free(16), &AcountConfig::new(Mode::Bernoulli, 7, 3).with_reps(2), &Dpll::default()).unwrap();
        assert_eq!(r.trials_per_level, 64);
        assert_eq!(r.threshold, 32);
    }

    #[test]
    fn every_query_keeps_the_variable_count() {
        let dpll = Dpll::default();
        let oracle = Recording {
            inner: &dpll,
            widths: Mutex::new(Vec::new()),
        };
        let f = pinned(12, 3);
        for cfg in [
            AcountConfig::new(Mode::Bernoulli, 9, 4),
            AcountConfig::new(Mode::FixedK, 6, 4),
            AcountConfig::new(Mode::Hybrid, 9, 4).with_delta(0.25),
        ] {
            count(&f, &cfg, &oracle).unwrap();
        }
        let widths = oracle.widths.into_inner().unwrap();
        assert!(!widths.is_empty());
        assert!(widths.iter().all(|&w| w == 12));
    }

    #[test]
    fn oracle_failure_aborts() {
        let r = acount(&free(8), &AcountConfig::new(Mode::Bernoulli, 5, 0), &Refuses).unwrap();
        assert!(matches!(r.aborted, Some(AbortReason::OracleUnknown { l: 0, .. })));
        assert_eq!(r.estimate, 0);
        let r = hybrid_count(&free(8), &AcountConfig::new(Mode::Hybrid, 5, 0), &Refuses).unwrap();
        assert!(r.aborted.is_some());
    }

    #[test]
    fn tiny_k_forces_redraws_and_abort() {
        // p = 2/(2·40) = 1/40 for k = 1; rows wider than one variable are rare
        // but happen, and a row of width 0 is fine
        let f = free(40);
        let mut saw_redraw = false;
        for seed in 0..10 {
            let r = acount(&f, &AcountConfig::new(Mode::Bernoulli, 1, seed), &Dpll::default()).unwrap();
            saw_redraw |= r.trials_log.iter().any(|t| t.redraws > 0);
            if let Some(AbortReason::OversizedRows { .. }) = r.aborted {
                assert_eq!(r.estimate, 0);
            }
        }
        assert!(saw_redraw);
    }

    #[test]
    fn hybrid_is_exact_below_cap() {
        let dpll = Dpll::default();
        for j in 11..=16 {
            // 2^{16-j} <= 16 = cap only for j >= 12
            let f = pinned(16, j);
            let s = exact_count(&f).unwrap() as u128;
            let r = hybrid_count(&f, &AcountConfig::new(Mode::Hybrid, 15, 0).with_delta(0.25), &dpll).unwrap();
            if s <= 16 {
                assert!(r.exact_path);
                assert_eq!(r.estimate, s);
            } else {
                assert!(!r.exact_path);
            }
        }
    }

    #[test]
    fn hybrid_above_cap_scales_by_levels() {
        let f = free(16);
        let levels = 12;
        for seed in 0..10 {
            let cfg = AcountConfig::new(Mode::Hybrid, 15, seed).with_delta(0.25);
            let r = hybrid_count(&f, &cfg, &Dpll::default()).unwrap();
            assert!(!r.exact_path);
            match r.stopped_at_l {
                Some(l) => {
                    assert_eq!(r.estimate % (1u128 << l), 0);
                    assert!(r.estimate >> l < 16);
                }
                // the rows never got below the cap: exact count of the last level
                None => {
                    assert_eq!(r.trials_log.len(), levels);
                    assert!(r.estimate >> levels >= 16);
                }
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let dpll = Dpll::default();
        let f = pinned(14, 4);
        for mode in [Mode::Bernoulli, Mode::FixedK] {
            let cfg = AcountConfig::new(mode, 7, 21);
            let a = count(&f, &cfg, &dpll).unwrap();
            let b = count(&f, &cfg.with_parallel(true), &dpll).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn repeated_runs() {
        let dpll = Dpll::default();
        let f = free(10);
        let cfg = AcountConfig::new(Mode::Bernoulli, 7, 5);
        let one = run_repeated(&f, &cfg, &dpll, 1, None).unwrap();
        assert_eq!(one.runs[0], acount(&f, &cfg, &dpll).unwrap());
        assert_eq!(one.median, one.runs[0].estimate);
        let many = run_repeated(&f, &cfg, &dpll, 9, Some((0.0, f64::MAX))).unwrap();
        assert_eq!(many.in_interval, 9);
        assert_eq!(many, run_repeated(&f, &cfg, &dpll, 9, Some((0.0, f64::MAX))).unwrap());
        assert!(run_repeated(&f, &cfg, &dpll, 0, None).is_err());
    }

    #[test]
    fn intervals() {
        let (lo, hi) = bernoulli_interval(1024.0, 16, 15);
        assert_eq!(hi, 4096.0);
        assert!(lo > 0.0 && lo < 256.0);
        let (lo, hi) = fixed_k_interval(65536.0, 16, 5);
        assert_eq!(hi, 4.0 * 65536.0);
        assert!(lo < 65536.0 / 4.0);
    }
}
