//! The acceptance suite: thirteen numbered criteria, each checked against an
//! independent brute-force oracle or a closed-form bound.
//!
//! Every criterion runs at one of three [`Scale`]s. `Full` uses the stated
//! corpus sizes and enforces the stated runtime budgets; `Reduced` and
//! `Fast` shrink trial counts for `selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::cnf::{random_kcnf, Cnf};
use crate::counter::{
    self, bernoulli_interval, default_k, run_repeated, AcountConfig, Mode,
};
use crate::fourier::{
    self, check_conditioning_chain, check_contractive, check_kkl_bound, expected_abs_coeff_fixed_k,
    expected_abs_coeff_mu_p, extraction_estimate, fixed_width_bound, mu_p_bound, norm_ratio_sup,
    norm_ratio_sup_bound, random_flat, random_min_entropy_mixture, random_signed, ExtractionParams,
    HypercubeDistribution, SignedFunction,
};
use crate::hash::{build_hash, xor_to_cnf, RowFamily, XorConstraint};
use crate::seed::{self, StreamRng};
use crate::solver::{exact_count, Dpll};

const SUITE_SEED: u64 = 0x5eed_acc0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Full,
    Reduced,
    Fast,
}

impl Scale {
    fn pick(self, full: usize, reduced: usize, fast: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Reduced => reduced,
            Scale::Fast => fast,
        }
    }
}

/// Deliberate bugs for mutation testing of the suite itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Drop one clause from every XOR encoding of width at least 2.
    pub xor_encoding: bool,
}

pub type XorEncoder = fn(&XorConstraint, usize) -> Cnf;

fn faulty_xor_to_cnf(c: &XorConstraint, n: usize) -> Cnf {
    let full = xor_to_cnf(c, n);
    if c.width() < 2 {
        return full;
    }
    let kept = full.clauses()[1..].to_vec();
    Cnf::from_clauses(n, kept).expect("same variables")
}

pub fn encoder(faults: Faults) -> XorEncoder {
    if faults.xor_encoding {
        faulty_xor_to_cnf
    } else {
        xor_to_cnf
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub budget: Option<Duration>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {:<32} {:>8.1}s  {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn(Scale, Faults, &mut StreamRng) -> (bool, String);

const CRITERIA: [(u8, &str, u64, Check); 13] = [
    (1, "fourier identity", 10, fourier_identity),
    (2, "contractive inequality", 120, contractive_inequality),
    (3, "A(alpha,p) bound", 30, a_bound),
    (4, "mu_p expectation bound", 180, mu_p_expectation),
    (5, "fixed-k and KKL bounds", 120, fixed_k_and_kkl),
    (6, "conditioning chain", 60, conditioning_chain),
    (7, "extraction property", 300, extraction_property),
    (8, "xor encoding equivalence", 10, xor_encoding),
    (9, "counter end-to-end", 600, counter_end_to_end),
    (10, "hybrid exactness and accuracy", 600, hybrid_accuracy),
    (11, "unsatisfiable input", 60, unsatisfiable_input),
    (12, "locality budget", 60, locality_budget),
    (13, "determinism", 60, determinism),
];

pub fn criterion_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; `None` for an unknown id.
pub fn run_criterion(id: u8, scale: Scale, faults: Faults) -> Option<CriterionReport> {
    let &(id, name, budget_secs, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let mut rng = seed::stream(SUITE_SEED, &[id as u64]);
    let start = Instant::now();
    let (ok, mut detail) = check(scale, faults, &mut rng);
    let elapsed = start.elapsed();
    let budget = (scale == Scale::Full).then(|| Duration::from_secs(budget_secs));
    let in_time = budget.is_none_or(|b| elapsed <= b);
    if !in_time {
        detail.push_str(&format!("; over the {budget_secs}s budget"));
    }
    Some(CriterionReport {
        id,
        name,
        passed: ok && in_time,
        detail,
        elapsed,
        budget,
    })
}

pub fn run_all(scale: Scale, faults: Faults) -> Vec<CriterionReport> {
    criterion_ids()
        .into_iter()
        .filter_map(|id| run_criterion(id, scale, faults))
        .collect()
}

/// `x_1..x_j` pinned to random values, the rest free: `2^{n-j}` models.
pub fn pinned_formula<R: Rng + ?Sized>(n: usize, free_vars: usize, rng: &mut R) -> Cnf {
    let pinned: Vec<Vec<i64>> = (1..=(n - free_vars) as i64)
        .map(|v| vec![if rng.random() { v } else { -v }])
        .collect();
    let refs: Vec<&[i64]> = pinned.iter().map(Vec::as_slice).collect();
    Cnf::from_dimacs_clauses(n, &refs).expect("variables in range")
}

fn le_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-9 * rhs.abs()
}

fn fourier_identity(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let trials = scale.pick(500, 200, 50);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(1..=12);
        let f = fourier::random_distribution(n, rng).expect("n <= 12");
        let set = rng.random_range(0..1u32 << n);
        let diff = (fourier::normalized_coefficient(&f, set) - fourier::parity_bias(&f, set)).abs();
        worst = worst.max(diff);
    }
    (worst <= 1e-12, format!("{trials} distributions, max |difference| = {worst:.2e}"))
}

fn contractive_inequality(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let pairs = scale.pick(500, 100, 20);
    let mut violations = 0;
    let mut checks = 0;
    for _ in 0..pairs {
        let n = rng.random_range(1..=10);
        let f = random_signed(n, rng.random(), rng).expect("n <= 10");
        let g = random_signed(n, rng.random(), rng).expect("n <= 10");
        for p in [0.1, 0.25, 0.5] {
            for alpha in [0.05, 1.0 / 9.0] {
                checks += 1;
                if !check_contractive(&f, &g, p, alpha).expect("valid parameters").holds {
                    violations += 1;
                }
            }
        }
    }
    (violations == 0, format!("{checks} checks over {pairs} pairs, {violations} violations"))
}

fn a_bound(scale: Scale, _: Faults, _: &mut StreamRng) -> (bool, String) {
    let side = scale.pick(20, 20, 5);
    let mut above_bound = 0;
    let mut below_one = 0;
    let mut tightest = f64::INFINITY;
    for i in 0..side {
        let alpha = 0.01 + i as f64 * (1.0 / 9.0 - 0.01) / (side - 1) as f64;
        for j in 0..side {
            let p = 0.05 + j as f64 * 0.45 / (side - 1) as f64;
            let sup = norm_ratio_sup(alpha, p).value;
            let bound = norm_ratio_sup_bound(alpha, p);
            tightest = tightest.min(bound - sup);
            above_bound += usize::from(sup > bound + 1e-9);
            below_one += usize::from(sup < 1.0);
        }
    }
    (
        above_bound == 0 && below_one == 0,
        format!(
            "{side}x{side} grid, {above_bound} above bound, {below_one} below 1, min slack {tightest:.3e}"
        ),
    )
}

/// Flat distributions of every size `2^t`, `t = 0..=n`, plus mixtures.
struct EntropyCorpus {
    /// `(distribution, min-entropy)`.
    items: Vec<(HypercubeDistribution, f64)>,
    flats: usize,
}

fn entropy_corpus(scale: Scale, rng: &mut StreamRng) -> EntropyCorpus {
    let dims: &[usize] = match scale {
        Scale::Full => &[8, 10, 12],
        Scale::Reduced => &[8, 10],
        Scale::Fast => &[8],
    };
    let per_size = scale.pick(50, 10, 3);
    let mut items = Vec::new();
    for &n in dims {
        for t in 0..=n {
            for _ in 0..per_size {
                items.push((random_flat(n, t, rng).expect("t <= n"), t as f64));
            }
        }
    }
    let flats = items.len();
    for _ in 0..scale.pick(100, 30, 10) {
        let n = dims[rng.random_range(0..dims.len())];
        let t = rng.random_range(1..n);
        let f = random_min_entropy_mixture(n, t, rng.random_range(2..=5), rng).expect("t < n");
        let h = -f.max_value().log2();
        items.push((f, h));
    }
    EntropyCorpus { items, flats }
}

fn mu_p_expectation(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let corpus = entropy_corpus(scale, rng);
    let mut violations = 0;
    let mut checks = 0;
    for (f, t) in &corpus.items {
        let n = f.n();
        for p in [0.1, 0.25, 0.5] {
            let lhs = expected_abs_coeff_mu_p(f, p).expect("n <= 12");
            let rhs = mu_p_bound(n, t / n as f64, p);
            checks += 1;
            violations += usize::from(!le_with_slack(lhs, rhs));
        }
    }
    (
        violations == 0,
        format!(
            "{checks} checks ({} flat, {} mixtures), {violations} violations",
            corpus.flats,
            corpus.items.len() - corpus.flats
        ),
    )
}

fn indicator(f: &HypercubeDistribution) -> SignedFunction {
    SignedFunction::new(f.n(), f.values().iter().map(|&v| i8::from(v > 0.0)).collect()).expect("0/1 values")
}

fn fixed_k_and_kkl(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let corpus = entropy_corpus(scale, rng);
    let mut fixed_violations = Vec::new();
    let mut fixed_checks = 0;
    let mut kkl_violations = 0;
    let mut kkl_checks = 0;
    let mut parseval_gap = 0.0f64;
    for (f, t) in &corpus.items {
        let n = f.n();
        for k in [2, 3, 4] {
            let lhs = expected_abs_coeff_fixed_k(f, k).expect("n <= 12");
            let rhs = fixed_width_bound(n, *t, k, 0.5);
            fixed_checks += 1;
            if !le_with_slack(lhs, rhs) {
                fixed_violations.push((n, *t, k, lhs, rhs));
            }
        }
        let g = indicator(f);
        for i in 1..=9 {
            kkl_checks += 1;
            kkl_violations += usize::from(!check_kkl_bound(&g, i as f64 / 10.0).expect("n <= 12").holds);
        }
        let at_one = check_kkl_bound(&g, 1.0).expect("n <= 12");
        parseval_gap = parseval_gap.max((at_one.lhs - at_one.rhs).abs());
    }
    let mut detail = format!(
        "fixed-k: {fixed_checks} checks, {} violations; KKL: {kkl_checks} checks, {kkl_violations} violations; \
         Parseval gap {parseval_gap:.1e}",
        fixed_violations.len()
    );
    if let Some((n, t, k, lhs, rhs)) = fixed_violations.first() {
        detail.push_str(&format!("; first fixed-k violation n={n} t={t} k={k}: {lhs:.4} > {rhs:.4}"));
    }
    (
        fixed_violations.is_empty() && kkl_violations == 0 && parseval_gap <= 1e-12,
        detail,
    )
}

fn conditioning_chain(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let wanted = scale.pick(200, 60, 20);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut inconsistent = 0;
    while accepted < wanted && attempts < wanted * 500 {
        attempts += 1;
        let n = rng.random_range(8..=14);
        let t = rng.random_range(n / 2..=n);
        let f = random_flat(n, t, rng).expect("t <= n");
        let m = rng.random_range(1..=4);
        let h = build_hash(n, m, RowFamily::Bernoulli { p: 0.5 }, rng).expect("valid family");
        let eta = rng.random_range(0.2..0.6);
        let report = check_conditioning_chain(&f, &h, eta).expect("n <= 14");
        if report.condition_holds {
            accepted += 1;
            inconsistent += usize::from(!report.consistent());
        }
    }
    (
        accepted == wanted && inconsistent == 0,
        format!("{accepted} instances with the condition holding ({attempts} drawn), {inconsistent} violations"),
    )
}

fn extraction_property(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let n = 20;
    let trials = scale.pick(2000, 400, 100);
    let entropies: &[usize] = match scale {
        Scale::Fast => &[10, 20],
        _ => &[10, 15, 20],
    };
    let k = default_k(n);
    let families = [
        RowFamily::Bernoulli { p: counter::bernoulli_bias(n, k) },
        RowFamily::FixedWidth { k: 5 },
        RowFamily::FixedWidth { k: 8 },
    ];
    let mut applicable = 0;
    let mut configurations = 0;
    let mut failures = Vec::new();
    for &t in entropies {
        let support: Vec<u32> = if t == n {
            (0..1u32 << n).collect()
        } else {
            rand::seq::index::sample(rng, 1 << n, 1 << t).iter().map(|x| x as u32).collect()
        };
        for family in families {
            for m in 1..=6 {
                let params = ExtractionParams {
                    n,
                    family,
                    m,
                    targets: (0..m).map(|_| rng.random()).collect(),
                    eps: 0.5,
                    zeta: 0.5,
                };
                let report = extraction_estimate(&support, &params, trials, rng).expect("valid parameters");
                configurations += 1;
                if let Some(bound) = report.analytic_bound {
                    applicable += 1;
                    if report.frequency < bound - 3.0 * report.std_error {
                        failures.push((t, family, m, report.frequency, bound));
                    }
                }
            }
        }
    }
    let mut detail = format!(
        "{configurations} configurations x {trials} draws, {applicable} with a non-vacuous bound, {} below it",
        failures.len()
    );
    if let Some((t, family, m, freq, bound)) = failures.first() {
        detail.push_str(&format!("; first: t={t} {family:?} m={m} freq {freq:.3} < {bound:.3}"));
    }
    (failures.is_empty(), detail)
}

fn xor_encoding(_: Scale, faults: Faults, _: &mut StreamRng) -> (bool, String) {
    let n = 8;
    let encode = encoder(faults);
    let mut discrepancies = 0;
    let mut constraints = 0;
    for set in 0u32..1 << n {
        if set.count_ones() > 6 {
            continue;
        }
        for target in [false, true] {
            constraints += 1;
            let support = (0..n as u32).filter(|i| set >> i & 1 == 1).map(|i| i + 1);
            let cnf = encode(&XorConstraint::new(support, target), n);
            for x in 0u32..1 << n {
                let assignment: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
                let parity_ok = ((x & set).count_ones() % 2 == 1) == target;
                discrepancies += usize::from(cnf.is_satisfied_by(&assignment) != parity_ok);
            }
        }
    }
    (
        discrepancies == 0,
        format!("{constraints} constraints x 256 points, {discrepancies} discrepancies"),
    )
}

/// Free-variable formulas over `n = 16` with `s = 2^j` models.
fn free_variable_corpus(exponents: &[usize], rng: &mut StreamRng) -> Vec<(Cnf, u64)> {
    exponents.iter().map(|&j| (pinned_formula(16, j, rng), 1u64 << j)).collect()
}

/// Random 3-CNFs over `12..=16` variables with at least `2^8` models.
fn random_counted_corpus(size: usize, rng: &mut StreamRng) -> Vec<(Cnf, u64)> {
    let mut out = Vec::new();
    while out.len() < size {
        let n = rng.random_range(12..=16);
        let m = rng.random_range(n / 2..=2 * n);
        let f = random_kcnf(n, m, 3, rng);
        let s = exact_count(&f).expect("n <= 16");
        if s >= 1 << 8 {
            out.push((f, s));
        }
    }
    out
}

/// Row-width budget for the end-to-end runs; see the README.
pub const END_TO_END_K: usize = 11;

fn counter_end_to_end(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let exponents: Vec<usize> = match scale {
        Scale::Full => (8..=16).collect(),
        Scale::Reduced => vec![8, 12],
        Scale::Fast => vec![8],
    };
    let mut corpus = free_variable_corpus(&exponents, rng);
    corpus.extend(random_counted_corpus(scale.pick(20, 4, 1), rng));
    let runs = scale.pick(100, 30, 12);
    let dpll = Dpll::default();
    let mut worst = f64::INFINITY;
    let mut failing = 0;
    let mut aborted = 0;
    let mut total = 0;
    for (i, (f, s)) in corpus.iter().enumerate() {
        let n = f.num_vars();
        let cfg = AcountConfig::new(Mode::Bernoulli, END_TO_END_K, seed::derive_seed(SUITE_SEED, &[9, i as u64]));
        let summary = run_repeated(f, &cfg, &dpll, runs, Some(bernoulli_interval(*s as f64, n, END_TO_END_K)))
            .expect("valid configuration");
        worst = worst.min(summary.fraction_in_interval);
        failing += usize::from(summary.fraction_in_interval < 0.25);
        aborted += summary.aborted;
        total += runs;
    }
    (
        failing == 0,
        format!(
            "{} formulas x {runs} runs (k = {END_TO_END_K}), worst in-interval fraction {worst:.2}, \
             {failing} below 0.25, abort rate {:.3}",
            corpus.len(),
            aborted as f64 / total as f64
        ),
    )
}

fn hybrid_accuracy(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let delta = 0.25;
    let dpll = Dpll::default();
    let max_n = scale.pick(18, 14, 12);
    let formulas = scale.pick(60, 25, 10);
    let mut below_cap = 0;
    let mut errors = 0;
    for i in 0..formulas {
        let n = rng.random_range(8..=max_n);
        let m = (n as f64 * rng.random_range(3.0..4.6)).round() as usize;
        let f = random_kcnf(n, m, 3, rng);
        let s = exact_count(&f).expect("n <= 18");
        let cap = (delta * n as f64).exp2().floor() as u64;
        if s > cap {
            continue;
        }
        below_cap += 1;
        let cfg = AcountConfig::new(Mode::Hybrid, default_k(n), seed::derive_seed(SUITE_SEED, &[10, i as u64]))
            .with_delta(delta);
        let r = counter::hybrid_count(&f, &cfg, &dpll).expect("valid configuration");
        errors += usize::from(r.estimate != s as u128 || !r.exact_path);
    }

    let exponents: Vec<usize> = match scale {
        Scale::Full => (8..=16).collect(),
        Scale::Reduced => vec![8, 12, 16],
        Scale::Fast => vec![10],
    };
    let runs = scale.pick(51, 21, 11);
    let mut medians_off = 0;
    let mut off = Vec::new();
    for (i, (f, s)) in free_variable_corpus(&exponents, rng).iter().enumerate() {
        let cfg = AcountConfig::new(Mode::Hybrid, default_k(16), seed::derive_seed(SUITE_SEED, &[100, i as u64]))
            .with_delta(delta);
        let summary = run_repeated(f, &cfg, &dpll, runs, None).expect("valid configuration");
        let median = summary.median as f64;
        if median < *s as f64 / 2.0 || median > 2.0 * *s as f64 {
            medians_off += 1;
            off.push(format!("s={s}: median {median}"));
        }
    }
    let mut detail = format!(
        "(a) {below_cap} of {formulas} formulas at or below the cap, {errors} inexact; \
         (b) {} formulas x {runs} runs, {medians_off} medians outside [s/2, 2s]",
        exponents.len()
    );
    if !off.is_empty() {
        detail.push_str(&format!(" ({})", off.join(", ")));
    }
    (below_cap > 0 && errors == 0 && medians_off == 0, detail)
}

fn unsatisfiable_input(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let wanted = scale.pick(50, 20, 8);
    let dpll = Dpll::default();
    let mut instances = 0;
    let mut nonzero = 0;
    while instances < wanted {
        let n = rng.random_range(6..=12);
        let m = (n as f64 * rng.random_range(5.0..8.0)).round() as usize;
        let f = random_kcnf(n, m, 3, rng);
        if exact_count(&f).expect("n <= 12") != 0 {
            continue;
        }
        instances += 1;
        let seed = rng.random();
        for cfg in [
            AcountConfig::new(Mode::Bernoulli, default_k(n), seed),
            AcountConfig::new(Mode::FixedK, 5, seed),
            AcountConfig::new(Mode::Hybrid, default_k(n), seed),
        ] {
            let r = counter::count(&f, &cfg, &dpll).expect("valid configuration");
            nonzero += usize::from(r.estimate != 0 || r.aborted.is_some());
        }
    }
    (
        nonzero == 0,
        format!("{instances} instances x 3 algorithms, {nonzero} nonzero or aborted"),
    )
}

fn locality_budget(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let draws = scale.pick(10_000, 2000, 500);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [64, 128] {
        let k = default_k(n);
        let family = RowFamily::Bernoulli { p: counter::bernoulli_bias(n, k) };
        let local = (0..draws)
            .filter(|_| {
                (0..n).all(|_| family.sample_row(n, rng).expect("valid bias").width() <= k)
            })
            .count();
        let fraction = local as f64 / draws as f64;
        let sigma = (7.0 / 8.0 * 1.0 / 8.0 / draws as f64).sqrt();
        ok &= fraction >= 7.0 / 8.0 - 3.0 * sigma;
        parts.push(format!("n={n} k={k}: {fraction:.4}"));
    }
    (ok, format!("{draws} draws each; {}", parts.join(", ")))
}

fn determinism(scale: Scale, _: Faults, rng: &mut StreamRng) -> (bool, String) {
    let dpll = Dpll::default();
    let mut formulas = vec![Cnf::new(12)];
    while formulas.len() < scale.pick(4, 3, 2) {
        let f = random_kcnf(12, rng.random_range(6..=24), 3, rng);
        if exact_count(&f).expect("n = 12") > 0 {
            formulas.push(f);
        }
    }
    let mut records = 0;
    let mut mismatches = 0;
    for f in &formulas {
        let seed = rng.random();
        for cfg in [
            AcountConfig::new(Mode::Bernoulli, 7, seed),
            AcountConfig::new(Mode::FixedK, 6, seed),
            AcountConfig::new(Mode::Hybrid, 11, seed).with_delta(0.25),
        ] {
            let render = |cfg: &AcountConfig| {
                serde_json::to_string(&counter::count(f, cfg, &dpll).expect("valid configuration"))
                    .expect("serializable")
            };
            let first = render(&cfg);
            let second = render(&cfg);
            let parallel = render(&cfg.with_parallel(true));
            records += 3;
            mismatches += usize::from(first != second) + usize::from(first != parallel);
        }
    }
    (
        mismatches == 0,
        format!("{records} records over {} formulas, {mismatches} mismatches", formulas.len()),
    )
}
