//! Numeric checks of the inequalities behind local hashing: expectation
//! bounds over random index sets, the hypercontractive-type product bound,
//! the KKL-type bound, the conditioning chain, and the extraction property.

use rand::Rng;
use serde::Serialize;

use super::bounds::{main_lemma_p, main_lemma_q, norm_ratio_sup};
use super::{
    check_dim, fourier_coefficient, fourier_transform, parity, FourierError, HypercubeDistribution,
    SignedFunction, EXACT_PAIR_DIM, EXACT_SUBSET_DIM,
};
use crate::hash::{build_hash, HashFunction, RowFamily};

const RELATIVE_SLACK: f64 = 1e-9;

/// Both sides of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub holds: bool,
}

impl CheckOutcome {
    pub fn new(lhs: f64, rhs: f64, relative_slack: f64) -> Self {
        CheckOutcome {
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: lhs <= rhs + relative_slack * rhs.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn mc_summary(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        samples: n,
    }
}

fn check_bias(p: f64) -> Result<(), FourierError> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(FourierError::InvalidParameter(format!("bias p = {p} must lie in (0, 1/2]")))
    }
}

/// `μ_p` weight of each subset size: `p^s (1-p)^{n-s}`.
fn mu_p_weights(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|s| p.powi(s as i32) * (1.0 - p).powi((n - s) as i32)).collect()
}

/// `E_{S~μ_p} |f̃(S)|`, summed exactly over all `2^n` index sets.
pub fn expected_abs_coeff_mu_p(f: &HypercubeDistribution, p: f64) -> Result<f64, FourierError> {
    check_dim(f.n(), EXACT_SUBSET_DIM)?;
    check_bias(p)?;
    let weights = mu_p_weights(f.n(), p);
    let half_cube = f.values().len() as f64 / 2.0;
    let coeffs = fourier_transform(f.values());
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| weights[(s as u32).count_ones() as usize] * (half_cube * c).abs())
        .sum())
}

/// Monte Carlo estimate of `E_{S~μ_p} |f̃(S)|` for dimensions past the exact cap.
pub fn expected_abs_coeff_mu_p_mc<R: Rng + ?Sized>(
    f: &HypercubeDistribution,
    p: f64,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate, FourierError> {
    check_bias(p)?;
    let n = f.n();
    let half_cube = f.values().len() as f64 / 2.0;
    let draws: Vec<f64> = (0..samples.max(1))
        .map(|_| {
            let set = (0..n).filter(|_| rng.random::<f64>() < p).fold(0u32, |acc, i| acc | 1 << i);
            (half_cube * fourier_coefficient(f.values(), set)).abs()
        })
        .collect();
    Ok(mc_summary(&draws))
}

fn check_width(n: usize, k: usize) -> Result<(), FourierError> {
    if (1..=n).contains(&k) {
        Ok(())
    } else {
        Err(FourierError::InvalidParameter(format!("k = {k} must lie in 1..={n}")))
    }
}

/// Average of `|f̃(S)|` over all `k`-subsets `S ⊆ [n]`.
pub fn expected_abs_coeff_fixed_k(f: &HypercubeDistribution, k: usize) -> Result<f64, FourierError> {
    check_dim(f.n(), EXACT_SUBSET_DIM)?;
    check_width(f.n(), k)?;
    let half_cube = f.values().len() as f64 / 2.0;
    let coeffs = fourier_transform(f.values());
    let (sum, count) = coeffs
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as u32).count_ones() as usize == k)
        .fold((0.0, 0usize), |(sum, count), (_, c)| (sum + (half_cube * c).abs(), count + 1));
    Ok(sum / count as f64)
}

pub fn expected_abs_coeff_fixed_k_mc<R: Rng + ?Sized>(
    f: &HypercubeDistribution,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate, FourierError> {
    check_width(f.n(), k)?;
    let half_cube = f.values().len() as f64 / 2.0;
    let draws: Vec<f64> = (0..samples.max(1))
        .map(|_| {
            let set = rand::seq::index::sample(rng, f.n(), k).iter().fold(0u32, |acc, i| acc | 1 << i);
            (half_cube * fourier_coefficient(f.values(), set)).abs()
        })
        .collect();
    Ok(mc_summary(&draws))
}

/// `E_{S~μ_p}(f̂(S) ĝ(S)) ≤ 4^{-n} Ã^n (|Supp f| |Supp g|)^{1-αp}` with
/// `Ã = max(A(α,p), (1-p) 4^{αp})`.
pub fn check_contractive(
    f: &SignedFunction,
    g: &SignedFunction,
    p: f64,
    alpha: f64,
) -> Result<CheckOutcome, FourierError> {
    let n = f.n();
    if g.n() != n {
        return Err(FourierError::InvalidParameter("f and g live on different cubes".into()));
    }
    check_dim(n, EXACT_PAIR_DIM)?;
    check_bias(p)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(FourierError::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    let weights = mu_p_weights(n, p);
    let fh = fourier_transform(&f.as_reals());
    let gh = fourier_transform(&g.as_reals());
    let lhs: f64 = fh
        .iter()
        .zip(&gh)
        .enumerate()
        .map(|(s, (a, b))| weights[(s as u32).count_ones() as usize] * a * b)
        .sum();
    let ap = alpha * p;
    let a_tilde = norm_ratio_sup(alpha, p).value.max((1.0 - p) * 4f64.powf(ap));
    let supports = (f.support_size() * g.support_size()) as f64;
    let rhs = 4f64.powi(-(n as i32)) * a_tilde.powi(n as i32) * supports.powf(1.0 - ap);
    Ok(CheckOutcome::new(lhs, rhs, RELATIVE_SLACK))
}

/// `Σ_S δ^{|S|} f̂(S)² ≤ Pr_x(f(x) ≠ 0)^{2/(1+δ)}`.
pub fn check_kkl_bound(f: &SignedFunction, delta: f64) -> Result<CheckOutcome, FourierError> {
    check_dim(f.n(), EXACT_PAIR_DIM)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(FourierError::InvalidParameter(format!("delta = {delta} must lie in [0, 1]")));
    }
    let coeffs = fourier_transform(&f.as_reals());
    let lhs: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| delta.powi((s as u32).count_ones() as i32) * c * c)
        .sum();
    let density = f.support_size() as f64 / f.values().len() as f64;
    let rhs = density.powf(2.0 / (1.0 + delta));
    Ok(CheckOutcome::new(lhs, rhs, RELATIVE_SLACK))
}

/// Conditioning a distribution on one hash row at a time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningReport {
    pub eta: f64,
    /// `p_i = Pr_{x~f_{i-1}}(h_i(x) = y_i)`; stops after the first zero.
    pub step_probabilities: Vec<f64>,
    /// `q_j = Pr_{x~f}(h_1(x) = y_1, ..., h_j(x) = y_j)`.
    pub prefix_probabilities: Vec<f64>,
    /// Whether `|p_i - 1/2| ≤ η/2` for every row.
    pub condition_holds: bool,
    /// 1-based row at which the condition first fails.
    pub failed_row: Option<usize>,
    /// `(1-η)^j 2^{-j} ≤ q_j ≤ (1+η)^j 2^{-j}` for all j; only evaluated
    /// when the condition holds.
    pub prefix_bounds_hold: Option<bool>,
    /// `|q_m - 2^{-m}|`.
    pub total_deviation: f64,
    /// `2^{-m}((1+η)^m - 1)`.
    pub total_deviation_bound: f64,
    /// `total_deviation ≤ total_deviation_bound`; only evaluated when the
    /// condition holds.
    pub total_bound_holds: Option<bool>,
}

impl ConditioningReport {
    /// No violation of either conclusion where the condition holds.
    pub fn consistent(&self) -> bool {
        !self.condition_holds || (self.prefix_bounds_hold == Some(true) && self.total_bound_holds == Some(true))
    }
}

/// Walks the chain `f_0 = f`, `f_i = f_{i-1} | {h_i(x) = y_i}` with `y`
/// the hash's target bits, checks the per-row balance condition for `eta`
/// and, where it holds, both conclusions about the prefix probabilities.
/// Probabilities are sums of support weights, never samples.
pub fn check_conditioning_chain(
    f: &HypercubeDistribution,
    h: &HashFunction,
    eta: f64,
) -> Result<ConditioningReport, FourierError> {
    check_dim(f.n(), 16)?;
    if h.n() != f.n() {
        return Err(FourierError::InvalidParameter("hash and distribution dimensions differ".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(FourierError::InvalidParameter(format!("eta = {eta} must lie in (0, 1)")));
    }
    let masks: Vec<u32> = h
        .row_masks()
        .expect("n <= 16")
        .into_iter()
        .map(|m| m as u32)
        .collect();
    let targets = h.targets();
    let m = masks.len();

    let mut alive: Vec<(u32, f64)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(x, &v)| (x as u32, v))
        .collect();
    let total: f64 = alive.iter().map(|(_, v)| v).sum();
    let mut prev_mass = total;
    let mut step_probabilities = Vec::with_capacity(m);
    let mut prefix_probabilities = Vec::with_capacity(m);
    let mut failed_row = None;
    for (i, (&mask, &y)) in masks.iter().zip(&targets).enumerate() {
        alive.retain(|&(x, _)| parity(x & mask) == y);
        let mass: f64 = alive.iter().map(|(_, v)| v).sum();
        let p_i = if prev_mass > 0.0 { mass / prev_mass } else { 0.0 };
        step_probabilities.push(p_i);
        prefix_probabilities.push(mass / total);
        if failed_row.is_none() && (p_i - 0.5).abs() > eta / 2.0 * (1.0 + 1e-12) {
            failed_row = Some(i + 1);
        }
        prev_mass = mass;
    }
    let q_m = prefix_probabilities.last().copied().unwrap_or(1.0);
    let scale = 0.5f64.powi(m as i32);
    let total_deviation = (q_m - scale).abs();
    let total_deviation_bound = scale * ((1.0 + eta).powi(m as i32) - 1.0);
    let condition_holds = failed_row.is_none();
    let (prefix_bounds_hold, total_bound_holds) = if condition_holds {
        let prefix_ok = prefix_probabilities.iter().enumerate().all(|(j, &q)| {
            let j = j as i32 + 1;
            let lo = (1.0 - eta).powi(j) * 0.5f64.powi(j);
            let hi = (1.0 + eta).powi(j) * 0.5f64.powi(j);
            q >= lo * (1.0 - 1e-12) && q <= hi * (1.0 + 1e-12)
        });
        let total_ok = total_deviation <= total_deviation_bound * (1.0 + 1e-12) + 1e-300;
        (Some(prefix_ok), Some(total_ok))
    } else {
        (None, None)
    };
    Ok(ConditioningReport {
        eta,
        step_probabilities,
        prefix_probabilities,
        condition_holds,
        failed_row,
        prefix_bounds_hold,
        total_deviation,
        total_deviation_bound,
        total_bound_holds,
    })
}

/// Number of points of `support` (distinct points of the `n`-cube)
/// satisfying every row `⊕_{i∈S_j} x_i = y_j`. A support covering the whole
/// cube is counted by Gaussian elimination instead of enumeration.
pub fn intersection_count(n: usize, support: &[u32], masks: &[u32], targets: &[bool]) -> u64 {
    if support.len() == 1usize << n {
        return affine_solution_count(n, masks, targets);
    }
    support
        .iter()
        .filter(|&&x| masks.iter().zip(targets).all(|(&m, &y)| parity(x & m) == y))
        .count() as u64
}

/// `|{x ∈ {0,1}^n : Mx = y}|` over GF(2).
fn affine_solution_count(n: usize, masks: &[u32], targets: &[bool]) -> u64 {
    // pivot bit -> (row, rhs)
    let mut basis: Vec<Option<(u32, bool)>> = vec![None; 32];
    let mut rank = 0;
    for (&mask, &y) in masks.iter().zip(targets) {
        let (mut row, mut rhs) = (mask, y);
        while row != 0 {
            let pivot = 31 - row.leading_zeros() as usize;
            match basis[pivot] {
                Some((b, by)) => {
                    row ^= b;
                    rhs ^= by;
                }
                None => {
                    basis[pivot] = Some((row, rhs));
                    rank += 1;
                    break;
                }
            }
        }
        if row == 0 && rhs {
            return 0;
        }
    }
    1u64 << (n - rank)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionParams {
    pub n: usize,
    pub family: RowFamily,
    pub m: usize,
    /// The fixed target point `y`.
    pub targets: Vec<bool>,
    pub eps: f64,
    /// Exponent trade-off for the fixed-width bound; unused for Bernoulli rows.
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionReport {
    pub min_entropy: f64,
    pub trials: usize,
    pub successes: usize,
    pub frequency: f64,
    pub std_error: f64,
    /// `P` (Bernoulli) or `Q` (fixed width) at the best admissible threshold.
    pub failure_parameter: Option<f64>,
    /// `(1-P)^m` or `(1-Q)^m` when the hypotheses hold, else `None`.
    pub analytic_bound: Option<f64>,
}

/// Fraction of hash draws `h` with
/// `| |A ∩ h^{-1}(y)| / |A| - 2^{-m} | ≤ ε 2^{-m}` for the flat distribution
/// on `support` (distinct points), plus the analytic lower bound on that
/// probability when its hypotheses hold for `t = log |A|`.
pub fn extraction_estimate<R: Rng + ?Sized>(
    support: &[u32],
    params: &ExtractionParams,
    trials: usize,
    rng: &mut R,
) -> Result<ExtractionReport, FourierError> {
    let n = params.n;
    check_dim(n, 24)?;
    if support.is_empty() {
        return Err(FourierError::AllZero);
    }
    if params.targets.len() != params.m || params.m == 0 {
        return Err(FourierError::InvalidParameter("need one target bit per row and m >= 1".into()));
    }
    if !(params.eps > 0.0 && params.eps < 1.0) {
        return Err(FourierError::InvalidParameter(format!("eps = {} must lie in (0, 1)", params.eps)));
    }
    let size = support.len() as f64;
    let ideal = 0.5f64.powi(params.m as i32);
    let mut successes = 0usize;
    for _ in 0..trials {
        let h = build_hash(n, params.m, params.family, rng)
            .map_err(|e| FourierError::InvalidParameter(e.to_string()))?;
        let masks: Vec<u32> = h.rows().iter().map(|r| r.mask().expect("n <= 24") as u32).collect();
        let hits = intersection_count(n, support, &masks, &params.targets);
        if (hits as f64 / size - ideal).abs() <= params.eps * ideal {
            successes += 1;
        }
    }
    let frequency = successes as f64 / trials.max(1) as f64;
    let std_error = (frequency * (1.0 - frequency) / trials.max(1) as f64).sqrt();

    let t = size.log2();
    // the guarantee covers min-entropy t >= t0 + m + 1; the largest t0 is best
    let t0 = t - params.m as f64 - 1.0;
    let failure_parameter = (t0 > 0.0).then(|| match params.family {
        RowFamily::Bernoulli { p } => main_lemma_p(params.m, params.eps, p, n, t0 / n as f64),
        RowFamily::FixedWidth { k } => main_lemma_q(params.m, params.eps, n, t0, k, params.zeta),
    });
    let analytic_bound = failure_parameter
        .filter(|&q| q < 1.0)
        .map(|q| (1.0 - q).powi(params.m as i32));
    Ok(ExtractionReport {
        min_entropy: t,
        trials,
        successes,
        frequency,
        std_error,
        failure_parameter,
        analytic_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{random_flat, random_signed, SignedFunction};
    use crate::hash::XorConstraint;
    use crate::seed;

    #[test]
    fn mu_p_expectation_closed_forms() {
        let u = HypercubeDistribution::uniform(6).unwrap();
        for p in [0.1, 0.3, 0.5] {
            let v = expected_abs_coeff_mu_p(&u, p).unwrap();
            assert!((v - 0.5 * (1.0 - p).powi(6)).abs() < 1e-15);
        }
        let point = HypercubeDistribution::point_mass(6, 5).unwrap();
        // |f̃(S)| = 1/2 for every S
        assert!((expected_abs_coeff_mu_p(&point, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            expected_abs_coeff_mu_p(&HypercubeDistribution::uniform(15).unwrap(), 0.5),
            Err(FourierError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn mu_p_monte_carlo_tracks_exact() {
        let mut rng = seed::from_seed(4);
        let f = random_flat(10, 5, &mut rng).unwrap();
        let exact = expected_abs_coeff_mu_p(&f, 0.25).unwrap();
        let mc = expected_abs_coeff_mu_p_mc(&f, 0.25, 4000, &mut rng).unwrap();
        assert!((mc.mean - exact).abs() <= 4.0 * mc.std_error + 1e-12);
    }

    #[test]
    fn fixed_k_expectation_closed_forms() {
        let u = HypercubeDistribution::uniform(7).unwrap();
        for k in 1..=7 {
            assert!(expected_abs_coeff_fixed_k(&u, k).unwrap().abs() < 1e-15);
        }
        let point = HypercubeDistribution::point_mass(7, 0).unwrap();
        assert!((expected_abs_coeff_fixed_k(&point, 3).unwrap() - 0.5).abs() < 1e-12);
        assert!(expected_abs_coeff_fixed_k(&point, 0).is_err());
        assert!(expected_abs_coeff_fixed_k(&point, 8).is_err());
        let mut rng = seed::from_seed(5);
        let f = random_flat(9, 4, &mut rng).unwrap();
        let exact = expected_abs_coeff_fixed_k(&f, 3).unwrap();
        let mc = expected_abs_coeff_fixed_k_mc(&f, 3, 4000, &mut rng).unwrap();
        assert!((mc.mean - exact).abs() <= 4.0 * mc.std_error + 1e-12);
    }

    #[test]
    fn contractive_base_case() {
        let one = SignedFunction::constant(1, 1).unwrap();
        for (p, alpha) in [(0.1, 0.05), (0.5, 1.0 / 9.0), (0.25, 1.0)] {
            let out = check_contractive(&one, &one, p, alpha).unwrap();
            assert!((out.lhs - (1.0 - p)).abs() < 1e-15);
            let a_tilde = norm_ratio_sup(alpha, p).value.max((1.0 - p) * 4f64.powf(alpha * p));
            assert!((out.rhs - a_tilde * 4f64.powf(-alpha * p)).abs() < 1e-12);
            assert!(out.holds);
        }
    }

    #[test]
    fn contractive_with_zero_function() {
        let zero = SignedFunction::constant(3, 0).unwrap();
        let mut rng = seed::from_seed(6);
        let g = random_signed(3, 0.3, &mut rng).unwrap();
        let out = check_contractive(&zero, &g, 0.3, 0.1).unwrap();
        assert_eq!((out.lhs, out.rhs), (0.0, 0.0));
        assert!(out.holds);
    }

    #[test]
    fn contractive_random_pairs() {
        let mut rng = seed::from_seed(7);
        for _ in 0..60 {
            let n = rng.random_range(1..=7);
            let f = random_signed(n, rng.random::<f64>(), &mut rng).unwrap();
            let g = random_signed(n, rng.random::<f64>(), &mut rng).unwrap();
            let out = check_contractive(&f, &g, 0.25, 1.0 / 9.0).unwrap();
            assert!(out.holds, "{out:?}");
        }
    }

    #[test]
    fn kkl_edge_cases() {
        let mut rng = seed::from_seed(8);
        for _ in 0..20 {
            let n = rng.random_range(1..=8);
            let f = random_signed(n, rng.random::<f64>(), &mut rng).unwrap();
            let at_zero = check_kkl_bound(&f, 0.0).unwrap();
            let mean = fourier_coefficient(&f.as_reals(), 0);
            assert!((at_zero.lhs - mean * mean).abs() < 1e-15);
            assert!(at_zero.holds);
            let at_one = check_kkl_bound(&f, 1.0).unwrap();
            assert!((at_one.lhs - at_one.rhs).abs() < 1e-12, "Parseval: {at_one:?}");
            for d in [0.1, 0.5, 0.9] {
                assert!(check_kkl_bound(&f, d).unwrap().holds);
            }
        }
        assert!(check_kkl_bound(&SignedFunction::constant(2, 1).unwrap(), 1.5).is_err());
    }

    #[test]
    fn conditioning_on_uniform_is_exact() {
        let u = HypercubeDistribution::uniform(6).unwrap();
        let h = HashFunction::new(
            6,
            vec![
                XorConstraint::new([1, 2], true),
                XorConstraint::new([3], false),
                XorConstraint::new([2, 4, 6], true),
            ],
        )
        .unwrap();
        let r = check_conditioning_chain(&u, &h, 0.01).unwrap();
        assert!(r.condition_holds);
        assert!(r.step_probabilities.iter().all(|&p| p == 0.5));
        assert_eq!(r.total_deviation, 0.0);
        assert!(r.consistent());
    }

    #[test]
    fn conditioning_single_row_reduces_to_condition() {
        let mut rng = seed::from_seed(9);
        for _ in 0..50 {
            let f = random_flat(8, 4, &mut rng).unwrap();
            let h = build_hash(8, 1, RowFamily::Bernoulli { p: 0.5 }, &mut rng).unwrap();
            let eta = 0.3;
            let r = check_conditioning_chain(&f, &h, eta).unwrap();
            // with m = 1: |q_1 - 1/2| <= η/2 is the condition itself
            assert_eq!(r.total_deviation <= r.total_deviation_bound + 1e-15, r.condition_holds);
            assert!(r.consistent());
        }
    }

    #[test]
    fn conditioning_reports_failing_row() {
        let f = HypercubeDistribution::flat(3, &[0b000, 0b011]).unwrap();
        // x_1 is 0 on one point and 1 on the other; x_3 is always 0
        let h = HashFunction::new(
            3,
            vec![XorConstraint::new([1], false), XorConstraint::new([3], true)],
        )
        .unwrap();
        let r = check_conditioning_chain(&f, &h, 0.5).unwrap();
        assert_eq!(r.failed_row, Some(2));
        assert!(!r.condition_holds);
        assert_eq!(r.prefix_bounds_hold, None);
    }

    #[test]
    fn affine_count_matches_enumeration() {
        let mut rng = seed::from_seed(10);
        let n = 7;
        let all: Vec<u32> = (0..1 << n).collect();
        for _ in 0..200 {
            let m = rng.random_range(1..=9);
            let h = build_hash(n, m, RowFamily::Bernoulli { p: 0.3 }, &mut rng).unwrap();
            let masks: Vec<u32> = h.row_masks().unwrap().iter().map(|&m| m as u32).collect();
            let brute = all
                .iter()
                .filter(|&&x| masks.iter().zip(h.targets()).all(|(&m, y)| parity(x & m) == y))
                .count() as u64;
            assert_eq!(intersection_count(n, &all, &masks, &h.targets()), brute);
            assert_eq!(intersection_count(n, &all[..all.len() - 1], &masks, &h.targets()) <= brute, true);
        }
    }

    #[test]
    fn full_cube_single_parity_always_balanced() {
        let mut rng = seed::from_seed(11);
        let n = 10;
        let all: Vec<u32> = (0..1 << n).collect();
        let params = ExtractionParams {
            n,
            family: RowFamily::Bernoulli { p: 0.5 },
            m: 1,
            targets: vec![true],
            eps: 0.5,
            zeta: 0.5,
        };
        let r = extraction_estimate(&all, &params, 500, &mut rng).unwrap();
        // only the empty parity fails, with probability 2^-10
        assert!(r.successes >= 498, "{r:?}");
    }

    #[test]
    fn extraction_bound_gate() {
        let mut rng = seed::from_seed(12);
        let support: Vec<u32> = (0..16).collect();
        let params = ExtractionParams {
            n: 10,
            family: RowFamily::Bernoulli { p: 0.5 },
            m: 6,
            targets: vec![false; 6],
            eps: 0.5,
            zeta: 0.5,
        };
        let r = extraction_estimate(&support, &params, 10, &mut rng).unwrap();
        assert_eq!(r.failure_parameter, None);
        assert_eq!(r.analytic_bound, None);
    }
}
