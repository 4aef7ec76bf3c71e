//! Closed-form bounds and the two-point norm ratio.
//!
//! All logarithms are base 2.

use serde::Serialize;

/// `‖(a, b)‖_q = (|a|^q + |b|^q)^{1/q}`, stable for very large `q`.
fn two_point_norm(a: f64, b: f64, q: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    let hi = a.max(b);
    if hi == 0.0 {
        return 0.0;
    }
    let lo = a.min(b) / hi;
    hi * ((lo.powf(q)).ln_1p() / q).exp()
}

/// `‖(1-2px, 1-2p(1-x))‖_{1/(αp)} / ‖(x, 1-x)‖_{1/(1-αp)}`.
pub fn norm_ratio(alpha: f64, p: f64, x: f64) -> f64 {
    let ap = alpha * p;
    let num = two_point_norm(1.0 - 2.0 * p * x, 1.0 - 2.0 * p * (1.0 - x), 1.0 / ap);
    let den = two_point_norm(x, 1.0 - x, 1.0 / (1.0 - ap));
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRatioSup {
    /// Largest ratio found; at least the ratio at every probed point.
    pub value: f64,
    pub argmax: f64,
    pub probes: usize,
}

const GRID_POINTS: usize = 10_000;

/// `sup_{0≤x≤1}` of [`norm_ratio`]. Both norms are symmetric about 1/2, so
/// only `[0, 1/2]` is searched: a uniform grid, then ternary refinement
/// around the best grid cell down to a width of 1e-12.
pub fn norm_ratio_sup(alpha: f64, p: f64) -> NormRatioSup {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    assert!(p > 0.0 && p <= 0.5, "p must lie in (0, 1/2]");
    let step = 0.5 / GRID_POINTS as f64;
    let mut best = NormRatioSup {
        value: f64::NEG_INFINITY,
        argmax: 0.0,
        probes: 0,
    };
    let mut best_idx = 0;
    for i in 0..=GRID_POINTS {
        let x = i as f64 * step;
        let r = norm_ratio(alpha, p, x);
        best.probes += 1;
        if r > best.value {
            best.value = r;
            best.argmax = x;
            best_idx = i;
        }
    }
    let mut lo = (best_idx.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_idx + 1).min(GRID_POINTS)) as f64 * step;
    while hi - lo > 1e-12 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let (r1, r2) = (norm_ratio(alpha, p, m1), norm_ratio(alpha, p, m2));
        best.probes += 2;
        for (x, r) in [(m1, r1), (m2, r2)] {
            if r > best.value {
                best.value = r;
                best.argmax = x;
            }
        }
        if r1 < r2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best
}

/// `(1 + 2^{-1/α+8})^{αp}`, an upper bound on [`norm_ratio_sup`] for `α ≤ 1/9`.
pub fn norm_ratio_sup_bound(alpha: f64, p: f64) -> f64 {
    let inner = (8.0 - 1.0 / alpha).exp2();
    (alpha * p * inner.ln_1p()).exp()
}

/// `½ · √2^{-p·n·t̃ / log(512/t̃)}`: bound on `E_{S~μ_p} |f̃(S)|` for
/// distributions of relative min-entropy `t̃`.
pub fn mu_p_bound(n: usize, relative_entropy: f64, p: f64) -> f64 {
    if relative_entropy <= 0.0 {
        return 0.5;
    }
    let exponent = p * n as f64 * relative_entropy / (512.0 / relative_entropy).log2();
    0.5 * (-exponent / 2.0).exp2()
}

/// `½ · n^{-(1-ζ)k/2} · 2^{(n-t)·k·n^{-ζ}}`: bound on the average of
/// `|f̃(S)|` over `k`-subsets for distributions of min-entropy `t`.
pub fn fixed_width_bound(n: usize, min_entropy: f64, k: usize, zeta: f64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let log2_value = -1.0 - (1.0 - zeta) * kf / 2.0 * nf.log2() + (nf - min_entropy) * kf * nf.powf(-zeta);
    log2_value.exp2()
}

/// `P(t̃) = (m/ε) · √2^{-p n t̃ / log(512/t̃)}` for the Bernoulli family.
pub fn main_lemma_p(m: usize, eps: f64, p: f64, n: usize, relative_entropy: f64) -> f64 {
    m as f64 / eps * 2.0 * mu_p_bound(n, relative_entropy, p)
}

/// `Q(t) = (m/ε) · n^{-(1-ζ)k/2} · 2^{(n-t)k n^{-ζ}}` for the fixed-width family.
pub fn main_lemma_q(m: usize, eps: f64, n: usize, min_entropy: f64, k: usize, zeta: f64) -> f64 {
    m as f64 / eps * 2.0 * fixed_width_bound(n, min_entropy, k, zeta)
}

/// Solves `k + 1 = κ · log(512κ) · 4 · log(16n)` for `κ`.
pub fn kappa_for_width(k: usize, n: usize) -> f64 {
    let target = (k as f64 + 1.0) / (4.0 * (16.0 * n as f64).log2());
    let g = |kappa: f64| kappa * (512.0 * kappa).log2();
    // g is increasing from 0 on [1/512, ∞)
    let mut lo = 1.0 / 512.0;
    let mut hi = 1.0;
    while g(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_stable_for_huge_exponents() {
        assert!((two_point_norm(1.0, 0.9, 2000.0) - 1.0).abs() < 1e-12);
        assert!((two_point_norm(3.0, 4.0, 2.0) - 5.0).abs() < 1e-12);
        assert_eq!(two_point_norm(0.0, 0.0, 3.0), 0.0);
    }

    #[test]
    fn ratio_is_symmetric() {
        for &(a, p) in &[(0.05, 0.3), (0.1, 0.5), (1.0, 0.2)] {
            for i in 0..=20 {
                let y = i as f64 / 40.0;
                let l = norm_ratio(a, p, 0.5 - y);
                let r = norm_ratio(a, p, 0.5 + y);
                assert!((l - r).abs() < 1e-12 * l.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sup_dominates_every_probe_and_x0() {
        for &(a, p) in &[(0.01, 0.05), (0.05, 0.25), (1.0 / 9.0, 0.5), (0.5, 0.5), (1.0, 0.1)] {
            let sup = norm_ratio_sup(a, p);
            assert!(sup.value >= 1.0 - 1e-12);
            let at_zero = two_point_norm(1.0, 1.0 - 2.0 * p, 1.0 / (a * p));
            assert!(sup.value >= at_zero - 1e-15);
            for i in 0..=997 {
                let x = i as f64 / 997.0;
                assert!(norm_ratio(a, p, x) <= sup.value + 1e-9);
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(mu_p_bound(10, 0.0, 0.3), 0.5);
        // t̃ = 1, p = 1/2, n = 8: exponent 8 * 0.5 / 9 = 4/9
        let expected = 0.5 * (-(4.0 / 9.0) / 2.0f64).exp2();
        assert!((mu_p_bound(8, 1.0, 0.5) - expected).abs() < 1e-15);
        // ζ = 1/2, n = 16, t = n: ½ · 16^{-k/4}
        assert!((fixed_width_bound(16, 16.0, 2, 0.5) - 0.5 / 4.0).abs() < 1e-15);
        assert!((norm_ratio_sup_bound(1.0 / 9.0, 0.5) - 1.5f64.powf(1.0 / 18.0)).abs() < 1e-12);
    }

    #[test]
    fn kappa_solves_its_equation() {
        for &(k, n) in &[(15usize, 16usize), (39, 64), (100, 1000)] {
            let kappa = kappa_for_width(k, n);
            let lhs = kappa * (512.0 * kappa).log2() * 4.0 * (16.0 * n as f64).log2();
            assert!((lhs - (k as f64 + 1.0)).abs() < 1e-9, "{k} {n}: {kappa}");
        }
    }
}
