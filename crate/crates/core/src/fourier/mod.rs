//! Exact Fourier analysis of functions on the Boolean cube `{0,1}^n`.
//!
//! Points of the cube are `u32` bit masks: bit `i-1` holds coordinate
//! `x_i`. Index sets `S ⊆ [n]` use the same encoding. Tables are dense, so
//! dimensions are capped at [`MAX_DIM`].

mod bounds;
mod checks;
mod distribution;

use thiserror::Error;

pub use bounds::{
    fixed_width_bound, kappa_for_width, main_lemma_p, main_lemma_q, mu_p_bound, norm_ratio,
    norm_ratio_sup, norm_ratio_sup_bound, NormRatioSup,
};
pub use checks::{
    check_conditioning_chain, check_contractive, check_kkl_bound, expected_abs_coeff_fixed_k,
    expected_abs_coeff_fixed_k_mc, expected_abs_coeff_mu_p, expected_abs_coeff_mu_p_mc,
    extraction_estimate, intersection_count, CheckOutcome, ConditioningReport, ExtractionParams,
    ExtractionReport, McEstimate,
};
pub use distribution::{
    entropy_profile, flat_decompose, random_distribution, random_flat, random_min_entropy_mixture,
    random_signed, EntropyProfile, FlatComponent, HypercubeDistribution, SignedFunction,
};

/// Largest dimension for dense tables.
pub const MAX_DIM: usize = 20;
/// Largest dimension for exact expectations over `S ~ μ_p` or `k`-subsets.
pub const EXACT_SUBSET_DIM: usize = 14;
/// Largest dimension for exact expectations of coefficient products.
pub const EXACT_PAIR_DIM: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum FourierError {
    #[error("dimension {n} exceeds the cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("table has {len} entries, expected 2^{n}")]
    WrongLength { len: usize, n: usize },
    #[error("not a distribution: {0}")]
    NotADistribution(String),
    #[error("value {0} is not in {{-1, 0, 1}}")]
    NotSigned(i8),
    #[error("all-zero table has no min-entropy")]
    AllZero,
    #[error("min-entropy {actual} is below the requested {required}")]
    EntropyTooLow { actual: f64, required: f64 },
    #[error("{0}")]
    InvalidParameter(String),
}

fn check_dim(n: usize, cap: usize) -> Result<(), FourierError> {
    if n > cap {
        Err(FourierError::DimensionTooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Bit mask for a set of 1-based coordinates.
pub fn index_set(coords: &[usize]) -> u32 {
    coords.iter().fold(0, |acc, &i| {
        assert!((1..=32).contains(&i), "coordinate {i} out of range");
        acc | 1 << (i - 1)
    })
}

#[inline]
pub(crate) fn parity(x: u32) -> bool {
    x.count_ones() & 1 == 1
}

/// `f̂(S) = E_{x~U}[f(x) (-1)^{⊕_{i∈S} x_i}]`, by direct summation.
pub fn fourier_coefficient(values: &[f64], set: u32) -> f64 {
    let size = values.len();
    let total: f64 = values
        .iter()
        .enumerate()
        .map(|(x, &v)| if parity(x as u32 & set) { -v } else { v })
        .sum();
    total / size as f64
}

/// All coefficients `f̂(S)`, indexed by the mask of `S`, via the fast
/// Walsh–Hadamard transform.
pub fn fourier_transform(values: &[f64]) -> Vec<f64> {
    let size = values.len();
    assert!(size.is_power_of_two(), "table length must be a power of two");
    let mut a = values.to_vec();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                let (u, v) = (a[i], a[i + h]);
                a[i] = u + v;
                a[i + h] = u - v;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / size as f64;
    a.iter_mut().for_each(|c| *c *= scale);
    a
}

/// `f̃(S) = 2^{n-1} f̂(S)`, from the defining expectation.
pub fn normalized_coefficient(f: &HypercubeDistribution, set: u32) -> f64 {
    let cube_size = f.values().len() as f64;
    0.5 * cube_size * fourier_coefficient(f.values(), set)
}

/// `Pr_{x~f}(⊕_{i∈S} x_i = 0) - 1/2`, accumulated over the support of `f`.
pub fn parity_bias(f: &HypercubeDistribution, set: u32) -> f64 {
    let even: f64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|&(x, &v)| v != 0.0 && !parity(x as u32 & set))
        .map(|(_, &v)| v)
        .sum();
    even - 0.5
}
