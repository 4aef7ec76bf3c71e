use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::{check_dim, FourierError, MAX_DIM};

const SUM_TOLERANCE: f64 = 1e-12;

/// A probability distribution on `{0,1}^n` as a dense table.
#[derive(Debug, Clone, PartialEq)]
pub struct HypercubeDistribution {
    n: usize,
    values: Vec<f64>,
}

impl HypercubeDistribution {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, FourierError> {
        check_dim(n, MAX_DIM)?;
        if values.len() != 1 << n {
            return Err(FourierError::WrongLength { len: values.len(), n });
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(FourierError::NotADistribution(format!("entry {v} is negative or not finite")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(FourierError::NotADistribution(format!("entries sum to {total}")));
        }
        Ok(HypercubeDistribution { n, values })
    }

    pub fn uniform(n: usize) -> Result<Self, FourierError> {
        check_dim(n, MAX_DIM)?;
        let size = 1usize << n;
        Self::new(n, vec![1.0 / size as f64; size])
    }

    /// Uniform on `support` (points as bit masks, duplicates ignored).
    pub fn flat(n: usize, support: &[u32]) -> Result<Self, FourierError> {
        check_dim(n, MAX_DIM)?;
        let mut values = vec![0.0; 1 << n];
        for &x in support {
            if x as usize >= values.len() {
                return Err(FourierError::InvalidParameter(format!("point {x} outside the {n}-cube")));
            }
            values[x as usize] = 1.0;
        }
        let count = values.iter().filter(|&&v| v > 0.0).count();
        if count == 0 {
            return Err(FourierError::AllZero);
        }
        let w = 1.0 / count as f64;
        values.iter_mut().for_each(|v| *v *= w);
        Self::new(n, values)
    }

    pub fn point_mass(n: usize, x: u32) -> Result<Self, FourierError> {
        Self::flat(n, &[x])
    }

    /// `Σ w_i f_i` for distributions over the same cube; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &HypercubeDistribution)]) -> Result<Self, FourierError> {
        let Some((_, first)) = parts.first() else {
            return Err(FourierError::InvalidParameter("empty mixture".into()));
        };
        let n = first.n;
        let mut values = vec![0.0; 1 << n];
        for (w, d) in parts {
            if d.n != n {
                return Err(FourierError::InvalidParameter("mixture of different dimensions".into()));
            }
            for (acc, v) in values.iter_mut().zip(&d.values) {
                *acc += w * v;
            }
        }
        Self::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Vec<u32> {
        (0..self.values.len() as u32)
            .filter(|&x| self.values[x as usize] > 0.0)
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// A function `{0,1}^n → {-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedFunction {
    n: usize,
    values: Vec<i8>,
}

impl SignedFunction {
    pub fn new(n: usize, values: Vec<i8>) -> Result<Self, FourierError> {
        check_dim(n, MAX_DIM)?;
        if values.len() != 1 << n {
            return Err(FourierError::WrongLength { len: values.len(), n });
        }
        if let Some(&v) = values.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(FourierError::NotSigned(v));
        }
        Ok(SignedFunction { n, values })
    }

    pub fn constant(n: usize, value: i8) -> Result<Self, FourierError> {
        Self::new(n, vec![value; 1 << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn as_reals(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

/// Min-entropy summary of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    /// `t = -log2(max f)`.
    pub min_entropy: f64,
    /// `t / n`.
    pub relative: f64,
    /// Every nonzero value equals `2^{-t}`.
    pub is_flat: bool,
    pub support_size: usize,
}

pub fn entropy_profile(f: &HypercubeDistribution) -> Result<EntropyProfile, FourierError> {
    let max = f.max_value();
    if max <= 0.0 {
        return Err(FourierError::AllZero);
    }
    let support_size = f.values.iter().filter(|&&v| v > 0.0).count();
    let is_flat = f
        .values
        .iter()
        .filter(|&&v| v > 0.0)
        .all(|&v| (v - max).abs() <= 1e-12 * max);
    let min_entropy = -max.log2();
    let relative = if f.n == 0 { 0.0 } else { min_entropy / f.n as f64 };
    Ok(EntropyProfile {
        min_entropy,
        relative,
        is_flat,
        support_size,
    })
}

/// One piece of a convex decomposition: weight and the support of a flat
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatComponent {
    pub weight: f64,
    pub support: Vec<u32>,
}

impl FlatComponent {
    pub fn to_distribution(&self, n: usize) -> Result<HypercubeDistribution, FourierError> {
        HypercubeDistribution::flat(n, &self.support)
    }
}

/// Writes `f` as a convex combination of `t`-flat distributions (each
/// uniform on exactly `2^t` points). Requires `max f <= 2^{-t}`.
///
/// Greedy peeling: with residual mass `M` and every residual value at most
/// `M / 2^t`, take the `2^t` heaviest points and remove as much uniform mass
/// from them as keeps both nonnegativity and that invariant. Each step
/// zeroes a point or makes a new point tight, so at most `2^{n+1}` steps run.
pub fn flat_decompose(f: &HypercubeDistribution, t: usize) -> Result<Vec<FlatComponent>, FourierError> {
    if t > f.n {
        return Err(FourierError::InvalidParameter(format!("t = {t} exceeds n = {}", f.n)));
    }
    let k = 1usize << t;
    let kf = k as f64;
    let max = f.max_value();
    if max > (1.0 + 1e-12) / kf {
        return Err(FourierError::EntropyTooLow {
            actual: -max.log2(),
            required: t as f64,
        });
    }
    let eps = 1e-15;
    let mut residual = f.values.clone();
    let mut mass: f64 = residual.iter().sum();
    let mut order: Vec<u32> = (0..residual.len() as u32).collect();
    let mut components = Vec::new();
    let max_steps = 2 * residual.len() + 2;
    while mass > eps {
        if components.len() > max_steps {
            return Err(FourierError::InvalidParameter("decomposition did not converge".into()));
        }
        order.sort_by(|&a, &b| residual[b as usize].total_cmp(&residual[a as usize]).then(a.cmp(&b)));
        let top = &order[..k];
        let min_top = residual[top[k - 1] as usize];
        if min_top <= 0.0 {
            // only rounding dust is left
            break;
        }
        let max_rest = order.get(k).map_or(0.0, |&x| residual[x as usize]);
        let lambda = (kf * min_top).min(mass - kf * max_rest).min(mass);
        if lambda <= eps {
            break;
        }
        let share = lambda / kf;
        let mut support = top.to_vec();
        support.sort_unstable();
        for &x in &support {
            let r = &mut residual[x as usize];
            *r -= share;
            if *r < eps * share.max(1.0) {
                *r = 0.0;
            }
        }
        mass = residual.iter().sum();
        components.push(FlatComponent { weight: lambda, support });
    }
    // fold leftover rounding into the weights so they sum to one exactly
    let total: f64 = components.iter().map(|c| c.weight).sum();
    components.iter_mut().for_each(|c| c.weight /= total);
    Ok(components)
}

/// Random distribution with independent uniform weights, normalized.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HypercubeDistribution, FourierError> {
    check_dim(n, MAX_DIM)?;
    let raw: Vec<f64> = (0..1usize << n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    HypercubeDistribution::new(n, raw.into_iter().map(|v| v / total).collect())
}

/// Uniform distribution on a uniformly random set of `2^t` points.
pub fn random_flat<R: Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<HypercubeDistribution, FourierError> {
    check_dim(n, MAX_DIM)?;
    if t > n {
        return Err(FourierError::InvalidParameter(format!("t = {t} exceeds n = {n}")));
    }
    let support: Vec<u32> = sample(rng, 1 << n, 1 << t).iter().map(|x| x as u32).collect();
    HypercubeDistribution::flat(n, &support)
}

/// Random mixture of `parts` random `t`-flat distributions; min-entropy >= t.
pub fn random_min_entropy_mixture<R: Rng + ?Sized>(
    n: usize,
    t: usize,
    parts: usize,
    rng: &mut R,
) -> Result<HypercubeDistribution, FourierError> {
    let flats: Vec<HypercubeDistribution> = (0..parts.max(1))
        .map(|_| random_flat(n, t, rng))
        .collect::<Result<_, _>>()?;
    let raw: Vec<f64> = flats.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let weighted: Vec<(f64, &HypercubeDistribution)> = raw.iter().map(|w| w / total).zip(&flats).collect();
    HypercubeDistribution::mixture(&weighted)
}

/// Random `{-1,0,1}` function; each value is zero with probability `zero_prob`
/// and otherwise a uniform sign.
pub fn random_signed<R: Rng + ?Sized>(n: usize, zero_prob: f64, rng: &mut R) -> Result<SignedFunction, FourierError> {
    let values = (0..1usize << n)
        .map(|_| {
            if rng.random::<f64>() < zero_prob {
                0
            } else if rng.random::<bool>() {
                1
            } else {
                -1
            }
        })
        .collect();
    SignedFunction::new(n, values)
}
