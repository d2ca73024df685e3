//! Goodness-of-fit helpers for the experiments: chi-squared and
//! Kolmogorov–Smirnov tests and the chi distribution with even degrees of
//! freedom.

use serde::Serialize;

use crate::error::{Error, Result};

/// `P(X > x)` for `X` chi-squared with `df` degrees of freedom.
///
/// Uses the finite sums available for integer `df`: for `df = 2k`,
/// `e^{-x/2} Σ_{j<k} (x/2)^j / j!`; for `df = 2k + 1`,
/// `erfc(√(x/2)) + e^{-x/2} Σ_{j<k} (x/2)^{j+1/2} / Γ(j + 3/2)`.
/// Terms are formed in log space so large `x` does not underflow early.
pub fn chi2_sf(x: f64, df: usize) -> f64 {
    assert!(df >= 1, "chi-squared needs at least one degree of freedom");
    if x <= 0.0 {
        return 1.0;
    }
    let h = x / 2.0;
    let lh = h.ln();
    let k = df / 2;
    let (mut sum, offset) = if df % 2 == 0 { (0.0, 0.0) } else { (libm::erfc(h.sqrt()), 0.5) };
    for j in 0..k {
        let e = j as f64 + offset;
        sum += (-h + e * lh - libm::lgamma(e + 1.0)).exp();
    }
    sum.clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquared {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson's test of observed counts against cell probabilities. Cells
/// with zero probability must be empty and are dropped.
pub fn chi_squared_test(observed: &[u64], probs: &[f64]) -> Result<ChiSquared> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::OutOfRange("chi-squared test needs at least two matching cells".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientSamples { accepted: 0, required: 1 });
    }
    let mass: f64 = probs.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            if o > 0 {
                return Ok(ChiSquared { statistic: f64::INFINITY, df: observed.len() - 1, p_value: 0.0 });
            }
            continue;
        }
        let e = total as f64 * p / mass;
        statistic += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.max(2) - 1;
    Ok(ChiSquared { statistic, df, p_value: chi2_sf(statistic, df) })
}

/// Two-sided one-sample Kolmogorov–Smirnov distance `sup |F_n - F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Asymptotic p-value of a KS distance `d` from `n` samples, by the
/// Kolmogorov series with the usual small-sample correction of the argument.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * d;
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = 2.0 * (-2.0 * (j * j) as f64 * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// CDF of the chi distribution with `2k` degrees of freedom:
/// `1 - e^{-s²/2} Σ_{j<k} (s²/2)^j / j!`.
pub fn chi_even_cdf(s: f64, k: usize) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    1.0 - chi2_sf(s * s, 2 * k)
}

/// Total variation distance `½ Σ |p_i - q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
