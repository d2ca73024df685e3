//! Exact coefficient tables for the tree classes.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// Exponential generating function: counts are `n! [z^n]`.
    Egf,
    /// Ordinary generating function: counts are `[z^n]`.
    Ogf,
    /// Probability generating function; coefficients are probabilities.
    Pgf,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Coefficients `[z^0] .. [z^N]` of a power series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub kind: SeriesKind,
    pub coeffs: Coefficients,
}

impl SeriesTable {
    pub fn order(&self) -> usize {
        match &self.coeffs {
            Coefficients::Exact(c) => c.len() - 1,
            Coefficients::Float(c) => c.len() - 1,
        }
    }

    pub fn exact(&self, n: usize) -> Option<&BigRational> {
        match &self.coeffs {
            Coefficients::Exact(c) => c.get(n),
            Coefficients::Float(_) => None,
        }
    }

    pub fn coeff_f64(&self, n: usize) -> f64 {
        match &self.coeffs {
            Coefficients::Exact(c) => ratio_to_f64(&c[n]),
            Coefficients::Float(c) => c[n],
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..=self.order()).map(|n| self.coeff_f64(n)).collect()
    }

    /// Number of objects of size `n`: `n! [z^n]` for an EGF, `[z^n]` for an
    /// OGF. `None` for probability series.
    pub fn count(&self, n: usize) -> Option<BigInt> {
        let c = self.exact(n)?;
        let scaled = match self.kind {
            SeriesKind::Egf => c * BigRational::from_integer(factorial(n)),
            SeriesKind::Ogf => c.clone(),
            SeriesKind::Pgf => return None,
        };
        debug_assert!(scaled.is_integer());
        Some(scaled.to_integer())
    }

    /// CSV with columns `n,coefficient,count` for `n = 1..=N`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,coefficient,count\n");
        for n in 1..=self.order() {
            let coeff = match &self.coeffs {
                Coefficients::Exact(c) => c[n].to_string(),
                Coefficients::Float(c) => format!("{:e}", c[n]),
            };
            let count = self.count(n).map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{n},{coeff},{count}");
        }
        s
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Accurate conversion for very large numerators and denominators.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let (Some(a), Some(b)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return a / b;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64 - 60;
    let scaled = if shift >= 0 {
        q.numer() / (q.denom() << shift as usize)
    } else {
        (q.numer() << (-shift) as usize) / q.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("truncation order must be at least 1".into()));
    }
    Ok(())
}

/// EGF of labelled leaf-labelled trees with internal outdegree ≥ 2:
/// `T = z + e^T - 1 - T`.
///
/// With `E = e^T` one has `n E_n = Σ_k k T_k E_{n-k}`; writing
/// `R_n = (1/n) Σ_{k<n} k T_k E_{n-k}` gives `T_n = [n=1] + R_n` and
/// `E_n = T_n + R_n`.
pub fn labelled_counts(order: usize) -> Result<SeriesTable> {
    check_order(order)?;
    let mut t = vec![BigRational::zero(); order + 1];
    let mut e = vec![BigRational::zero(); order + 1];
    e[0] = BigRational::one();
    for n in 1..=order {
        let mut r = BigRational::zero();
        for k in 1..n {
            r += &t[k] * &e[n - k] * BigRational::from_integer(k.into());
        }
        r /= BigRational::from_integer(n.into());
        t[n] = if n == 1 { BigRational::one() + &r } else { r.clone() };
        e[n] = &t[n] + &r;
    }
    Ok(SeriesTable { kind: SeriesKind::Egf, coeffs: Coefficients::Exact(t) })
}

/// OGF of unlabelled trees with internal outdegree ≥ 2, counted by leaves:
/// `A(z) = z + exp(Σ_{i≥1} A(z^i)/i) - 1 - A(z)`.
///
/// With `B = exp(Σ_i A(z^i)/i)`, `n B_n = Σ_{k=1}^n c_k B_{n-k}` where
/// `c_k = Σ_{d|k} d A_d`. Splitting off the `d = n` term of `c_n` gives
/// `A_n = [n=1] + Q_n`, `B_n = A_n + Q_n` with
/// `Q_n = (1/n) (Σ_{k<n} c_k B_{n-k} + Σ_{d|n, d<n} d A_d)`.
/// Everything stays integral.
pub fn unlabelled_counts(order: usize) -> Result<SeriesTable> {
    check_order(order)?;
    let mut a = vec![BigInt::zero(); order + 1];
    let mut b = vec![BigInt::zero(); order + 1];
    let mut c = vec![BigInt::zero(); order + 1];
    b[0] = BigInt::one();
    for n in 1..=order {
        let mut s = BigInt::zero();
        for k in 1..n {
            s += &c[k] * &b[n - k];
        }
        for d in 1..n {
            if n % d == 0 {
                s += &a[d] * d;
            }
        }
        let (q, rem) = s.div_rem(&BigInt::from(n));
        debug_assert!(rem.is_zero());
        a[n] = if n == 1 { BigInt::one() + &q } else { q.clone() };
        b[n] = &a[n] + &q;
        c[n] = (1..=n).filter(|d| n % d == 0).map(|d| &a[d] * d).sum();
    }
    let coeffs = a.into_iter().map(BigRational::from_integer).collect();
    Ok(SeriesTable { kind: SeriesKind::Ogf, coeffs: Coefficients::Exact(coeffs) })
}

/// Labelled cographs on `n` vertices: one per labelled cotree for `n = 1`,
/// two (root sign) otherwise.
pub fn labelled_cograph_count(table: &SeriesTable, n: usize) -> Option<BigInt> {
    let t = table.count(n)?;
    Some(if n >= 2 { t * 2 } else { t })
}

/// Unlabelled cographs on `n` vertices.
pub fn unlabelled_cograph_count(table: &SeriesTable, n: usize) -> Option<BigInt> {
    let t = table.count(n)?;
    Some(if n >= 2 { t * 2 } else { t })
}

/// `a_n = A_n ρ^n` for `n ≤ order`, by the same recurrence as
/// [`unlabelled_counts`] rescaled to stay in floating point. All terms are
/// positive, so nothing cancels.
///
/// The divisor sums `Σ_{d|n, d<n} d a_d ρ^{n-d}` are pushed forward to the
/// multiples of `d` once `a_d` is known, and `b` is stored reversed so the
/// convolution is a contiguous dot product. Quadratic with a small
/// constant; tens of thousands of terms take about a second.
pub fn scaled_unlabelled(order: usize, rho: f64) -> Vec<f64> {
    let mut a = vec![0.0; order + 1];
    let mut c = vec![0.0; order + 1];
    // b_rev[order - j] = b_j
    let mut b_rev = vec![0.0; order + 1];
    let mut divisor_sum = vec![0.0; order + 1];
    let mut rho_pow = vec![1.0; order + 1];
    for i in 1..=order {
        rho_pow[i] = rho_pow[i - 1] * rho;
    }
    if order == 0 {
        return a;
    }
    b_rev[order] = 1.0;
    for n in 1..=order {
        let s = dot(&c[1..n], &b_rev[order + 1 - n..order]) + divisor_sum[n];
        let q = s / n as f64;
        a[n] = if n == 1 { rho + q } else { q };
        b_rev[order - n] = a[n] + q;
        c[n] = n as f64 * a[n] + divisor_sum[n];
        let mut m = 2 * n;
        while m <= order {
            divisor_sum[m] += n as f64 * a[n] * rho_pow[m - n];
            m += n;
        }
    }
    a
}

/// Dot product with four independent accumulators, which lets the compiler
/// vectorize it.
fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let (xc, yc) = (x.chunks_exact(4), y.chunks_exact(4));
    let tail: f64 = xc.remainder().iter().zip(yc.remainder()).map(|(p, q)| p * q).sum();
    for (p, q) in xc.zip(yc) {
        for i in 0..4 {
            acc[i] += p[i] * q[i];
        }
    }
    acc.iter().sum::<f64>() + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(t: &SeriesTable, upto: usize) -> Vec<u64> {
        (1..=upto).map(|n| t.count(n).unwrap().try_into().unwrap()).collect()
    }

    #[test]
    fn labelled_small() {
        let t = labelled_counts(6).unwrap();
        assert_eq!(counts(&t, 6), vec![1, 1, 4, 26, 236, 2752]);
        assert_eq!(labelled_cograph_count(&t, 3).unwrap(), BigInt::from(8));
    }

    #[test]
    fn unlabelled_small() {
        let t = unlabelled_counts(10).unwrap();
        assert_eq!(counts(&t, 10), vec![1, 1, 2, 5, 12, 33, 90, 261, 766, 2312]);
        assert_eq!(unlabelled_cograph_count(&t, 4).unwrap(), BigInt::from(10));
    }

    #[test]
    fn order_zero_rejected() {
        assert!(labelled_counts(0).is_err());
        assert!(unlabelled_counts(0).is_err());
    }

    #[test]
    fn scaled_matches_exact() {
        let t = unlabelled_counts(60).unwrap();
        let rho = 0.3;
        let s = scaled_unlabelled(60, rho);
        for n in 1..=60 {
            let want = t.coeff_f64(n) * rho.powi(n as i32);
            assert!((s[n] / want - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn csv_layout() {
        let csv = labelled_counts(3).unwrap().to_csv();
        assert_eq!(csv, "n,coefficient,count\n1,1,1\n2,1/2,1\n3,2/3,4\n");
    }

    #[test]
    fn huge_ratio_to_float() {
        let big = BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() * 3, big);
        assert!((ratio_to_f64(&q) - 3.0).abs() < 1e-15);
    }
}
