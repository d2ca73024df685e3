//! Distribution of the number of leaves of the unconditioned two-type tree.

use super::constants::Constants;
use super::laws::OffspringLaw;
use super::series::{scaled_unlabelled, Coefficients, SeriesKind, SeriesTable};
use crate::error::{Error, Result};

/// `P(ℓ = n)` for `n ≤ order`, from `Z(z) = P(0,0)(z - 1) + f(Z(z), z)`
/// where `f` is the offspring generating function.
///
/// Coefficients are produced in increasing order: since `Z(0) = 0`, the
/// coefficient `[z^n] Z^j` only involves `z_1 .. z_{n-1}` for `j ≥ 2`, so the
/// power tables are extended one column at a time. Cost is
/// `O(order^2 · max ξ)`.
pub fn leafcount_series(order: usize, law: &OffspringLaw) -> Result<SeriesTable> {
    let mean = law.mean_xi();
    if mean > 1.0 + 1e-6 {
        return Err(Error::Divergent(format!("supercritical law, E ξ = {mean}")));
    }
    let jmax = law.max_xi();
    let p10 = law.prob(1, 0);
    if p10 >= 1.0 {
        return Err(Error::Divergent("P(ξ = 1, ζ = 0) = 1 never terminates".into()));
    }
    let mut z = vec![0.0; order + 1];
    // pow[j][m] = [z^m] Z^j for j ≥ 1
    let mut pow = vec![vec![0.0; order + 1]; jmax + 1];
    for n in 1..=order {
        for j in 2..=jmax {
            if n < j {
                break;
            }
            let (lo, hi) = pow.split_at_mut(j);
            let prev = &lo[j - 1];
            let mut s = 0.0;
            for m in 1..n {
                s += z[m] * prev[n - m];
            }
            hi[0][n] = s;
        }
        let mut v = if n == 1 { law.p00() } else { 0.0 };
        for (a, b, p) in law.entries() {
            if b > n || (a == 0 && b == 0) {
                continue;
            }
            let m = n - b;
            v += match a {
                0 => {
                    if m == 0 {
                        p
                    } else {
                        0.0
                    }
                }
                1 if m == n => 0.0, // handled through p10 below
                1 => p * z[m],
                _ => p * pow[a][m],
            };
        }
        let zn = v / (1.0 - p10);
        z[n] = zn;
        pow[1][n] = zn;
    }
    let total: f64 = z.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Divergent(format!("leaf-count mass {total} exceeds 1")));
    }
    Ok(SeriesTable { kind: SeriesKind::Pgf, coeffs: Coefficients::Float(z) })
}

/// The same series for the law of `(ξ, ζ)`, using that the leaf count of
/// the Boltzmann tree is `A(ρ z)/A(ρ)`: `P(ℓ = n) = A_n ρ^n / A(ρ)`.
/// Quadratic in `order` with a small constant, so usable for tens of
/// thousands of terms.
pub fn boltzmann_leafcount(order: usize, consts: &Constants) -> SeriesTable {
    let a = consts.a_rho.to_f64();
    let z: Vec<f64> = scaled_unlabelled(order, consts.rho_f64()).into_iter().map(|x| x / a).collect();
    SeriesTable { kind: SeriesKind::Pgf, coeffs: Coefficients::Float(z) }
}
