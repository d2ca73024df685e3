//! Offspring laws: the labelled `η` and the bivariate `(ξ, ζ)`, plus the
//! size-biased variants.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::constants::Constants;
use super::fixed::Fixed;
use crate::error::{Error, Result};

/// A probability table `pmf[a][b] = P(ξ = a, ζ = b)`; univariate laws have a
/// single column (`ζ ≡ 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringLaw {
    pmf: Vec<Vec<f64>>,
    /// Upper bound on the probability mass cut off by truncation.
    pub tail_bound: f64,
}

impl OffspringLaw {
    pub fn new(pmf: Vec<Vec<f64>>, tail_bound: f64) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().flatten().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::OutOfRange("probabilities must be finite and non-negative".into()));
        }
        Ok(OffspringLaw { pmf, tail_bound })
    }

    /// Univariate law from `P(η = k)`, `k = 0, 1, ...`.
    pub fn univariate(p: Vec<f64>, tail_bound: f64) -> Result<Self> {
        Self::new(p.into_iter().map(|x| vec![x]).collect(), tail_bound)
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.pmf.get(a).and_then(|row| row.get(b)).copied().unwrap_or(0.0)
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.pmf
    }

    pub fn max_xi(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn max_zeta(&self) -> usize {
        self.pmf.iter().map(|r| r.len()).max().unwrap_or(1) - 1
    }

    /// Non-zero entries `(a, b, p)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pmf
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &p)| (a, b, p)))
            .filter(|&(_, _, p)| p > 0.0)
    }

    pub fn total_mass(&self) -> f64 {
        kahan(self.entries().map(|(_, _, p)| p))
    }

    pub fn p00(&self) -> f64 {
        self.prob(0, 0)
    }

    pub fn mean_xi(&self) -> f64 {
        kahan(self.entries().map(|(a, _, p)| a as f64 * p))
    }

    pub fn var_xi(&self) -> f64 {
        let m = self.mean_xi();
        kahan(self.entries().map(|(a, _, p)| (a as f64 - m).powi(2) * p))
    }

    pub fn mean_zeta(&self) -> f64 {
        kahan(self.entries().map(|(_, b, p)| b as f64 * p))
    }

    /// `P(ξ = a)`.
    pub fn xi_marginal(&self) -> Vec<f64> {
        self.pmf.iter().map(|row| kahan(row.iter().copied())).collect()
    }

    /// `P(ζ = b)`.
    pub fn zeta_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_zeta() + 1];
        for (_, b, p) in self.entries() {
            out[b] += p;
        }
        out
    }

    /// gcd of the values taken by `ξ` with positive probability.
    pub fn support_gcd(&self) -> usize {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.xi_marginal().iter().enumerate().filter(|(_, &p)| p > 0.0).fold(0, |g, (a, _)| gcd(g, a))
    }

    pub fn sampler(&self) -> LawSampler {
        let entries: Vec<(usize, usize, f64)> = self.entries().collect();
        let index = WeightedIndex::new(entries.iter().map(|e| e.2)).expect("positive mass");
        LawSampler { outcomes: entries.iter().map(|e| (e.0, e.1)).collect(), index }
    }
}

fn kahan(it: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in it {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Draws `(ξ, ζ)` pairs from a law.
#[derive(Clone, Debug)]
pub struct LawSampler {
    outcomes: Vec<(usize, usize)>,
    index: WeightedIndex<f64>,
}

impl LawSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        self.outcomes[self.index.sample(rng)]
    }
}

/// Truncation point for the tail of `η`.
const ETA_TAIL: f64 = 1e-15;

/// `P(η = 0) = 2 - 1/ln 2`, `P(η = 1) = 0`, `P(η = k) = (ln 2)^{k-1}/k!`.
pub fn eta_law() -> OffspringLaw {
    let l = std::f64::consts::LN_2;
    let mut p = vec![2.0 - 1.0 / l, 0.0];
    // remaining mass after index k: Σ_{j>k} l^{j-1}/j!
    let mut term = l / 2.0; // k = 2
    let mut k = 2usize;
    let mut tail = 1.0 - p[0];
    while tail > ETA_TAIL {
        p.push(term);
        tail -= term;
        k += 1;
        term *= l / k as f64;
    }
    // bound the rest by a geometric series
    let bound = term / (1.0 - l / (k + 1) as f64);
    OffspringLaw::univariate(p, bound).expect("valid probabilities")
}

/// Closed forms for `η` in high precision: `(P(η=0), E η, Var η)`.
///
/// `E η = Σ_{k≥2} (ln 2)^{k-1}/(k-1)! = e^{ln 2} - 1` and
/// `E η(η-1) = ln 2 · e^{ln 2}`, so `Var η = 2 ln 2 + 1 - 1`.
pub fn eta_closed_form() -> (Fixed, Fixed, Fixed) {
    let l = Fixed::ln2();
    let e = l.exp();
    let p0 = &Fixed::from_int(2) - &(Fixed::one() / l.clone());
    let mean = &e - &Fixed::one();
    let fact2 = &l * &e;
    let var = &(&fact2 + &mean) - &(&mean * &mean);
    (p0, mean, var)
}

/// Tail mass below which the bivariate law is truncated.
pub const XI_ZETA_TAIL: f64 = 1e-12;

/// The law of `(ξ, ζ)` with
/// `E z^ξ w^ζ = (ρ + exp(a z + Ψ(w)) - 1 - a z) / a`, where `a = A(ρ)` and
/// `Ψ(w) = Σ_{i≥2} A(ρ^i w^i)/i`.
///
/// With `e_b = [w^b] e^{Ψ(w)}`: `P(0,0) = ρ/a`, `P(0,b) = e_b/a`,
/// `P(1,0) = 0`, `P(1,b) = e_b`, and `P(j,b) = a^{j-1} e_b / j!` for `j ≥ 2`.
pub fn xi_zeta_law(consts: &Constants) -> Result<OffspringLaw> {
    let rho = consts.rho.to_f64();
    let a = consts.a_rho.to_f64();
    let table = &consts.table;
    // ψ_m = ρ^m Σ_{i≥2, i|m} A_{m/i}/i; A_{m/i} is needed up to m/2
    let max_b = (2 * table.order()).min(400);
    let mut psi = vec![0.0; max_b + 1];
    for (m, slot) in psi.iter_mut().enumerate().skip(2) {
        let mut s = 0.0;
        for i in 2..=m {
            if m % i == 0 {
                s += table.coeff_f64(m / i) / i as f64;
            }
        }
        *slot = s * rho.powi(m as i32);
    }
    // e^{Ψ}: b e_b = Σ_{m=1}^b m ψ_m e_{b-m}
    let exp_psi_total = consts.phi_rho.exp().to_f64();
    let mut e = vec![1.0];
    let mut acc = 1.0;
    let mut b = 0;
    while exp_psi_total - acc > XI_ZETA_TAIL * 1e-2 {
        b += 1;
        if b > max_b {
            return Err(Error::Divergent("e^Ψ coefficients do not decay within the table".into()));
        }
        let eb = (1..=b).map(|m| m as f64 * psi[m] * e[b - m]).sum::<f64>() / b as f64;
        e.push(eb);
        acc += eb;
    }
    let zeta_tail = (exp_psi_total - acc).max(0.0);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut j = 0usize;
    let mut weight = 1.0 / a; // a^{j-1}/j!
    loop {
        let row: Vec<f64> = match j {
            0 => e.iter().enumerate().map(|(b, &eb)| if b == 0 { rho / a } else { eb / a }).collect(),
            1 => e.iter().enumerate().map(|(b, &eb)| if b == 0 { 0.0 } else { eb }).collect(),
            _ => e.iter().map(|&eb| weight * eb).collect(),
        };
        rows.push(row);
        j += 1;
        weight *= a / j as f64;
        // remaining ξ mass ≤ Σ_{j'≥j} a^{j'-1}/j'! e^Φ ≤ weight·e^Φ/(1 - a/(j+1))
        let bound = weight * exp_psi_total / (1.0 - a / (j + 1) as f64);
        if j >= 2 && bound < XI_ZETA_TAIL * 1e-2 {
            // each row drops at most (row weight)·zeta_tail; the weights sum to 1/a + e^a
            return OffspringLaw::new(rows, bound + zeta_tail * (1.0 / a + a.exp()));
        }
    }
}

/// `η•`, `η*` and (when `E ζ > 0`) `η∘`.
#[derive(Clone, Debug)]
pub struct BiasedLaws {
    pub bullet: OffspringLaw,
    pub star: OffspringLaw,
    pub circ: Option<OffspringLaw>,
}

/// Reweights by `a`, by `a(a-1)/Var ξ`, and by `b/E ζ`. A law without any
/// `ζ` mass has no `η∘`; a degenerate `ξ` is an error.
pub fn biased_laws(law: &OffspringLaw) -> Result<BiasedLaws> {
    let var = law.var_xi();
    if law.mean_xi() <= 0.0 {
        return Err(Error::ZeroNormalizer("size-biased law (E ξ = 0)"));
    }
    if var <= 0.0 {
        return Err(Error::ZeroNormalizer("two-point biased law (Var ξ = 0)"));
    }
    let map = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        law.table()
            .iter()
            .enumerate()
            .map(|(a, row)| row.iter().enumerate().map(|(b, &p)| f(a, b) * p).collect())
            .collect()
    };
    let bullet = OffspringLaw::new(map(&|a, _| a as f64), law.tail_bound)?;
    let star = OffspringLaw::new(map(&|a, _| (a * a.saturating_sub(1)) as f64 / var), law.tail_bound)?;
    let mz = law.mean_zeta();
    let circ = if mz > 0.0 { Some(OffspringLaw::new(map(&|_, b| b as f64 / mz), law.tail_bound)?) } else { None };
    Ok(BiasedLaws { bullet, star, circ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::constants::find_constants;

    #[test]
    fn eta_moments() {
        let eta = eta_law();
        assert!((eta.total_mass() - 1.0).abs() < 1e-14);
        assert!((eta.mean_xi() - 1.0).abs() < 1e-14);
        assert!((eta.var_xi() - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(eta.prob(1, 0), 0.0);
        assert!(eta.tail_bound < 1e-15);
    }

    #[test]
    fn eta_closed_forms_exact() {
        let (p0, mean, var) = eta_closed_form();
        assert!((&mean - &Fixed::one()).abs().to_f64() < 1e-70);
        assert!((&var - &Fixed::ln2().mul_int(2)).abs().to_f64() < 1e-70);
        assert!((p0.to_f64() - (2.0 - 1.0 / std::f64::consts::LN_2)).abs() < 1e-15);
    }

    #[test]
    fn xi_zeta_moments() {
        let c = find_constants(1e-10).unwrap();
        let law = xi_zeta_law(&c).unwrap();
        assert!((law.total_mass() - 1.0).abs() < 1e-10);
        assert!((law.mean_xi() - 1.0).abs() < 1e-8);
        assert!((law.var_xi() - c.var_xi.to_f64()).abs() < 1e-8);
        assert!((law.mean_zeta() - c.mean_zeta.to_f64()).abs() < 1e-8);
        assert!((law.p00() - c.rho.to_f64() / c.a_rho.to_f64()).abs() < 1e-15);
        assert_eq!(law.prob(1, 0), 0.0);
        assert_eq!(law.support_gcd(), 1);
    }

    #[test]
    fn geometric_tails() {
        let c = find_constants(1e-10).unwrap();
        let law = xi_zeta_law(&c).unwrap();
        let xi = law.xi_marginal();
        let k = xi.len();
        for a in 4..k - 1 {
            assert!(xi[a + 1] / xi[a] < 0.5, "ratio at {a}");
        }
        let zeta = law.zeta_marginal();
        let n = zeta.len();
        let r = (zeta[n - 1] / zeta[n - 11]).powf(0.1);
        assert!(r < 0.8, "zeta decay ratio {r}");
    }

    #[test]
    fn biased_laws_normalized() {
        let c = find_constants(1e-10).unwrap();
        let law = xi_zeta_law(&c).unwrap();
        let b = biased_laws(&law).unwrap();
        assert!((b.bullet.total_mass() - 1.0).abs() < 1e-8);
        assert!((b.star.total_mass() - 1.0).abs() < 1e-8);
        assert!((b.circ.unwrap().total_mass() - 1.0).abs() < 1e-10);

        let eta = eta_law();
        let b = biased_laws(&eta).unwrap();
        for k in 0..10 {
            assert_eq!(b.bullet.prob(k, 0), k as f64 * eta.prob(k, 0));
        }
        assert!(b.circ.is_none());
        assert!((b.star.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_law_rejected() {
        let point = OffspringLaw::univariate(vec![0.0, 1.0], 0.0).unwrap();
        assert!(matches!(biased_laws(&point), Err(Error::ZeroNormalizer(_))));
    }
}
