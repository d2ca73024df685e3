//! The dominant singularity of `A(z)` and the constants derived from it.
//!
//! Writing `A = E(z, A)` with `E(z, y) = z + e^y e^{Φ(z)} - 1 - y` and
//! `Φ(z) = Σ_{i≥2} A(z^i)/i`, the singularity `ρ` is where `E_y = 1`. The two
//! equations `A(ρ) = E(ρ, A(ρ))` and `e^{A(ρ)+Φ(ρ)} = 2` give
//! `A(ρ) = (ρ + 1)/2`, leaving the single monotone equation
//! `ρ + 2Φ(ρ) = 2 ln 2 - 1` for the bisection.

use std::sync::OnceLock;

use serde::Serialize;

use super::fixed::Fixed;
use super::series::{unlabelled_counts, SeriesTable};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 64;

/// Upper bound for ρ used only inside the truncation error estimates.
const RHO_CAP: f64 = 0.3;

/// `Φ(x) = Σ_{i≥2} A(x^i)/i` and its derivative, each `A(x^i)` summed to
/// the table's order.
#[derive(Clone, Debug)]
pub struct PhiSeries {
    coeffs: Vec<Fixed>,
    order: usize,
}

impl PhiSeries {
    pub fn new(table: &SeriesTable) -> Self {
        let coeffs = (0..=table.order())
            .map(|n| Fixed::from_bigint(&table.exact(n).expect("exact table").to_integer()))
            .collect();
        PhiSeries { coeffs, order: table.order() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `A(x)` truncated at the table order; accurate for `x ≤ ρ^2`.
    pub fn a_at(&self, x: &Fixed) -> Fixed {
        let mut acc = Fixed::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `A'(x)`, same truncation.
    pub fn da_at(&self, x: &Fixed) -> Fixed {
        let mut acc = Fixed::zero();
        for (n, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = &(&acc * x) + &c.mul_int(n as i64);
        }
        acc
    }

    /// Number of `i` terms kept: until `x^i` drops below the precision.
    fn terms(x: &Fixed) -> usize {
        let xf = x.to_f64().max(1e-300);
        ((-260.0 * std::f64::consts::LN_2) / xf.ln()).ceil().max(2.0) as usize + 1
    }

    pub fn phi(&self, x: &Fixed) -> Fixed {
        let mut sum = Fixed::zero();
        let mut xi = x.clone();
        for i in 2..=Self::terms(x) {
            xi = &xi * x;
            sum = &sum + &self.a_at(&xi).div_int(i as i64);
        }
        sum
    }

    /// `Φ'(x) = Σ_{i≥2} x^{i-1} A'(x^i)`.
    pub fn dphi(&self, x: &Fixed) -> Fixed {
        let mut sum = Fixed::zero();
        let mut prev = x.clone();
        for _ in 2..=Self::terms(x) {
            let xi = &prev * x;
            sum = &sum + &(&prev * &self.da_at(&xi));
            prev = xi;
        }
        sum
    }

    /// Bound on the error of [`phi`](Self::phi) and [`dphi`](Self::dphi) for
    /// `x ≤ 0.3`, from `A_n ρ^n ≤ A(ρ) < 1`.
    pub fn truncation_bound(&self) -> f64 {
        let r = RHO_CAP;
        let n1 = (self.order + 1) as f64;
        let coeff_tail = r.powf(n1) / (2.0 * (1.0 - r) * (1.0 - r.powf(n1)));
        let deriv_tail = n1 * r.powf(n1 - 1.0) / ((1.0 - r) * (1.0 - r));
        coeff_tail.max(deriv_tail) + 1e-70
    }
}

/// High-precision values of the singularity constants.
#[derive(Clone, Debug)]
pub struct Constants {
    pub order: usize,
    pub rho: Fixed,
    pub a_rho: Fixed,
    pub phi_rho: Fixed,
    pub dphi_rho: Fixed,
    pub c_a: Fixed,
    pub var_xi: Fixed,
    pub mean_zeta: Fixed,
    pub p00: Fixed,
    pub sigma: Fixed,
    pub c_z: Fixed,
    /// `|E_y(ρ, A(ρ)) - 1|`.
    pub residual_ey: Fixed,
    /// `|ρ + 2Φ(ρ) - 2 ln 2 + 1|`, the bisection target.
    pub residual_reduced: Fixed,
    pub rho_error: f64,
    pub derived_error: f64,
    pub truncation_bound: f64,
    pub table: SeriesTable,
}

struct Derived {
    a: Fixed,
    c_a: Fixed,
    var_xi: Fixed,
    mean_zeta: Fixed,
    p00: Fixed,
    sigma: Fixed,
    c_z: Fixed,
    phi: Fixed,
    dphi: Fixed,
    ey: Fixed,
}

fn derive(phi_series: &PhiSeries, rho: &Fixed, pi: &Fixed) -> Derived {
    let phi = phi_series.phi(rho);
    let dphi = phi_series.dphi(rho);
    let a = (rho + &Fixed::one()).div_int(2);
    let e = (&a + &phi).exp();
    // E_z = 1 + e^{a+Φ} Φ'(ρ), E_yy = e^{a+Φ}
    let ez = &Fixed::one() + &(&e * &dphi);
    let two_pi = pi.mul_int(2);
    let c_a = (&(rho * &ez) / &(&two_pi * &e)).sqrt();
    let var_xi = a.mul_int(2);
    let mean_zeta = &(&e * &(rho * &dphi)) / &a;
    let p00 = rho / &a;
    let denom = &p00 + &mean_zeta;
    let sigma = (&var_xi / &denom).sqrt();
    let c_z = (&denom / &(&two_pi * &var_xi)).sqrt();
    let ey = &e - &Fixed::one();
    Derived { a, c_a, var_xi, mean_zeta, p00, sigma, c_z, phi, dphi, ey }
}

/// Tolerance used by [`default_constants`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// The constants at the default order and tolerance, computed once per process.
pub fn default_constants() -> &'static Constants {
    static CELL: OnceLock<Constants> = OnceLock::new();
    CELL.get_or_init(|| find_constants(DEFAULT_TOL).expect("default truncation order brackets rho"))
}

/// Locates ρ with the default truncation order and checks that both
/// residuals are below `tol`.
pub fn find_constants(tol: f64) -> Result<Constants> {
    find_constants_with_order(DEFAULT_ORDER, tol)
}

pub fn find_constants_with_order(order: usize, tol: f64) -> Result<Constants> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    let table = unlabelled_counts(order)?;
    let phi_series = PhiSeries::new(&table);
    let tb = phi_series.truncation_bound();
    if tb >= tol {
        return Err(Error::Bracket(format!("truncation order {order} too low: tail bound {tb:e} ≥ {tol:e}")));
    }
    let target = &Fixed::ln2().mul_int(2) - &Fixed::one();
    let f = |x: &Fixed| &(x + &phi_series.phi(x).mul_int(2)) - &target;

    let mut lo = Fixed::zero();
    let mut hi = Fixed::ratio(1, 2);
    if !f(&lo).is_negative() || f(&hi).is_negative() {
        return Err(Error::Bracket(format!("no sign change on [0, 1/2] at truncation order {order}")));
    }
    for _ in 0..250 {
        let mid = (&lo + &hi).div_int(2);
        if f(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = (&lo + &hi).div_int(2);
    let pi = Fixed::pi();
    let d = derive(&phi_series, &rho, &pi);
    let residual_reduced = f(&rho).abs();
    let residual_ey = (&d.ey - &Fixed::one()).abs();

    let width = (&hi - &lo).to_f64();
    // the bisection function has slope ≥ 1 in ρ
    let rho_error = width + 2.0 * tb;
    let (d_lo, d_hi) = (derive(&phi_series, &lo, &pi), derive(&phi_series, &hi, &pi));
    let spread = [
        (&d_hi.c_a - &d_lo.c_a).abs(),
        (&d_hi.sigma - &d_lo.sigma).abs(),
        (&d_hi.c_z - &d_lo.c_z).abs(),
        (&d_hi.mean_zeta - &d_lo.mean_zeta).abs(),
    ]
    .iter()
    .map(Fixed::to_f64)
    .fold(0.0, f64::max);
    // derived constants are smooth in ρ and Φ with slopes well below 100
    let derived_error = spread + 100.0 * (rho_error + tb);

    if residual_reduced.to_f64() >= tol || residual_ey.to_f64() >= tol {
        return Err(Error::Bracket(format!(
            "residuals {:e} / {:e} exceed tolerance {tol:e}",
            residual_reduced.to_f64(),
            residual_ey.to_f64()
        )));
    }
    let rho_f = rho.to_f64();
    if !(rho_f > 0.0 && rho_f < 1.0) {
        return Err(Error::OutOfRange(format!("rho = {rho_f} outside (0, 1)")));
    }
    Ok(Constants {
        order,
        rho,
        a_rho: d.a,
        phi_rho: d.phi,
        dphi_rho: d.dphi,
        c_a: d.c_a,
        var_xi: d.var_xi,
        mean_zeta: d.mean_zeta,
        p00: d.p00,
        sigma: d.sigma,
        c_z: d.c_z,
        residual_ey,
        residual_reduced,
        rho_error,
        derived_error,
        truncation_bound: tb,
        table,
    })
}

impl Constants {
    pub fn rho_f64(&self) -> f64 {
        self.rho.to_f64()
    }

    pub fn phi_series(&self) -> PhiSeries {
        PhiSeries::new(&self.table)
    }

    /// `A(ρ^m)` for `m = 0..=max_m` (`m = 0` gives `A(1) = ∞`, stored as NaN).
    pub fn a_at_powers(&self, max_m: usize) -> Vec<f64> {
        let ps = self.phi_series();
        let mut out = vec![f64::NAN; max_m + 1];
        let mut x = self.rho.clone();
        for (m, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = if m == 1 { self.a_rho.to_f64() } else { ps.a_at(&x).to_f64() };
            x = &x * &self.rho;
        }
        out
    }

    pub fn report(&self) -> ConstantsReport {
        let v = |x: &Fixed, err: f64| Reported { value: x.to_f64(), decimal: x.to_decimal(40), error_bound: err };
        ConstantsReport {
            order: self.order,
            rho: v(&self.rho, self.rho_error),
            a_rho: v(&self.a_rho, self.rho_error / 2.0),
            phi_rho: v(&self.phi_rho, self.truncation_bound + self.rho_error),
            c_a: v(&self.c_a, self.derived_error),
            sigma: v(&self.sigma, self.derived_error),
            var_xi: v(&self.var_xi, self.rho_error),
            mean_zeta: v(&self.mean_zeta, self.derived_error),
            p00: v(&self.p00, self.derived_error),
            c_z: v(&self.c_z, self.derived_error),
            residual_ey: self.residual_ey.to_f64(),
            residual_reduced: self.residual_reduced.to_f64(),
            truncation_bound: self.truncation_bound,
        }
    }
}

/// One constant: value, 40 decimal digits, and an error bound.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Reported {
    pub value: f64,
    pub decimal: String,
    pub error_bound: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConstantsReport {
    pub order: usize,
    pub rho: Reported,
    pub a_rho: Reported,
    pub phi_rho: Reported,
    pub c_a: Reported,
    pub sigma: Reported,
    pub var_xi: Reported,
    pub mean_zeta: Reported,
    pub p00: Reported,
    pub c_z: Reported,
    pub residual_ey: f64,
    pub residual_reduced: f64,
    pub truncation_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::series::scaled_unlabelled;

    fn plain_f64_phi(a: &[f64], x: f64) -> f64 {
        (2..200).map(|i| a.iter().enumerate().map(|(n, c)| c * x.powi((i * n) as i32)).sum::<f64>() / i as f64).sum()
    }

    #[test]
    fn rho_in_unit_interval_and_residual_small() {
        let c = find_constants(1e-10).unwrap();
        let rho = c.rho_f64();
        assert!(rho > 0.0 && rho < 1.0);
        assert!(c.residual_ey.to_f64() < 1e-30);
        assert!(c.rho_error < 1e-30);
    }

    #[test]
    fn agrees_with_plain_float_bisection() {
        let t = unlabelled_counts(40).unwrap();
        let a = t.to_f64();
        let target = 2.0 * std::f64::consts::LN_2 - 1.0;
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid + 2.0 * plain_f64_phi(&a, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = find_constants(1e-10).unwrap();
        assert!((c.rho_f64() - lo).abs() < 1e-13);
    }

    #[test]
    fn a_rho_matches_partial_sums() {
        // Σ_{n≤N} A_n ρ^n plus the tail c_A Σ_{n>N} n^{-3/2} ≈ 2 c_A / √N
        let c = find_constants(1e-10).unwrap();
        let n = 4000;
        let s: f64 = scaled_unlabelled(n, c.rho_f64()).iter().sum();
        let tail = 2.0 * c.c_a.to_f64() / (n as f64 + 0.5).sqrt();
        assert!((s + tail - c.a_rho.to_f64()).abs() < 2e-4, "{} vs {}", s + tail, c.a_rho.to_f64());
    }

    #[test]
    fn bracket_failure_at_tiny_order() {
        assert!(matches!(find_constants_with_order(1, 1e-10), Err(Error::Bracket(_))));
    }

    #[test]
    fn bad_tolerance() {
        assert!(find_constants(0.0).is_err());
    }

    #[test]
    fn closed_form_relations() {
        let c = find_constants(1e-10).unwrap();
        let sigma = c.sigma.to_f64();
        let cz = c.c_z.to_f64();
        assert!((cz * sigma * (2.0 * std::f64::consts::PI).sqrt() - 1.0).abs() < 1e-14);
        assert!((c.var_xi.to_f64() - (c.rho_f64() + 1.0)).abs() < 1e-15);
    }
}
