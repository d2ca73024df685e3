//! Binary fixed-point reals with 256 fractional bits.
//!
//! Just enough arithmetic for the singularity constants: ring operations,
//! division, `exp`, `sqrt`, `ln 2` and `pi`. Values are `mantissa / 2^256`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u32 = 256;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed {
    m: BigInt,
}

impl Fixed {
    pub fn zero() -> Self {
        Fixed { m: BigInt::zero() }
    }

    pub fn one() -> Self {
        Fixed::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Fixed { m: BigInt::from(v) << FRAC_BITS }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Fixed { m: v << FRAC_BITS }
    }

    /// Nearest-below fixed-point value of `num / den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Fixed { m: (BigInt::from(num) << FRAC_BITS) / BigInt::from(den) }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Fixed { m: (q.numer() << FRAC_BITS) / q.denom() }
    }

    pub fn from_f64(x: f64) -> Self {
        let q = BigRational::from_float(x).expect("finite float");
        Fixed::from_rational(&q)
    }

    /// The unit in the last place, `2^-256`.
    pub fn ulp() -> Self {
        Fixed { m: BigInt::one() }
    }

    pub fn to_f64(&self) -> f64 {
        // shift first so the conversion never overflows
        let shift = FRAC_BITS - 64;
        let top = (&self.m >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(-64)
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Self {
        Fixed { m: self.m.abs() }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Fixed { m: &self.m * k }
    }

    pub fn div_int(&self, k: i64) -> Self {
        Fixed { m: &self.m / k }
    }

    pub fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Fixed::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of a negative number");
        Fixed { m: (&self.m << FRAC_BITS).sqrt() }
    }

    /// `e^x` by halving the argument below 2^-16, summing the Taylor series
    /// and squaring back.
    pub fn exp(&self) -> Self {
        const GUARD: u32 = 48;
        let bits = FRAC_BITS + GUARD;
        let threshold = BigInt::one() << (bits - 16);
        let mut x = &self.m << GUARD;
        let mut halvings = 0u32;
        while x.abs() > threshold {
            x >>= 1;
            halvings += 1;
        }
        let mut term = BigInt::one() << bits;
        let mut sum = term.clone();
        let mut k = 1i64;
        while !term.is_zero() {
            term = (&term * &x >> bits) / k;
            sum += &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = &sum * &sum >> bits;
        }
        Fixed { m: sum >> GUARD }
    }

    /// `ln 2 = Σ_{k≥1} 1 / (k 2^k)`.
    pub fn ln2() -> Self {
        let bits = FRAC_BITS + 16;
        let mut sum = BigInt::zero();
        let mut pow = BigInt::one() << bits;
        let mut k = 1i64;
        loop {
            pow >>= 1;
            let term = &pow / k;
            if term.is_zero() {
                break;
            }
            sum += term;
            k += 1;
        }
        Fixed { m: sum >> 16 }
    }

    /// Machin's formula `pi = 16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi() -> Self {
        fn atan_inv(x: i64, bits: u32) -> BigInt {
            let mut power = (BigInt::one() << bits) / x;
            let x2 = x * x;
            let mut sum = power.clone();
            let mut k = 1i64;
            loop {
                power /= x2;
                let term = &power / (2 * k + 1);
                if term.is_zero() {
                    return sum;
                }
                if k % 2 == 1 {
                    sum -= term;
                } else {
                    sum += term;
                }
                k += 1;
            }
        }
        let bits = FRAC_BITS + 16;
        let m = atan_inv(5, bits) * 16 - atan_inv(239, bits) * 4;
        Fixed { m: m >> 16 }
    }

    /// Decimal expansion truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = (self.m.abs() * BigInt::from(10).pow(digits as u32)) >> FRAC_BITS;
        let s = scaled.to_string();
        let s = format!("{s:0>width$}", width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(40))
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(30)))
    }
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, o: &Fixed) -> Fixed {
        Fixed { m: &self.m + &o.m }
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, o: &Fixed) -> Fixed {
        Fixed { m: &self.m - &o.m }
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, o: &Fixed) -> Fixed {
        Fixed { m: (&self.m * &o.m) >> FRAC_BITS }
    }
}

impl Div for &Fixed {
    type Output = Fixed;
    fn div(self, o: &Fixed) -> Fixed {
        Fixed { m: (&self.m << FRAC_BITS) / &o.m }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { m: -&self.m }
    }
}

macro_rules! by_value {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Fixed {
            type Output = Fixed;
            fn $f(self, o: Fixed) -> Fixed { (&self).$f(&o) }
        }
        impl $tr<&Fixed> for Fixed {
            type Output = Fixed;
            fn $f(self, o: &Fixed) -> Fixed { (&self).$f(o) }
        }
        impl $tr<Fixed> for &Fixed {
            type Output = Fixed;
            fn $f(self, o: Fixed) -> Fixed { self.$f(&o) }
        }
    )*};
}
by_value!(Add add, Sub sub, Mul mul, Div div);

impl PartialEq<f64> for Fixed {
    fn eq(&self, o: &f64) -> bool {
        self.to_f64() == *o
    }
}

impl PartialOrd<f64> for Fixed {
    fn partial_cmp(&self, o: &f64) -> Option<Ordering> {
        self.to_f64().partial_cmp(o)
    }
}
