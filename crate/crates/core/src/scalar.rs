//! Coefficient scalars: exact complex rationals and complex floats.
//!
//! All identity checks run on [`ExactC`] (complex numbers with
//! `BigRational` parts, equality with no tolerance); spectra and geometry
//! run on [`C64`]. Polynomial code is generic over [`Scalar`] so the same
//! algebra serves both kinds.

use num::complex::Complex64;
use num::{BigInt, BigRational, Complex, One, Signed, ToPrimitive, Zero};

/// Exact rational.
pub type Rat = BigRational;
/// Exact complex rational.
pub type ExactC = Complex<BigRational>;
/// Double-precision complex.
pub type C64 = Complex64;

/// Coefficient ring shared by the exact and float polynomial stacks.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Embed the rational `num/den`.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_c64(&self) -> C64;

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.mul(&Self::from_ratio(num, den))
    }
}

impl Scalar for ExactC {
    fn zero() -> Self {
        Complex::new(Rat::zero(), Rat::zero())
    }
    fn one() -> Self {
        Complex::new(Rat::one(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(rat(num, den), Rat::zero())
    }
    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        C64::new(self.re, -self.im)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}

/// Rational `num/den` from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from(BigInt::from(v))
}

/// Convert a rational to f64, falling back to a quotient of big-float
/// approximations when numerator or denominator overflow f64 directly.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale down by a common power of two until both parts convert.
    let mut numer = r.numer().clone();
    let mut denom = r.denom().clone();
    while numer.to_f64().map_or(true, |v| !v.is_finite())
        || denom.to_f64().map_or(true, |v| !v.is_finite())
    {
        numer >>= 64;
        denom >>= 64;
        if numer.is_zero() || denom.is_zero() {
            return 0.0;
        }
    }
    numer.to_f64().unwrap() / denom.to_f64().unwrap()
}

/// n! as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// |c|^2 = c * conj(c) as an exact rational.
pub fn abs_sq(c: &ExactC) -> Rat {
    &c.re * &c.re + &c.im * &c.im
}

/// Nearest rational with denominator `2^bits` (round toward zero).
pub fn rationalize(x: f64, bits: u32) -> Rat {
    let den = BigInt::one() << bits;
    let scaled = x * (2f64.powi(bits as i32));
    let num = BigInt::from(scaled.trunc() as i64);
    Rat::new(num, den)
}

/// Parse a rational of the form `p` or `p/q` in decimal.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rat::from(p))
        }
    }
}

/// Render a rational as `p` or `p/q`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True if `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(32, 2), BigInt::from(496));
        assert_eq!(binomial(4, 7), BigInt::zero());
    }

    #[test]
    fn rational_round_trip() {
        let r = rat(-7, 3);
        assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        assert_eq!(parse_rat("5").unwrap(), rat_int(5));
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn exact_scalar_ops() {
        let a = ExactC::new(rat(1, 2), rat(1, 3));
        let b = Scalar::conj(&a);
        let prod = Scalar::mul(&a, &b);
        assert_eq!(prod.re, rat(13, 36));
        assert!(prod.im.is_zero());
        assert_eq!(abs_sq(&a), rat(13, 36));
    }

    #[test]
    fn rationalize_fixed_denominator() {
        let r = rationalize(0.5, 24);
        assert_eq!(r, rat(1, 2));
        let r = rationalize(-0.3, 24);
        assert!((rat_to_f64(&r) + 0.3).abs() < 1e-6);
    }
}
