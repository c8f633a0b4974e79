//! Numeric contexts: `f64` with an absolute/relative tolerance, and exact
//! `BigRational` arithmetic.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Tolerance used by comparisons in the float context.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

pub trait Scalar:
    num::Num + Signed + Clone + PartialOrd + ToPrimitive + fmt::Debug + Send + Sync + 'static
{
    /// True when arithmetic in this context is exact.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Equality up to the context tolerance.
    fn near(&self, other: &Self) -> bool;

    /// Square root when it is representable in this context.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Strict sign tests; `Signed::is_positive` counts `0.0` as positive.
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn near(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= FLOAT_TOLERANCE * scale
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = perfect_sqrt(self.numer())?;
        let d = perfect_sqrt(self.denom())?;
        Some(Rational::new(n, d))
    }
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `f64` for a rational, accurate to a few ulps for huge numerators and
/// denominators; underflows to 0 and overflows to infinity.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.007_199_254_740_992e15 && d < 9.007_199_254_740_992e15 {
            return n / d;
        }
    }
    let top = |x: &BigInt| {
        let shift = x.bits().saturating_sub(64);
        ((x >> shift).to_f64().unwrap_or(f64::NAN), shift as i64)
    };
    let (n, sn) = top(q.numer());
    let (d, sd) = top(q.denom());
    let e = (sn - sd).clamp(-4000, 4000) as i32;
    // Two steps so that 2^e itself does not overflow before the product does.
    (n / d) * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
}

/// Natural logarithm of a positive big integer.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &Rational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as an exact rational")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"p/q"`, integers, and decimals such as `"-0.25"` or `"1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    if neg {
        num = -num;
    }
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        Rational::from_integer(num * num::pow(ten, scale as usize))
    } else {
        Rational::new(num, num::pow(ten, (-scale) as usize))
    };
    Ok(q)
}

/// `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Floor of a rational as a big integer.
pub fn floor_rational(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_roundtrip() {
        for q in [rat(1, 3), int(-7), rat(22, 7)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(rat(9, 4).sqrt_exact(), Some(rat(3, 2)));
        assert_eq!(rat(2, 1).sqrt_exact(), None);
    }

    #[test]
    fn logs_of_huge_values() {
        let big = num::pow(BigInt::from(5), 2000);
        let l = ln_bigint(&big);
        assert!((l - 2000.0 * 5f64.ln()).abs() < 1e-9 * l);
        let q = Rational::new(BigInt::one(), big);
        assert!(rational_to_f64(&q) == 0.0);
    }

    #[test]
    fn huge_ratios_convert_accurately() {
        let d = num::pow(BigInt::from(3), 700);
        let q = Rational::new(&d * BigInt::from(2), d * BigInt::from(7));
        assert!((rational_to_f64(&q) - 2.0 / 7.0).abs() < 4.0 * f64::EPSILON);
        let tiny = Rational::new(BigInt::one(), num::pow(BigInt::from(2), 1000));
        assert_eq!(rational_to_f64(&tiny), 2f64.powi(-1000));
    }
}
