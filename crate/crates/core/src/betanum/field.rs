//! Exact arithmetic in Q(beta) for a root of `x^2 = a x + b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};

use super::BetaError;
use crate::scalar::{format_rational, int, parse_rational, rational_to_f64, Rational};

/// `beta^2 = a beta + b` with `1 <= b <= a`, so the conjugate lies in `(-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticBase {
    a: u32,
    b: u32,
}

impl QuadraticBase {
    pub fn new(a: u32, b: u32) -> Result<Self, BetaError> {
        if b < 1 || b > a {
            return Err(BetaError::InvalidBase(format!("need 1 <= b <= a, got a={a}, b={b}")));
        }
        let disc = u64::from(a) * u64::from(a) + 4 * u64::from(b);
        let r = disc.isqrt();
        if r * r == disc {
            return Err(BetaError::InvalidBase(format!("a^2 + 4b = {disc} is a perfect square")));
        }
        // Conjugate in (-1, 0): P(0) = -b < 0 and P(-1) = 1 + a - b > 0.
        Ok(QuadraticBase { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn discriminant(&self) -> u64 {
        u64::from(self.a) * u64::from(self.a) + 4 * u64::from(self.b)
    }

    pub fn beta_f64(&self) -> f64 {
        (f64::from(self.a) + (self.discriminant() as f64).sqrt()) / 2.0
    }

    pub fn conjugate_f64(&self) -> f64 {
        f64::from(self.a) - self.beta_f64()
    }

    pub fn beta(&self) -> BetaNumber {
        BetaNumber::new(*self, Rational::zero(), Rational::one())
    }

    pub fn from_int(&self, n: i64) -> BetaNumber {
        BetaNumber::new(*self, int(n), Rational::zero())
    }

    pub fn from_rational(&self, q: Rational) -> BetaNumber {
        BetaNumber::new(*self, q, Rational::zero())
    }

    /// `beta^k` for `k >= 0`.
    pub fn beta_pow(&self, k: u32) -> BetaNumber {
        let mut x = self.from_int(1);
        let b = self.beta();
        for _ in 0..k {
            x = &x * &b;
        }
        x
    }

    /// `beta` to within `10^-digits`, as a rational.
    pub fn beta_approx(&self, digits: u32) -> Rational {
        let scale = num::pow(BigInt::from(10), digits as usize);
        let root = (BigInt::from(self.discriminant()) * &scale * &scale).sqrt();
        (Rational::from_integer(BigInt::from(self.a)) + Rational::new(root, scale)) / int(2)
    }
}

/// `u + v beta` with rational `u`, `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BetaNumber {
    base: QuadraticBase,
    pub u: Rational,
    pub v: Rational,
}

impl BetaNumber {
    pub fn new(base: QuadraticBase, u: Rational, v: Rational) -> Self {
        BetaNumber { base, u, v }
    }

    pub fn base(&self) -> QuadraticBase {
        self.base
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// The value as a rational integer, when it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        (self.v.is_zero() && self.u.is_integer()).then(|| self.u.to_integer())
    }

    /// Exact sign, decided in rationals only.
    pub fn signum(&self) -> i8 {
        let sign_of = |q: &Rational| match q.cmp(&Rational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        if self.v.is_zero() {
            return sign_of(&self.u);
        }
        // u + v beta > 0 iff beta > t (v > 0) or beta < t (v < 0), with t = -u/v.
        let t = -self.u.clone() / self.v.clone();
        let a = int(i64::from(self.base.a));
        let b = int(i64::from(self.base.b));
        let p = t.clone() * t.clone() - a.clone() * t.clone() - b;
        let beta_above_t = !(p.is_positive() && t * int(2) > a);
        let s = if beta_above_t { 1 } else { -1 };
        if self.v.is_positive() {
            s
        } else {
            -s
        }
    }

    pub fn try_cmp(&self, other: &BetaNumber) -> Result<Ordering, BetaError> {
        if self.base != other.base {
            return Err(BetaError::BaseMismatch);
        }
        Ok(match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Galois conjugate `u + v beta'`.
    pub fn conjugate(&self) -> BetaNumber {
        let a = int(i64::from(self.base.a));
        BetaNumber::new(self.base, self.u.clone() + self.v.clone() * a, -self.v.clone())
    }

    /// Field norm `u^2 + a u v - b v^2`.
    pub fn norm(&self) -> Rational {
        let a = int(i64::from(self.base.a));
        let b = int(i64::from(self.base.b));
        self.u.clone() * self.u.clone() + a * self.u.clone() * self.v.clone() - b * self.v.clone() * self.v.clone()
    }

    pub fn inv(&self) -> Result<BetaNumber, BetaError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(BetaError::DivisionByZero);
        }
        let c = self.conjugate();
        Ok(BetaNumber::new(self.base, c.u / n.clone(), c.v / n))
    }

    pub fn div(&self, other: &BetaNumber) -> Result<BetaNumber, BetaError> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, q: &Rational) -> BetaNumber {
        BetaNumber::new(self.base, self.u.clone() * q.clone(), self.v.clone() * q.clone())
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.to_rational_approx(40))
    }

    /// Value to within `|v| 10^-digits`.
    pub fn to_rational_approx(&self, digits: u32) -> Rational {
        self.u.clone() + self.v.clone() * self.base.beta_approx(digits)
    }

    /// Parses sums of terms such as `"1/2 + 3β"`, `"-beta"` or `"2 - b"`.
    pub fn parse(s: &str, base: QuadraticBase) -> Result<BetaNumber, BetaError> {
        let err = || BetaError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let chars: Vec<char> = t.chars().collect();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..chars.len() {
            let prev = chars[i - 1];
            if (chars[i] == '+' || chars[i] == '-') && !matches!(prev, 'e' | 'E' | '/' | '*' | '+' | '-') {
                terms.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(chars[start..].iter().collect::<String>());
        let mut out = base.from_int(0);
        for term in terms {
            let (coef, is_beta) = ["β", "beta", "b"]
                .iter()
                .find_map(|sym| term.strip_suffix(sym).map(|c| (c.to_string(), true)))
                .unwrap_or((term.clone(), false));
            let coef = coef.strip_suffix('*').unwrap_or(&coef);
            let q = match coef {
                "" | "+" if is_beta => Rational::one(),
                "-" if is_beta => -Rational::one(),
                c => parse_rational(c).map_err(|_| err())?,
            };
            if is_beta {
                out.v += q;
            } else {
                out.u += q;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BetaNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", format_rational(&self.u));
        }
        let coef = |q: &Rational| if q.abs().is_one() { String::new() } else { format_rational(&q.abs()) };
        let sign = if self.v.is_negative() { "-" } else { "+" };
        if self.u.is_zero() {
            let lead = if self.v.is_negative() { "-" } else { "" };
            write!(f, "{lead}{}β", coef(&self.v))
        } else {
            write!(f, "{}{sign}{}β", format_rational(&self.u), coef(&self.v))
        }
    }
}

fn same_base(x: &BetaNumber, y: &BetaNumber) -> QuadraticBase {
    assert_eq!(x.base, y.base, "mixing numbers from different bases");
    x.base
}

impl Add for &BetaNumber {
    type Output = BetaNumber;
    fn add(self, o: &BetaNumber) -> BetaNumber {
        BetaNumber::new(same_base(self, o), &self.u + &o.u, &self.v + &o.v)
    }
}

impl Sub for &BetaNumber {
    type Output = BetaNumber;
    fn sub(self, o: &BetaNumber) -> BetaNumber {
        BetaNumber::new(same_base(self, o), &self.u - &o.u, &self.v - &o.v)
    }
}

impl Neg for &BetaNumber {
    type Output = BetaNumber;
    fn neg(self) -> BetaNumber {
        BetaNumber::new(self.base, -self.u.clone(), -self.v.clone())
    }
}

impl Mul for &BetaNumber {
    type Output = BetaNumber;
    // (u + v beta)(x + y beta) = ux + b vy + (uy + vx + a vy) beta
    fn mul(self, o: &BetaNumber) -> BetaNumber {
        let base = same_base(self, o);
        let a = int(i64::from(base.a));
        let b = int(i64::from(base.b));
        let vy = &self.v * &o.v;
        BetaNumber::new(base, &self.u * &o.u + b * vy.clone(), &self.u * &o.v + &self.v * &o.u + a * vy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn golden() -> QuadraticBase {
        QuadraticBase::new(1, 1).unwrap()
    }

    #[test]
    fn rejects_invalid_bases() {
        assert!(QuadraticBase::new(1, 2).is_err());
        assert!(QuadraticBase::new(2, 0).is_err());
        assert!(QuadraticBase::new(3, 3).is_ok());
        assert!(QuadraticBase::new(4, 3).is_ok());
        // 5^2 + 4*6 = 49 is a square.
        assert!(QuadraticBase::new(5, 6).is_err());
    }

    #[test]
    fn golden_identities() {
        let g = golden();
        let beta = g.beta();
        let one = g.from_int(1);
        assert_eq!(&(&beta * &beta) - &beta, one);
        let frac = &beta - &g.from_int(1);
        assert_eq!(frac.signum(), 1);
        assert_eq!(beta.inv().unwrap(), frac);
        let alpha = g.from_int(1).div(&frac).unwrap();
        assert_eq!(alpha, beta);
        assert_eq!(one.try_cmp(&alpha).unwrap(), Ordering::Less);
        assert_eq!(g.from_int(0).signum(), 0);
    }

    #[test]
    fn sign_near_beta() {
        let g = golden();
        // 1.618033988... vs 1618034/1000000 and 1618033/1000000.
        let above = BetaNumber::new(g, rat(-1618034, 1000000), int(1));
        let below = BetaNumber::new(g, rat(-1618033, 1000000), int(1));
        assert_eq!(above.signum(), -1);
        assert_eq!(below.signum(), 1);
        // Negative conjugate root side: beta - t for t around -0.618.
        assert_eq!(BetaNumber::new(g, rat(618034, 1000000), int(1)).signum(), 1);
        assert_eq!(BetaNumber::new(g, rat(-618034, 1000000), int(-1)).signum(), -1);
    }

    #[test]
    fn parse_and_display() {
        let g = golden();
        for s in ["0", "1", "-1+β", "1/2-3/4β", "β", "-β", "2+2β"] {
            let x = BetaNumber::parse(s, g).unwrap();
            assert_eq!(BetaNumber::parse(&x.to_string(), g).unwrap(), x, "{s}");
        }
        assert_eq!(BetaNumber::parse("1e-2 + 2*beta", g).unwrap(), BetaNumber::new(g, rat(1, 100), int(2)));
        assert!(BetaNumber::parse("x", g).is_err());
    }
}
