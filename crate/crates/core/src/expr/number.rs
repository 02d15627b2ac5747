//! Numeric constants: exact rationals, plus floats for literals that were
//! written with a decimal point.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Number {
    Rat(BigRational),
    Float(f64),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rat(p: i64, q: i64) -> Self {
        Number::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Self {
        Number::int(0)
    }

    pub fn one() -> Self {
        Number::int(1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Rat(r) => r.is_zero(),
            Number::Float(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Number::Rat(r) => r.is_one(),
            Number::Float(f) => *f == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Number::Rat(r) => r.is_negative(),
            Number::Float(f) => *f < 0.0,
        }
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Number::Float(_))
    }

    /// The value as an integer, if it is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Number::Rat(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|i| i.to_i64())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Rat(r) => rat_to_f64(r),
            Number::Float(f) => *f,
        }
    }

    pub fn abs(&self) -> Number {
        match self {
            Number::Rat(r) => Number::Rat(r.abs()),
            Number::Float(f) => Number::Float(f.abs()),
        }
    }

    pub fn add(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => Number::Rat(a + b),
            _ => Number::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => Number::Rat(a * b),
            _ => Number::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Number {
        match self {
            Number::Rat(r) => Number::Rat(-r),
            Number::Float(f) => Number::Float(-f),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Number::Rat(r) => Number::Rat(r.recip()),
            Number::Float(f) => Number::Float(1.0 / f),
        })
    }

    /// `self^exp` when the result is representable exactly (or `self` is a
    /// float). Returns `None` for fractional powers of rationals and for
    /// negative powers of zero.
    pub fn pow(&self, exp: &Number) -> Option<Number> {
        match (self, exp) {
            (Number::Rat(base), Number::Rat(e)) => {
                if !e.is_integer() {
                    return None;
                }
                let e = e.to_integer().to_i32()?;
                if base.is_zero() && e < 0 {
                    return None;
                }
                if e.unsigned_abs() > 4096 {
                    return None;
                }
                Some(Number::Rat(num_traits::pow::Pow::pow(base, e)))
            }
            _ => {
                let b = self.to_f64();
                let e = exp.to_f64();
                if b == 0.0 && e < 0.0 {
                    return None;
                }
                if b < 0.0 && e.fract() != 0.0 {
                    return None;
                }
                Some(Number::Float(b.powf(e)))
            }
        }
    }

    /// Closest rational with denominator at most `max_den`, if it lies within
    /// `tol` of `value`.
    pub fn rationalize(value: f64, max_den: i64, tol: f64) -> Option<Number> {
        if !value.is_finite() {
            return None;
        }
        for q in 1..=max_den {
            let p = (value * q as f64).round();
            if (p / q as f64 - value).abs() <= tol && p.abs() < 1e15 {
                return Some(Number::rat(p as i64, q));
            }
        }
        None
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge numerator/denominator: scale down before dividing.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => a == b,
            (Number::Float(a), Number::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Number {}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Number::Rat(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Number::Float(f) => {
                1u8.hash(state);
                f.to_bits().hash(state);
            }
        }
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Rat(a), Number::Rat(b)) => a.cmp(b),
            (Number::Float(a), Number::Float(b)) => a.total_cmp(b),
            (Number::Rat(_), Number::Float(_)) => {
                self.to_f64().total_cmp(&other.to_f64()).then(Ordering::Less)
            }
            (Number::Float(_), Number::Rat(_)) => {
                self.to_f64().total_cmp(&other.to_f64()).then(Ordering::Greater)
            }
        }
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Float(x) => {
                let s = format!("{}", x);
                if s.contains('.') || s.contains("inf") || s.contains("NaN") {
                    f.write_str(&s)
                } else {
                    write!(f, "{}.0", s)
                }
            }
        }
    }
}

impl From<i64> for Number {
    fn from(n: i64) -> Self {
        Number::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic() {
        let half = Number::rat(1, 2);
        let third = Number::rat(1, 3);
        assert_eq!(half.add(&third), Number::rat(5, 6));
        assert_eq!(half.mul(&third), Number::rat(1, 6));
        assert_eq!(Number::int(2).pow(&Number::int(-2)), Some(Number::rat(1, 4)));
        assert_eq!(Number::int(2).pow(&half), None);
        assert_eq!(Number::zero().pow(&Number::int(-1)), None);
    }

    #[test]
    fn float_contaminates() {
        let x = Number::Float(0.5).add(&Number::int(1));
        assert!(x.is_float());
        assert_eq!(x.to_f64(), 1.5);
    }

    #[test]
    fn float_display_keeps_point() {
        assert_eq!(Number::Float(2.0).to_string(), "2.0");
        assert_eq!(Number::Float(1e-10).to_string(), "0.0000000001");
    }

    #[test]
    fn rationalize_small_denominators() {
        assert_eq!(Number::rationalize(-0.4999999999, 64, 1e-8), Some(Number::rat(-1, 2)));
        assert_eq!(Number::rationalize(std::f64::consts::PI, 64, 1e-8), None);
    }
}
