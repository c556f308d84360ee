//! Dual-mode scalars: exact rational arithmetic where the data allows it,
//! f64 otherwise.
//!
//! Every quantity in the pipeline is carried as a [`Num`], which keeps an
//! exact [`BigRational`] alongside an f64 shadow. Arithmetic stays exact as
//! long as both operands are exact; taking a p-th power for non-integer `p`,
//! or a p-th root of a non-perfect power, drops to float. Comparisons on
//! exact values are decided exactly; float comparisons carry a tolerance.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub type Rat = BigRational;

/// Tolerance for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Parse a number written as `num/den`, an integer, or a decimal
/// (optionally with an `e` exponent). Decimals are read exactly.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty numeric field".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    // decimal / scientific
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(Error::Parse(format!("bad number {s:?}")));
    }
    let n = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rat::from_integer(n * ten.pow(shift as u32))
    } else {
        Rat::new(n, ten.pow((-shift) as u32))
    })
}

/// Format a rational as `num/den`, or a bare integer when the denominator is 1.
pub fn format_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back through a quotient of floats for extreme magnitudes
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// The norm exponent `p >= 1`, kept as an exact rational.
#[derive(Clone, Debug, PartialEq)]
pub struct PNorm {
    value: Rat,
    approx: f64,
}

impl PNorm {
    pub fn new(value: Rat) -> Result<Self, Error> {
        if value < Rat::one() {
            return Err(Error::Validation(format!(
                "norm exponent p must be >= 1, got {}",
                format_rat(&value)
            )));
        }
        let approx = rat_to_f64(&value);
        Ok(PNorm { value, approx })
    }

    pub fn rat(&self) -> &Rat {
        &self.value
    }

    pub fn f64(&self) -> f64 {
        self.approx
    }

    /// `Some(k)` when p is a (small) positive integer; exact arithmetic applies.
    pub fn as_int(&self) -> Option<u32> {
        if self.value.is_integer() {
            self.value.numer().to_u32()
        } else {
            None
        }
    }
}

/// A scalar carried in exact and float form simultaneously.
#[derive(Clone, Debug)]
pub struct Num {
    exact: Option<Rat>,
    approx: f64,
}

impl Num {
    pub fn from_rat(q: Rat) -> Self {
        let approx = rat_to_f64(&q);
        Num {
            exact: Some(q),
            approx,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Num::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn from_f64(x: f64) -> Self {
        Num {
            exact: None,
            approx: x,
        }
    }

    pub fn zero() -> Self {
        Num::from_int(0)
    }

    pub fn one() -> Self {
        Num::from_int(1)
    }

    pub fn exact(&self) -> Option<&Rat> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn f64(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_zero(),
            None => self.approx == 0.0,
        }
    }

    pub fn add(&self, other: &Num) -> Num {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Num::from_rat(a + b),
            _ => Num::from_f64(self.approx + other.approx),
        }
    }

    pub fn sub(&self, other: &Num) -> Num {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Num::from_rat(a - b),
            _ => Num::from_f64(self.approx - other.approx),
        }
    }

    pub fn mul(&self, other: &Num) -> Num {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Num::from_rat(a * b),
            _ => Num::from_f64(self.approx * other.approx),
        }
    }

    pub fn div(&self, other: &Num) -> Num {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) if !b.is_zero() => Num::from_rat(a / b),
            _ => Num::from_f64(self.approx / other.approx),
        }
    }

    pub fn neg(&self) -> Num {
        match &self.exact {
            Some(a) => Num::from_rat(-a),
            None => Num::from_f64(-self.approx),
        }
    }

    pub fn abs(&self) -> Num {
        match &self.exact {
            Some(a) => Num::from_rat(a.abs()),
            None => Num::from_f64(self.approx.abs()),
        }
    }

    /// |self|^p. Exact when self is exact and p is a positive integer.
    pub fn abs_pow(&self, p: &PNorm) -> Num {
        match (&self.exact, p.as_int()) {
            (Some(q), Some(k)) => Num::from_rat(pow_rat(&q.abs(), k)),
            _ => Num::from_f64(self.approx.abs().powf(p.f64())),
        }
    }

    /// self^(1/p). Exact only when self is an exact perfect p-th power.
    pub fn root(&self, p: &PNorm) -> Num {
        if let (Some(q), Some(k)) = (&self.exact, p.as_int()) {
            if k == 1 {
                return self.clone();
            }
            if let Some(r) = rat_nth_root(q, k) {
                return Num::from_rat(r);
            }
        }
        Num::from_f64(self.approx.powf(1.0 / p.f64()))
    }

    /// self ≤ other, exactly when both sides are exact, else with tolerance.
    pub fn le(&self, other: &Num) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a <= b,
            _ => self.approx <= other.approx + FLOAT_TOL * other.approx.abs().max(1.0),
        }
    }

    /// self > other (strict), the complement of [`Num::le`].
    pub fn gt(&self, other: &Num) -> bool {
        !self.le(other)
    }

    /// self < other, exactly or with tolerance.
    pub fn lt(&self, other: &Num) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a < b,
            _ => self.approx < other.approx - FLOAT_TOL * other.approx.abs().max(1.0),
        }
    }

    /// Equality up to the float tolerance; exact when both sides are.
    pub fn approx_eq(&self, other: &Num) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => {
                let scale = self.approx.abs().max(other.approx.abs()).max(1.0);
                (self.approx - other.approx).abs() <= FLOAT_TOL * scale
            }
        }
    }
}

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.approx == other.approx,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) => write!(f, "{}", format_rat(q)),
            None => write!(f, "{:e}", self.approx),
        }
    }
}

/// q^k for a nonnegative integer exponent.
pub fn pow_rat(q: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= q;
    }
    acc
}

/// Exact q^e for a rational exponent, when q is a perfect power; float otherwise.
pub fn rat_pow_num(q: &Rat, e: &Rat) -> Num {
    if e.is_zero() {
        return Num::one();
    }
    if e.is_integer() {
        if let Some(k) = e.numer().to_i64() {
            if (0..=4096).contains(&k) {
                return Num::from_rat(pow_rat(q, k as u32));
            }
            if (-4096..0).contains(&k) && !q.is_zero() {
                return Num::from_rat(Rat::one() / pow_rat(q, (-k) as u32));
            }
        }
    }
    // q^(a/b): exact only when q^a has an exact b-th root
    if let (Some(a), Some(b)) = (e.numer().to_i64(), e.denom().to_u32()) {
        if a.unsigned_abs() <= 64 && b <= 64 {
            let base = pow_rat(q, a.unsigned_abs() as u32);
            let base = if a < 0 && !base.is_zero() {
                Rat::one() / base
            } else {
                base
            };
            if let Some(r) = rat_nth_root(&base, b) {
                return Num::from_rat(r);
            }
        }
    }
    Num::from_f64(rat_to_f64(q).powf(rat_to_f64(e)))
}

/// Exact k-th root of a nonnegative rational, when it exists.
pub fn rat_nth_root(q: &Rat, k: u32) -> Option<Rat> {
    if q.is_negative() || k == 0 {
        return None;
    }
    let n = q.numer().nth_root(k);
    let d = q.denom().nth_root(k);
    if pow_rat(&Rat::new(n.clone(), d.clone()), k) == *q {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

/// Builds a rational from sign/magnitude integer parts, convenience for tests.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0);
    let sign = if (n < 0) != (d < 0) {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let _ = sign;
    Rat::new(BigInt::from(n), BigInt::from(d))
}
