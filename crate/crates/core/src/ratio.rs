//! Exact rational numbers over checked `i128`.
//!
//! Every quantity in a schedule (times, rates, byte positions) is a `Ratio`.
//! Values are kept in lowest terms with a positive denominator, so equality
//! is structural and serialized forms are canonical. Overflow panics; it is
//! never allowed to wrap.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatioError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as i128;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Exact division of values that mostly fit in 64 bits; i128 division is a
// slow library call.
#[inline]
fn div_small(a: i128, b: i128) -> i128 {
    if let (Ok(x), Ok(y)) = (i64::try_from(a), i64::try_from(b)) {
        if let Some(q) = x.checked_div(y) {
            return q as i128;
        }
    }
    a / b
}

#[track_caller]
fn overflow(op: &str) -> ! {
    panic!("rational overflow in {op}")
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Ratio, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        Ok(Ratio::reduced(num, den))
    }

    pub const fn integer(n: i128) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    /// `1/n`. Panics on `n == 0`.
    pub fn unit(n: i128) -> Ratio {
        Ratio::new(1, n).expect("unit fraction with zero denominator")
    }

    fn reduced(num: i128, den: i128) -> Ratio {
        let g = gcd(num, den);
        let (mut n, mut d) = (div_small(num, g), div_small(den, g));
        if d < 0 {
            n = n.checked_neg().unwrap_or_else(|| overflow("normalize"));
            d = d.checked_neg().unwrap_or_else(|| overflow("normalize"));
        }
        Ratio { num: n, den: d }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn floor(&self) -> i128 {
        if self.den == 1 {
            return self.num;
        }
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i128 {
        let f = self.floor();
        if f * self.den == self.num {
            f
        } else {
            f + 1
        }
    }

    pub fn abs(&self) -> Ratio {
        if self.num < 0 {
            -*self
        } else {
            *self
        }
    }

    pub fn recip(&self) -> Result<Ratio, RatioError> {
        Ratio::ONE.checked_div(*self)
    }

    pub fn checked_div(self, rhs: Ratio) -> Result<Ratio, RatioError> {
        if rhs.num == 0 {
            return Err(RatioError::DivisionByZero);
        }
        Ok(self.mul_parts(rhs.den, rhs.num))
    }

    pub fn min(self, other: Ratio) -> Ratio {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Ratio) -> Ratio {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion, for human-readable output only.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Fixed-point decimal rendering with `places` digits after the point,
    /// rounded half away from zero.
    pub fn to_decimal_string(&self, places: u32) -> String {
        let scale = 10i128
            .checked_pow(places)
            .unwrap_or_else(|| overflow("decimal scale"));
        let scaled_num = self
            .num
            .abs()
            .checked_mul(scale)
            .unwrap_or_else(|| overflow("decimal render"));
        let mut q = scaled_num / self.den;
        if (scaled_num % self.den) * 2 >= self.den {
            q += 1;
        }
        let sign = if self.num < 0 && q != 0 { "-" } else { "" };
        if places == 0 {
            return format!("{sign}{q}");
        }
        let int = q / scale;
        let frac = q % scale;
        format!("{sign}{int}.{frac:0width$}", width = places as usize)
    }

    // self * (n / d), with cross-reduction to keep intermediates small
    fn mul_parts(self, n: i128, d: i128) -> Ratio {
        let g1 = gcd(self.num, d);
        let g2 = gcd(n, self.den);
        let g1 = if g1 == 0 { 1 } else { g1 };
        let g2 = if g2 == 0 { 1 } else { g2 };
        let num = div_small(self.num, g1)
            .checked_mul(div_small(n, g2))
            .unwrap_or_else(|| overflow("mul"));
        let den = div_small(self.den, g2)
            .checked_mul(div_small(d, g1))
            .unwrap_or_else(|| overflow("mul"));
        Ratio::reduced(num, den)
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::ZERO
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Self {
        Ratio::integer(n as i128)
    }
}

impl From<u32> for Ratio {
    fn from(n: u32) -> Self {
        Ratio::integer(n as i128)
    }
}

impl From<u64> for Ratio {
    fn from(n: u64) -> Self {
        Ratio::integer(n as i128)
    }
}

impl Add for Ratio {
    type Output = Ratio;
    fn add(self, rhs: Ratio) -> Ratio {
        let g = gcd(self.den, rhs.den);
        let lhs_scale = div_small(rhs.den, g);
        let rhs_scale = div_small(self.den, g);
        let num = self
            .num
            .checked_mul(lhs_scale)
            .and_then(|a| {
                rhs.num
                    .checked_mul(rhs_scale)
                    .and_then(|b| a.checked_add(b))
            })
            .unwrap_or_else(|| overflow("add"));
        let den = self
            .den
            .checked_mul(lhs_scale)
            .unwrap_or_else(|| overflow("add"));
        Ratio::reduced(num, den)
    }
}

impl Sub for Ratio {
    type Output = Ratio;
    fn sub(self, rhs: Ratio) -> Ratio {
        self + (-rhs)
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio {
            num: self.num.checked_neg().unwrap_or_else(|| overflow("neg")),
            den: self.den,
        }
    }
}

impl Mul for Ratio {
    type Output = Ratio;
    fn mul(self, rhs: Ratio) -> Ratio {
        self.mul_parts(rhs.num, rhs.den)
    }
}

impl Div for Ratio {
    type Output = Ratio;
    #[track_caller]
    fn div(self, rhs: Ratio) -> Ratio {
        self.checked_div(rhs).expect("rational division by zero")
    }
}

impl AddAssign for Ratio {
    fn add_assign(&mut self, rhs: Ratio) {
        *self = *self + rhs;
    }
}

impl SubAssign for Ratio {
    fn sub_assign(&mut self, rhs: Ratio) {
        *self = *self - rhs;
    }
}

impl Sum for Ratio {
    fn sum<I: Iterator<Item = Ratio>>(iter: I) -> Ratio {
        iter.fold(Ratio::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Ratio> for Ratio {
    fn sum<I: Iterator<Item = &'a Ratio>>(iter: I) -> Ratio {
        iter.fold(Ratio::ZERO, |acc, x| acc + *x)
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let lhs = self
            .num
            .checked_mul(other.den)
            .unwrap_or_else(|| overflow("cmp"));
        let rhs = other
            .num
            .checked_mul(self.den)
            .unwrap_or_else(|| overflow("cmp"));
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `n`, `n/d`, and finite decimals such as `2.5`.
impl FromStr for Ratio {
    type Err = RatioError;

    fn from_str(s: &str) -> Result<Ratio, RatioError> {
        let bad = || RatioError::Parse(s.to_string());
        let s_trim = s.trim();
        if let Some((n, d)) = s_trim.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            return Ratio::new(n, d);
        }
        if let Some((int, frac)) = s_trim.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_val: i128 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let scale = 10i128.pow(frac.len() as u32);
            let frac_val: i128 = frac.parse().map_err(|_| bad())?;
            let magnitude = Ratio::integer(int_val.abs()) + Ratio::new(frac_val, scale)?;
            return Ok(if negative { -magnitude } else { magnitude });
        }
        let n: i128 = s_trim.parse().map_err(|_| bad())?;
        Ok(Ratio::integer(n))
    }
}

#[derive(Serialize, Deserialize)]
struct RatioRepr {
    num: i128,
    den: i128,
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RatioRepr {
            num: self.num,
            den: self.den,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Ratio, D::Error> {
        let repr = RatioRepr::deserialize(deserializer)?;
        Ratio::new(repr.num, repr.den).map_err(serde::de::Error::custom)
    }
}

/// `Ratio` literal helper: `r(3, 4)` is three quarters.
pub fn r(num: i128, den: i128) -> Ratio {
    Ratio::new(num, den).expect("ratio literal with zero denominator")
}
