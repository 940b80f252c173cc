use thiserror::Error;

use crate::ratio::Ratio;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("harmonic number is undefined for n = 0")]
pub struct HarmonicDomainError;

/// `H(n) = 1 + 1/2 + ... + 1/n`, exactly.
pub fn harmonic(n: u32) -> Result<Ratio, HarmonicDomainError> {
    if n == 0 {
        return Err(HarmonicDomainError);
    }
    Ok((1..=n as i128).map(Ratio::unit).sum())
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd_u64(a, b)).checked_mul(b).expect("lcm overflow")
}

/// Least common multiple of every value in the iterator (1 for an empty one).
pub fn lcm_of<I: IntoIterator<Item = u64>>(values: I) -> u64 {
    values.into_iter().fold(1, lcm_u64)
}
