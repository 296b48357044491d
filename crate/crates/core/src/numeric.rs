//! Guarded real comparisons and exact thresholds.
//!
//! Cardinalities are integers while most thresholds are real powers such as
//! `n / t^d` or `t^{1/8}`. When a threshold is an exact rational it is compared
//! exactly; otherwise the comparison runs in double precision and values within
//! [`GUARD`] (relative to magnitude) are flagged as boundary cases.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub const GUARD: f64 = 1e-9;

/// Outcome of a guarded comparison: the verdict and whether the two sides were
/// close enough that the verdict is sensitive to rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub holds: bool,
    pub boundary: bool,
}

impl Comparison {
    pub const fn exact(holds: bool) -> Self {
        Comparison {
            holds,
            boundary: false,
        }
    }
}

fn near(a: f64, b: f64) -> bool {
    let scale = 1f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= GUARD * scale
}

/// `a ≥ b`.
pub fn ge(a: f64, b: f64) -> Comparison {
    Comparison {
        holds: a >= b,
        boundary: near(a, b),
    }
}

/// `a ≤ b`.
pub fn le(a: f64, b: f64) -> Comparison {
    ge(b, a)
}

/// `a < b`.
pub fn lt(a: f64, b: f64) -> Comparison {
    Comparison {
        holds: a < b,
        boundary: near(a, b),
    }
}

/// `a > b`.
pub fn gt(a: f64, b: f64) -> Comparison {
    lt(b, a)
}

/// `(2/3)^s · delta ≤ count`, decided exactly.
pub fn two_thirds_pow_le(delta: usize, s: u32, count: usize) -> bool {
    let lhs = 2u128
        .checked_pow(s)
        .and_then(|p| p.checked_mul(delta as u128));
    let rhs = 3u128
        .checked_pow(s)
        .and_then(|p| p.checked_mul(count as u128));
    match (lhs, rhs) {
        (Some(l), Some(r)) => l <= r,
        _ => {
            BigUint::from(2u32).pow(s) * BigUint::from(delta)
                <= BigUint::from(3u32).pow(s) * BigUint::from(count)
        }
    }
}

/// `count ≤ (2/3)^s · delta`, decided exactly.
pub fn le_two_thirds_pow(count: usize, s: u32, delta: usize) -> bool {
    let lhs = 3u128
        .checked_pow(s)
        .and_then(|p| p.checked_mul(count as u128));
    let rhs = 2u128
        .checked_pow(s)
        .and_then(|p| p.checked_mul(delta as u128));
    match (lhs, rhs) {
        (Some(l), Some(r)) => l <= r,
        _ => {
            BigUint::from(3u32).pow(s) * BigUint::from(count)
                <= BigUint::from(2u32).pow(s) * BigUint::from(delta)
        }
    }
}

/// `(2/3)^s · delta` as an exact rational.
pub fn two_thirds_pow(delta: usize, s: u32) -> BigRational {
    BigRational::new(
        BigInt::from(2u32).pow(s) * BigInt::from(delta),
        BigInt::from(3u32).pow(s),
    )
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A real threshold, carried exactly when it is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    value: f64,
    exact: Option<BigRational>,
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value)
    }
}

impl Threshold {
    pub fn real(value: f64) -> Self {
        Threshold { value, exact: None }
    }

    pub fn rational(r: BigRational) -> Self {
        Threshold {
            value: rational_to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn integer(v: u64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `n / t^e`; exact when `e` is a non-negative integer.
    pub fn ratio_power(n: usize, t: usize, e: f64) -> Self {
        if e >= 0.0 && e.fract() == 0.0 && e <= 4096.0 {
            let den = BigInt::from(t).pow(e as u32);
            if den.is_zero() {
                return Self::real(f64::INFINITY);
            }
            Self::rational(BigRational::new(BigInt::from(n), den))
        } else {
            Self::real(n as f64 / (t as f64).powf(e))
        }
    }

    /// Multiplies by a real factor, read as the exact binary rational it stores.
    pub fn scaled(&self, factor: f64) -> Self {
        if factor == 1.0 {
            return self.clone();
        }
        match (&self.exact, BigRational::from_float(factor)) {
            (Some(e), Some(f)) => Self::rational(e * f),
            _ => Self::real(self.value * factor),
        }
    }

    /// Multiplies by an exact rational.
    pub fn times_rational(&self, r: &BigRational) -> Self {
        match &self.exact {
            Some(e) => Self::rational(e * r),
            None => Self::real(self.value * rational_to_f64(r)),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `self ≤ q`.
    pub fn le_rational(&self, q: &BigRational) -> Comparison {
        match &self.exact {
            Some(e) => Comparison::exact(e <= q),
            None => le(self.value, rational_to_f64(q)),
        }
    }

    /// `self ≤ count`, i.e. the count reaches the threshold.
    pub fn reached_by(&self, count: usize) -> Comparison {
        self.le_rational(&BigRational::from_integer(BigInt::from(count)))
    }

    /// `count ≤ self`.
    pub fn bounds(&self, count: usize) -> Comparison {
        match &self.exact {
            Some(e) => Comparison::exact(BigRational::from_integer(BigInt::from(count)) <= *e),
            None => le(count as f64, self.value),
        }
    }

    /// `count < self`.
    pub fn exceeds(&self, count: usize) -> Comparison {
        match &self.exact {
            Some(e) => Comparison::exact(BigRational::from_integer(BigInt::from(count)) < *e),
            None => lt(count as f64, self.value),
        }
    }

    /// Smallest integer `m` with `m ≥ self` (at least 0).
    pub fn ceil_count(&self) -> usize {
        match &self.exact {
            Some(e) => {
                let c = e.ceil().to_integer();
                if c <= BigInt::zero() {
                    0
                } else {
                    c.to_usize().unwrap_or(usize::MAX)
                }
            }
            None => {
                let v = self.value;
                if v <= 0.0 {
                    0
                } else {
                    let r = v.round();
                    if near(v, r) {
                        r as usize
                    } else {
                        v.ceil() as usize
                    }
                }
            }
        }
    }
}

/// The exact value of `2^e` as a rational, for possibly negative `e`.
pub fn pow2(e: i32) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_comparisons_flag_boundaries() {
        assert_eq!(
            ge(1.0, 1.0),
            Comparison {
                holds: true,
                boundary: true
            }
        );
        assert_eq!(
            ge(2.0, 1.0),
            Comparison {
                holds: true,
                boundary: false
            }
        );
        assert_eq!(
            lt(1.0, 1.0 + 1e-12),
            Comparison {
                holds: true,
                boundary: true
            }
        );
        assert!(!lt(1.0, 1.0).holds);
    }

    #[test]
    fn two_thirds_power_comparisons_are_exact() {
        // (2/3)^1 · 3 = 2
        assert!(two_thirds_pow_le(3, 1, 2));
        assert!(!two_thirds_pow_le(3, 1, 1));
        assert!(le_two_thirds_pow(2, 1, 3));
        assert!(!le_two_thirds_pow(3, 1, 3));
        // Big exponents fall back to arbitrary precision.
        assert!(two_thirds_pow_le(usize::MAX, 200, 1));
        assert!(!le_two_thirds_pow(1, 200, usize::MAX));
    }

    #[test]
    fn exact_thresholds() {
        let th = Threshold::ratio_power(500, 4, 4.0); // 500/256
        assert!(th.is_exact());
        assert!(th.reached_by(2).holds);
        assert!(!th.reached_by(1).holds);
        assert_eq!(th.ceil_count(), 2);
        let exact = Threshold::ratio_power(256, 4, 4.0);
        assert_eq!(exact.ceil_count(), 1);
        assert!(exact.reached_by(1).holds);
        assert!(exact.bounds(1).holds);
        assert!(!exact.exceeds(1).holds);
        let real = Threshold::ratio_power(16, 2, 0.5);
        assert!(!real.is_exact());
        assert!((real.value() - 16.0 / 2f64.sqrt()).abs() < 1e-12);
    }
}
