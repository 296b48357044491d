//! Numeric constants of the comb-extraction lemma.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{self, Comparison};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("k must be at least 2, got {0}")]
    SmallK(usize),
    #[error("d must be a finite real at least 2, got {0}")]
    SmallD(f64),
    #[error("t must be at least 4, got {0}")]
    SmallT(u64),
}

/// `3^{3/2} / (3/2 − (3/2)^{1/2})`, the comb-bound constant at exponent 1/2.
pub fn comb_constant() -> f64 {
    3f64.powf(1.5) / (1.5 - 1.5f64.sqrt())
}

/// `Σ_{α≥1} (2/3)^α` as an exact rational, via `r / (1 − r)`.
pub fn k_constant() -> BigRational {
    let r = BigRational::new(2.into(), 3.into());
    &r / (BigRational::one() - &r)
}

/// `L^{1/4} ≥ (3 + 9K/2)·L^{1/8} + 3 + c`.
pub fn first_inequality(l: f64) -> Comparison {
    let k = numeric::rational_to_f64(&k_constant());
    numeric::ge(
        l.powf(0.25),
        (3.0 + 4.5 * k) * l.powf(0.125) + 3.0 + comb_constant(),
    )
}

/// `L − 2·L^{1/8}·(1 + 2^d + L^{1/4}) ≥ L^{1/2}`.
pub fn second_inequality(l: f64, d: f64) -> Comparison {
    numeric::ge(
        l - 2.0 * l.powf(0.125) * (1.0 + 2f64.powf(d) + l.powf(0.25)),
        l.sqrt(),
    )
}

fn both_hold(l: u64, d: f64) -> bool {
    let x = l as f64;
    first_inequality(x).holds && second_inequality(x, d).holds
}

/// Each inequality, read as a condition on `x = L^{1/8}`, fails exactly on an
/// initial segment of the positive integers, so the least `L` from which both
/// hold forever is the least `L` at which both hold.
fn least_l(d: f64) -> u64 {
    let mut hi = 1u64;
    while !both_hold(hi, d) {
        hi *= 2;
    }
    let mut lo = hi / 2; // fails, or 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if both_hold(mid, d) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `τ − 1/(2d) < −(d+1)τ`.
pub fn tau_condition_one(tau: f64, d: f64) -> bool {
    tau - 1.0 / (2.0 * d) < -(d + 1.0) * tau
}

/// `L_0^{−d−1/2+2dτ} + c·L_0^{−1/2+2dτ} + 2^{−1/2} < 1`.
pub fn tau_condition_two(tau: f64, d: f64, l0: f64) -> bool {
    l0.powf(-d - 0.5 + 2.0 * d * tau)
        + comb_constant() * l0.powf(-0.5 + 2.0 * d * tau)
        + 0.5f64.sqrt()
        < 1.0
}

/// `L_0^{1/8 − 2dτ} > 1`.
pub fn tau_condition_three(tau: f64, d: f64, l0: f64) -> bool {
    l0.powf(0.125 - 2.0 * d * tau) > 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub k: usize,
    pub d: f64,
    /// Always 2.
    pub big_k: f64,
    pub comb_constant: f64,
    pub l0: u64,
    /// False when `L_0` exceeds `2^53` and the scan ran on inexact doubles.
    pub l0_exact: bool,
    /// Both inequalities at `L_0` and at `L_0 − 1`.
    pub l0_check: [bool; 2],
    pub l0_minus_one_check: [bool; 2],
    pub l0_boundary: bool,
    pub tau0: f64,
    /// Which of the three τ conditions binds at `τ_0` (1-based).
    pub tau0_binding: usize,
    /// `(s, D_s)` for small `s`, with `D_s` in decimal.
    pub d_table: Vec<(u32, String)>,
}

pub fn compute_constants(k: usize, d: f64) -> Result<Constants, ConstantsError> {
    if k < 2 {
        return Err(ConstantsError::SmallK(k));
    }
    if !(d.is_finite() && d >= 2.0) {
        return Err(ConstantsError::SmallD(d));
    }
    let l0 = least_l(d);
    let at = |l: u64| {
        let x = l as f64;
        (first_inequality(x), second_inequality(x, d))
    };
    let (a, b) = at(l0);
    let (pa, pb) = at(l0 - 1);
    let l0f = l0 as f64;
    let all = |tau: f64| {
        tau_condition_one(tau, d)
            && tau_condition_two(tau, d, l0f)
            && tau_condition_three(tau, d, l0f)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if all(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau0_binding = if !tau_condition_one(hi, d) {
        1
    } else if !tau_condition_two(hi, d, l0f) {
        2
    } else {
        3
    };
    Ok(Constants {
        k,
        d,
        big_k: numeric::rational_to_f64(&k_constant()),
        comb_constant: comb_constant(),
        l0,
        l0_exact: l0 <= 1 << 53,
        l0_check: [a.holds, b.holds],
        l0_minus_one_check: [pa.holds, pb.holds],
        l0_boundary: a.boundary || b.boundary || pa.boundary || pb.boundary,
        tau0: lo,
        tau0_binding,
        d_table: (1..=6).map(|s| (s, d_s(s).to_string())).collect(),
    })
}

/// `D_s = 2^{s−1}·4^{2s−1} = 2^{5s−3}`.
pub fn d_s(s: u32) -> BigUint {
    assert!(s >= 1);
    BigUint::one() << (5 * s - 3) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemarkDimensions {
    pub s: u32,
    /// `2^s`.
    pub length: u64,
    /// `D_s`.
    pub width_divisor: u64,
    /// `2^s ≥ t^{1/10}`.
    pub length_ok: bool,
    /// `D_s ≤ t`.
    pub divisor_ok: bool,
}

/// The `s` with `D_s ≤ t < D_{s+1}` and the resulting length and width divisor.
pub fn base_remark_dimensions(t: u64) -> Result<RemarkDimensions, ConstantsError> {
    if t < 4 {
        return Err(ConstantsError::SmallT(t));
    }
    let mut s = 1u32;
    while d_s(s + 1) <= BigUint::from(t) {
        s += 1;
    }
    let div = d_s(s).to_u64().expect("D_s ≤ t fits");
    Ok(RemarkDimensions {
        s,
        length: 1 << s,
        width_divisor: div,
        length_ok: (1u64 << s) as f64 >= (t as f64).powf(0.1),
        divisor_ok: div <= t,
    })
}
