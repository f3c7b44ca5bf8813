//! Fractional parts of logarithms, computed so that exact powers land on 0.

/// Largest `f64` below one; fractional parts are clamped to `[0, ONE_MINUS]`.
const ONE_MINUS: f64 = 1.0 - f64::EPSILON / 2.0;

/// `2^53`: integers below this are exact in `f64`.
const EXACT_INT: f64 = 9_007_199_254_740_992.0;

/// `{log_base m}` for an integer `m ≥ 1` and integer `base ≥ 2`.
///
/// The integer part is found with integer arithmetic, so `m = base^q` gives
/// exactly `0` and the remainder `ln(1 + (m − base^q)/base^q) / ln base` keeps
/// full relative precision for `m` just above a power.
#[inline]
pub fn log_frac(m: u64, base: u64, ln_base: f64) -> f64 {
    debug_assert!(m >= 1 && base >= 2);
    let q = ((m as f64).ln() / ln_base).floor().max(0.0) as u32;
    let mut p = base.checked_pow(q).unwrap_or_else(|| base.pow(q - 1));
    while p > m {
        p /= base;
    }
    while let Some(next) = p.checked_mul(base) {
        if next > m {
            break;
        }
        p = next;
    }
    if p == m {
        return 0.0;
    }
    let frac = (((m - p) as f64) / p as f64).ln_1p() / ln_base;
    frac.min(ONE_MINUS)
}

/// `{log_base v}` for a positive real `v`; integer-valued `v` below `2^53`
/// goes through [`log_frac`] so both paths agree bit for bit.
#[inline]
pub fn log_frac_real(v: f64, base: u64, ln_base: f64) -> f64 {
    if v >= 1.0 && v < EXACT_INT && v == v.trunc() {
        return log_frac(v as u64, base, ln_base);
    }
    frac(v.ln() / ln_base)
}

/// `x − ⌊x⌋`, clamped below one.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        ONE_MINUS
    } else {
        r
    }
}

/// `{L / x}` with the convention `{L/0} = 0`.
#[inline]
pub fn reciprocal_frac(l: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        frac(l / x)
    }
}
