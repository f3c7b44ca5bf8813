//! Reference Riemann zeta values for `Re(s) > 0`.
//!
//! ζ(s) is obtained from the alternating Dirichlet eta series,
//! `ζ(s) = η(s) / (1 − 2^{1−s})`, with the eta series accelerated by
//! Chebyshev-weighted partial sums (Borwein's algorithm 2). The weights are an
//! Euler-type transform of the alternating series: every coefficient lies in
//! `[0, 1]`, so the sum is free of the binomial cancellation that plagues the
//! plain Euler transform, and the error decays like `(3 + √8)^{-n}`.
//!
//! The M-grouped difference series `Σ_n Σ_{k<M} [(Mn−k)^{-s} − (Mn)^{-s}]`,
//! whose value is `(1 − M^{1−s}) ζ(s)`, is exposed together with a rigorous
//! bound on its tail; it is the object every logarithmic quadrature rule in
//! this crate is built from.

use num_complex::Complex64;

use super::{CompensatedAccumulator, NumericsError, ToleranceConfig};

const BORWEIN_RATE: f64 = 5.828_427_124_746_19; // 3 + sqrt(8)

fn validate(s: Complex64) -> Result<Complex64, NumericsError> {
    if !(s.re.is_finite() && s.im.is_finite()) || s.re <= 0.0 {
        return Err(NumericsError::ExcludedArgument(s));
    }
    let denom = Complex64::new(1.0, 0.0) - Complex64::new(2.0, 0.0).powc(Complex64::new(1.0, 0.0) - s);
    if denom.norm() < 1e-12 {
        // s = 1 or one of the zeros 1 + 2πik/ln 2 of the eta prefactor.
        return Err(NumericsError::ExcludedArgument(s));
    }
    Ok(denom)
}

/// Riemann ζ(s) for `Re(s) > 0`, `s ≠ 1`, `2^{1−s} ≠ 1`.
pub fn zeta_ref(s: Complex64, tol: &ToleranceConfig) -> Result<Complex64, NumericsError> {
    let denom = validate(s)?;
    let t = s.im.abs();
    let prefactor = 3.0 * (1.0 + 2.0 * t) * (std::f64::consts::FRAC_PI_2 * t).exp() / denom.norm();
    let needed = ((prefactor / tol.abs_tol()).ln() / BORWEIN_RATE.ln()).ceil().max(8.0);
    // (3 + √8)^n must stay representable for the weights.
    if needed > tol.max_terms() as f64 || needed > 380.0 {
        return Err(NumericsError::NonConvergence {
            needed: needed as u64,
            max_terms: tol.max_terms(),
        });
    }
    let n = needed as usize;

    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0 / n as f64;
    let mut partial = term;
    d.push(n as f64 * partial);
    for i in 1..=n {
        let fi = i as f64;
        let fnn = n as f64;
        term *= 4.0 * (fnn + fi - 1.0) * (fnn - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        partial += term;
        d.push(fnn * partial);
    }
    let dn = d[n];

    let mut re = CompensatedAccumulator::new();
    let mut im = CompensatedAccumulator::new();
    for (k, dk) in d.iter().take(n).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * (dk - dn) / dn;
        let power = (-s * ((k + 1) as f64).ln()).exp();
        re.add_finite(weight * power.re);
        im.add_finite(weight * power.im);
    }
    let eta = -Complex64::new(re.value(), im.value());
    Ok(eta / denom)
}

/// Real-argument convenience wrapper around [`zeta_ref`].
pub fn zeta_real(s: f64, tol: &ToleranceConfig) -> Result<f64, NumericsError> {
    zeta_ref(Complex64::new(s, 0.0), tol).map(|z| z.re)
}

/// Partial sum of `Σ_{n≤groups} Σ_{k=1}^{M−1} [(Mn−k)^{-s} − (Mn)^{-s}]`.
pub fn grouped_difference_sum(s: Complex64, m: u32, groups: u64) -> Result<Complex64, NumericsError> {
    if m < 2 {
        return Err(NumericsError::InvalidParameter("M must be at least 2"));
    }
    let mut re = CompensatedAccumulator::new();
    let mut im = CompensatedAccumulator::new();
    let mf = m as f64;
    for n in 1..=groups {
        let top = mf * n as f64;
        let top_pow = (-s * top.ln()).exp();
        let mut group = Complex64::new(0.0, 0.0);
        for k in 1..m {
            group += (-s * (top - k as f64).ln()).exp() - top_pow;
        }
        re.add(group.re)?;
        im.add(group.im)?;
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Upper bound on the modulus of the omitted groups `n > groups` of
/// [`grouped_difference_sum`].
///
/// Each pair satisfies `|(Mn−k)^{-s} − (Mn)^{-s}| ≤ |s| k (Mn−k)^{-σ-1}` and
/// `Mn − k > M(n−1)`, after which the sum over `n` is bounded by an integral.
pub fn grouped_difference_tail(s: Complex64, m: u32, groups: u64) -> f64 {
    let sigma = s.re;
    let mf = m as f64;
    let g = groups.max(1) as f64;
    let pairs = mf * (mf - 1.0) / 2.0;
    pairs * s.norm() * mf.powf(-sigma - 1.0) * (g.powf(-sigma - 1.0) + g.powf(-sigma) / sigma)
}
