use super::{CompensatedAccumulator, NumericsError, ToleranceConfig};

/// Two-sided power–exponential theta sum `θ_{a,b}(w) = Σ_{n∈ℤ} |n|^b e^{−w|n|^a}`.
///
/// The `n = 0` term is `1` when `b = 0` (so `θ_{2,0}` is the Jacobi theta value
/// `Σ e^{−wn²}`) and `0` for `b > 0`.
pub fn theta_ab(a: f64, b: f64, w: f64, tol: &ToleranceConfig) -> Result<f64, NumericsError> {
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(NumericsError::InvalidParameter("theta requires a > 0 and b >= 0"));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(NumericsError::InvalidParameter("theta requires w > 0"));
    }
    // Terms increase up to n* = (b / (a w))^{1/a} and decrease afterwards.
    let peak = if b > 0.0 { (b / (a * w)).powf(1.0 / a) } else { 0.0 };
    let mut acc = CompensatedAccumulator::new();
    let mut n = 1u64;
    loop {
        let nf = n as f64;
        let term = nf.powf(b) * (-w * nf.powf(a)).exp();
        acc.add(term)?;
        if nf > peak && (term == 0.0 || term <= tol.rel_tol().max(f64::EPSILON * 0.25) * acc.value()) {
            break;
        }
        if n >= tol.max_terms() {
            return Err(NumericsError::NonConvergence {
                needed: n + 1,
                max_terms: tol.max_terms(),
            });
        }
        n += 1;
    }
    let centre = if b == 0.0 { 1.0 } else { 0.0 };
    Ok(centre + 2.0 * acc.value())
}
