use num_complex::Complex64;

use super::{ComplexAccumulator, CompensatedAccumulator, NumericsError};

/// Equal-weight rule `(1/points) Σ_{j<points} f(j/points)` for a 1-periodic `f`.
///
/// For trigonometric polynomials of degree below `points` the rule is exact, and
/// for smooth periodic integrands the error decays faster than any power.
pub fn periodic_trapezoid_integral<F>(f: F, points: u64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if points < 2 {
        return Err(NumericsError::InvalidParameter("trapezoid rule needs at least 2 points"));
    }
    let h = 1.0 / points as f64;
    let mut acc = CompensatedAccumulator::new();
    for j in 0..points {
        acc.add(f(j as f64 * h))?;
    }
    Ok(acc.value() * h)
}

/// Mean of `F` over the unit circle, `(1/2π) ∫ F(e^{iθ}) dθ`, by the same rule.
pub fn circle_trapezoid_mean<F>(f: F, points: u64) -> Result<Complex64, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
{
    if points < 2 {
        return Err(NumericsError::InvalidParameter("trapezoid rule needs at least 2 points"));
    }
    let mut acc = ComplexAccumulator::new();
    for j in 0..points {
        let theta = std::f64::consts::TAU * j as f64 / points as f64;
        acc.add(f(Complex64::from_polar(1.0, theta)))?;
    }
    Ok(acc.value() / points as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_trig_polynomial() {
        assert_eq!(periodic_trapezoid_integral(|_| 1.0, 7).unwrap(), 1.0);
        let v = periodic_trapezoid_integral(|x| (2.0 * PI * x).sin().powi(2), 64).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn abs_sine_against_richardson_refinement() {
        // Oracle: the rule's error for |sin πx| is O(h²) with a kink at 0, so one
        // Richardson step on two coarser grids gives an independent estimate.
        let f = |x: f64| (PI * x).sin().abs();
        let coarse = periodic_trapezoid_integral(f, 1 << 12).unwrap();
        let fine = periodic_trapezoid_integral(f, 1 << 13).unwrap();
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        let v = periodic_trapezoid_integral(f, 1 << 20).unwrap();
        assert!((v - extrapolated).abs() < 1e-10);
        assert!((v - 2.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn circle_mean_of_poisson_kernel() {
        let c = 0.5;
        let m = circle_trapezoid_mean(|z| 1.0 / ((z - c) * (1.0 / z - c)), 256).unwrap();
        assert!((m.re - 4.0 / 3.0).abs() < 1e-13 && m.im.abs() < 1e-13);
    }

    #[test]
    fn rejects_too_few_points() {
        assert!(periodic_trapezoid_integral(|x| x, 1).is_err());
    }
}
