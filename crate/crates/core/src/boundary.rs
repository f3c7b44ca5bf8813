//! Boundary series for functions holomorphic in the unit disk.
//!
//! The substitution `f(x) = F(e^{2πix})` turns the logarithmic quadrature into
//! a series over the boundary points `m^{2πi/ln M} = e^{2πi{log_M m}}`. Its value
//! is `ln M` times the circle mean of `F`, which by the mean value property
//! recovers interior values of holomorphic functions.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{factorial, ComplexAccumulator, NumericsError};
use crate::quadrature::{log_frac, QuadratureError, QuadratureOptions};

pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Largest `|c|` accepted by the weighted kernels.
pub const KERNEL_RADIUS_GUARD: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl From<NumericsError> for BoundaryError {
    fn from(e: NumericsError) -> Self {
        Self::Quadrature(e.into())
    }
}

/// A function on the unit circle.
#[derive(Clone)]
pub struct CircleFunction {
    eval: ComplexFn,
}

impl CircleFunction {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(eval) }
    }

    /// Value at `e^{iθ}`.
    pub fn at_angle(&self, theta: f64) -> Complex64 {
        (self.eval)(Complex64::from_polar(1.0, theta))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }
}

impl fmt::Debug for CircleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CircleFunction")
    }
}

/// A function on the closed unit disk, holomorphic inside.
#[derive(Clone)]
pub struct DiskFunction {
    eval: ComplexFn,
}

impl DiskFunction {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(eval) }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn boundary(&self) -> CircleFunction {
        let eval = self.eval.clone();
        CircleFunction { eval }
    }

    /// Largest relative Cauchy–Riemann defect `|∂f/∂x + i ∂f/∂y| / (1 + |f′|)`
    /// over `points` interior points of radius below 0.8.
    pub fn cauchy_riemann_defect(&self, points: usize) -> f64 {
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..points {
            let r = 0.8 * ((i as f64 * 0.754_877_666_246_692_7).fract()).sqrt();
            let theta = TAU * (i as f64 * 0.569_840_290_998_053_2).fract();
            let z = Complex64::from_polar(r, theta);
            let dx = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
            let dy = (self.eval(z + Complex64::i() * h) - self.eval(z - Complex64::i() * h)) / (2.0 * h);
            let defect = (dx + Complex64::i() * dy).norm() / (1.0 + dx.norm());
            worst = worst.max(defect);
        }
        worst
    }
}

impl fmt::Debug for DiskFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DiskFunction")
    }
}

/// Zeros, rotation and power of a Blaschke node map.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeSpec {
    zeros: Vec<Complex64>,
    rotation: Complex64,
    power: i32,
}

impl BlaschkeSpec {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64, power: i32) -> Result<Self, BoundaryError> {
        if zeros.iter().any(|b| !(b.norm() < 1.0)) {
            return Err(BoundaryError::InvalidParameter("Blaschke zeros must lie inside the unit disk"));
        }
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(BoundaryError::InvalidParameter("rotation must have modulus 1"));
        }
        if power == 0 {
            return Err(BoundaryError::InvalidParameter("power must be non-zero"));
        }
        Ok(Self { zeros, rotation, power })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn power(&self) -> i32 {
        self.power
    }

    /// `∏ (z + b_j) / (1 + b̄_j z)`.
    pub fn product(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, b| acc * (z + b) / (1.0 + b.conj() * z))
    }

    /// The point `a ∏ b_j` whose value the series recovers.
    pub fn target_point(&self) -> Complex64 {
        self.rotation * self.product(Complex64::new(0.0, 0.0))
    }
}

/// Which kernel `holo_weighted_kernel` uses: `|ζ − c|^{−2J}` or `|ζ − 1/c|^{−2J}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSide {
    Inside,
    Outside,
}

/// A boundary series value together with its normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResult {
    /// `raw_series_sum / ln M`.
    pub value: Complex64,
    pub raw_series_sum: Complex64,
    pub normalizer: f64,
    pub groups_used: u64,
}

/// `e^{2πi{log_M m}}`; the angle is reduced before the exponential.
#[inline]
pub fn boundary_node(m: u64, base: u64, ln_base: f64) -> Complex64 {
    let (s, c) = (TAU * log_frac(m, base, ln_base)).sin_cos();
    Complex64::new(c, s)
}

fn boundary_series<F>(m: u32, groups: u64, opts: &QuadratureOptions, f: F) -> Result<BoundaryResult, BoundaryError>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if m < 2 {
        return Err(BoundaryError::InvalidParameter("M must be at least 2"));
    }
    if groups < 1 || groups > opts.tol.max_terms() {
        return Err(QuadratureError::TooManyGroups {
            groups,
            max_terms: opts.tol.max_terms(),
        }
        .into());
    }
    let mm = m as u64;
    let ln_m = (m as f64).ln();
    let acc: ComplexAccumulator = opts.policy.reduce(1, groups, |n| {
        let top = mm * n;
        let top_term = f(boundary_node(top, mm, ln_m)) / top as f64;
        let mut group = ComplexAccumulator::new();
        for k in 1..mm {
            let j = top - k;
            if group.add(f(boundary_node(j, mm, ln_m)) / j as f64 - top_term).is_err() {
                // Reported as a non-finite term by the outer reduction.
                return Complex64::new(f64::NAN, f64::NAN);
            }
        }
        group.value()
    })?;
    let raw = acc.value();
    Ok(BoundaryResult {
        value: raw / ln_m,
        raw_series_sum: raw,
        normalizer: ln_m,
        groups_used: groups,
    })
}

/// Mean of `F` over the unit circle from the boundary series.
pub fn circle_mean(f: &CircleFunction, m: u32, groups: u64, opts: &QuadratureOptions) -> Result<BoundaryResult, BoundaryError> {
    boundary_series(m, groups, opts, |z| f.eval(z))
}

/// `f(0)` from the nodes `a ζ^L`. For `L < 0` the nodes run clockwise
/// (`ζ^L = ζ̄^{|L|}`), which leaves the mean unchanged.
pub fn holo_at_zero(
    f: &DiskFunction,
    a: Complex64,
    l: i32,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<BoundaryResult, BoundaryError> {
    if (a.norm() - 1.0).abs() > 1e-12 {
        return Err(BoundaryError::InvalidParameter("rotation must have modulus 1"));
    }
    if l == 0 {
        return Err(BoundaryError::InvalidParameter("power must be non-zero"));
    }
    boundary_series(m, groups, opts, |z| f.eval(a * unit_power(z, l)))
}

/// `z^l` for `|z| = 1`, using the conjugate for negative powers.
#[inline]
fn unit_power(z: Complex64, l: i32) -> Complex64 {
    if l >= 0 {
        z.powi(l)
    } else {
        z.conj().powi(-l)
    }
}

/// Series with the kernel `|ζ − c|^{−2J}` (inside) or `|ζ − 1/c|^{−2J}` (outside).
pub fn holo_weighted_kernel(
    f: &DiskFunction,
    c: Complex64,
    j: u32,
    m: u32,
    groups: u64,
    side: PoleSide,
    opts: &QuadratureOptions,
) -> Result<BoundaryResult, BoundaryError> {
    check_kernel(c, j)?;
    let pole = match side {
        PoleSide::Inside => c,
        PoleSide::Outside => 1.0 / c,
    };
    boundary_series(m, groups, opts, |z| f.eval(z) / (z - pole).norm_sqr().powi(j as i32))
}

fn check_kernel(c: Complex64, j: u32) -> Result<(), BoundaryError> {
    let r = c.norm();
    if !(r > 0.0 && r <= KERNEL_RADIUS_GUARD) {
        return Err(BoundaryError::InvalidParameter("kernel point needs 0 < |c| <= 0.9"));
    }
    if j < 1 {
        return Err(BoundaryError::InvalidParameter("J must be at least 1"));
    }
    Ok(())
}

/// Reference value of the weighted-kernel series divided by `ln M`:
/// `(1/(J−1)!) d^{J−1}[z^{J−1} f(z) (1 − c̄z)^{−J}]` at `z = c` (inside), or
/// `|c|^{2J}/(J−1)! d^{J−1}[z^{J−1} f(z) (1 − cz)^{−J}]` at `z = c̄` (outside).
///
/// Derivatives come from central finite differences with step
/// `1e−5 · 10^{order−1}`; this is an oracle for tests and reports.
pub fn weighted_kernel_reference(f: &DiskFunction, c: Complex64, j: u32, side: PoleSide) -> Result<Complex64, BoundaryError> {
    check_kernel(c, j)?;
    let order = j - 1;
    let ji = j as i32;
    let (at, w, scale) = match side {
        PoleSide::Inside => (c, c.conj(), 1.0),
        PoleSide::Outside => (c.conj(), c, c.norm_sqr().powi(ji)),
    };
    let bracket = |z: Complex64| z.powi(order as i32) * f.eval(z) * (1.0 - w * z).powi(-ji);
    let derivative = if order == 0 {
        bracket(at)
    } else {
        let h = 1e-5 * 10f64.powi(order as i32 - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for i in 0..=order {
            if i > 0 {
                binom = binom * (order - i + 1) as f64 / i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let offset = (order as f64 / 2.0 - i as f64) * h;
            acc += sign * binom * bracket(at + offset);
        }
        acc / h.powi(order as i32)
    };
    Ok(scale * derivative / factorial(order))
}

/// `f(w)` from the nodes `g(ζ^{±1})` weighted by `μ(ζ^{±1})`, where `μ(0) = 1`
/// and `g(0) = w`.
pub fn holo_general(
    f: &DiskFunction,
    g: &DiskFunction,
    mu: &DiskFunction,
    m: u32,
    groups: u64,
    positive: bool,
    opts: &QuadratureOptions,
) -> Result<BoundaryResult, BoundaryError> {
    if (mu.eval(Complex64::new(0.0, 0.0)) - 1.0).norm() > 1e-12 {
        return Err(BoundaryError::InvalidParameter("mu(0) must equal 1"));
    }
    boundary_series(m, groups, opts, |z| {
        let z = if positive { z } else { z.conj() };
        mu.eval(z) * f.eval(g.eval(z))
    })
}

/// `f(a ∏ b_j)` from the nodes `a B(ζ^L)`.
pub fn holo_at_point_blaschke(
    f: &DiskFunction,
    spec: &BlaschkeSpec,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<BoundaryResult, BoundaryError> {
    boundary_series(m, groups, opts, |z| f.eval(spec.rotation * spec.product(unit_power(z, spec.power))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_on_unit_circle() {
        let ln2 = 2f64.ln();
        for m in [1u64, 2, 3, 1_000_003, 9_999_999] {
            assert!((boundary_node(m, 2, ln2).norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(boundary_node(8, 2, ln2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn blaschke_target() {
        let spec = BlaschkeSpec::new(vec![Complex64::new(0.5, 0.0); 2], Complex64::i(), 1).unwrap();
        assert!((spec.target_point() - Complex64::new(0.0, 0.25)).norm() < 1e-16);
        assert!(BlaschkeSpec::new(vec![Complex64::new(1.0, 0.0)], Complex64::new(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn kernel_reference_j1_is_poisson_value() {
        let f = DiskFunction::new(|z| z * z);
        let c = Complex64::new(0.3, 0.0);
        let r = weighted_kernel_reference(&f, c, 1, PoleSide::Inside).unwrap();
        assert!((r.re - 0.09 / 0.91).abs() < 1e-15);
    }

    #[test]
    fn guard_rejects_large_c() {
        let f = DiskFunction::new(|_| Complex64::new(1.0, 0.0));
        assert!(weighted_kernel_reference(&f, Complex64::new(0.95, 0.0), 1, PoleSide::Inside).is_err());
    }

    #[test]
    fn holomorphy_check() {
        assert!(DiskFunction::new(|z| (z / 3.0).exp()).cauchy_riemann_defect(50) < 1e-8);
        assert!(DiskFunction::new(|z: Complex64| z.conj()).cauchy_riemann_defect(50) > 0.5);
    }
}
