//! Multivariate zeta analogues `ζ̂(s) = Σ_{n∈ℕ^d} Ψ(n; s)` with
//! `Ψ(λn; s) = λ^{−κs} Ψ(n; s)`, and their `M`-difference series
//! `(1 − M^{d−κs}) ζ̂(s) = Σ_n [Σ_{k∈[0,M)^d} Ψ(Mn−k; s) − M^d Ψ(Mn; s)]`.
//!
//! Sums run over the hypercube `1 ≤ n_i ≤ box`, split into slabs along `n₁`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::exec::ExecPolicy;
use crate::numerics::{CompensatedAccumulator, ComplexAccumulator, NumericsError};
use crate::quadrature::{log_frac_real, PeriodicFunction, QuadratureError, QuadratureResult};

pub type SummandFn = Arc<dyn Fn(&[u64], Complex64) -> Complex64 + Send + Sync>;
pub type LatticeFn = Arc<dyn Fn(&[u64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GzetaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("homogeneity check failed at {point:?}: relative defect {defect:e}")]
    NotHomogeneous { point: Vec<u64>, defect: f64 },
    #[error("work {work} exceeds the limit {limit}")]
    WorkLimit { work: u128, limit: u128 },
    #[error("normalizing constant {0:e} is below the floor")]
    NormalizerFloor(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl From<GzetaError> for QuadratureError {
    fn from(e: GzetaError) -> Self {
        match e {
            GzetaError::Numerics(n) => QuadratureError::Evaluation(n),
            _ => QuadratureError::InvalidScheme("generalized zeta series rejected its input"),
        }
    }
}

/// Lattice points used by the homogeneity gates.
fn probe_points(dim: usize) -> Vec<Vec<u64>> {
    (0..12u64)
        .map(|i| (0..dim as u64).map(|j| 1 + (i * 7919 + j * 104_729 + i * j * 31) % 47).collect())
        .collect()
}

fn scaled(point: &[u64], lambda: u64) -> Vec<u64> {
    point.iter().map(|v| v * lambda).collect()
}

const GATE_TOL: f64 = 1e-9;

/// `Ψ(n; s)` on `ℕ^d`, homogeneous of degree `−κ s`.
#[derive(Clone)]
pub struct HomogeneousSummand {
    dim: usize,
    degree: f64,
    eval: SummandFn,
    label: String,
}

impl std::fmt::Debug for HomogeneousSummand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogeneousSummand")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("label", &self.label)
            .finish()
    }
}

impl HomogeneousSummand {
    /// Registers a summand of degree `κ = 1`; fails unless the homogeneity
    /// spot-check passes.
    pub fn new(label: impl Into<String>, dim: usize, eval: SummandFn) -> Result<Self, GzetaError> {
        Self::with_degree(label, dim, 1.0, eval)
    }

    pub fn with_degree(label: impl Into<String>, dim: usize, degree: f64, eval: SummandFn) -> Result<Self, GzetaError> {
        if dim < 1 || dim > 4 {
            return Err(GzetaError::InvalidParameter("dimension must be in 1..=4"));
        }
        if !(degree > 0.0 && degree.is_finite()) {
            return Err(GzetaError::InvalidParameter("degree must be positive"));
        }
        let z = Self {
            dim,
            degree,
            eval,
            label: label.into(),
        };
        z.check_homogeneity()?;
        Ok(z)
    }

    /// `Ψ(n; s) = n^{−s}`.
    pub fn riemann() -> Self {
        Self::new("riemann", 1, Arc::new(|n: &[u64], s: Complex64| (-s * (n[0] as f64).ln()).exp()))
            .expect("n^-s is homogeneous")
    }

    /// `(Σ_{j<d} j n_j n_{j+1}) / (Σ n_j)² · Π_i (Σ_j B_ij n_j)^{−υ_i s}`, with
    /// positive `B` and `Σ υ_i = 1`.
    pub fn zeta2(dim: usize, b: Vec<Vec<f64>>, upsilon: Vec<f64>) -> Result<Self, GzetaError> {
        if dim < 2 {
            return Err(GzetaError::InvalidParameter("zeta2 needs d >= 2"));
        }
        if b.len() != upsilon.len() || b.is_empty() {
            return Err(GzetaError::InvalidParameter("B and upsilon must have the same number of rows"));
        }
        if b.iter().any(|row| row.len() != dim || row.iter().any(|v| !(*v > 0.0 && v.is_finite()))) {
            return Err(GzetaError::InvalidParameter("B must be positive with d columns"));
        }
        if (upsilon.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(GzetaError::InvalidParameter("upsilon must sum to 1"));
        }
        let eval = move |n: &[u64], s: Complex64| {
            let total: f64 = n.iter().map(|&v| v as f64).sum();
            let cross: f64 = (0..n.len() - 1).map(|j| (j + 1) as f64 * n[j] as f64 * n[j + 1] as f64).sum();
            let mut log_den = Complex64::new(0.0, 0.0);
            for (row, u) in b.iter().zip(&upsilon) {
                let lin: f64 = row.iter().zip(n).map(|(c, &v)| c * v as f64).sum();
                log_den += s * (u * lin.ln());
            }
            (-log_den).exp() * (cross / (total * total))
        };
        Self::new("zeta2", dim, Arc::new(eval))
    }

    /// [`zeta2`](Self::zeta2) with a single all-ones row: for `d = 2` this is
    /// `n₁n₂ / (n₁+n₂)^{2+s}`.
    pub fn zeta2_default(dim: usize) -> Result<Self, GzetaError> {
        Self::zeta2(dim, vec![vec![1.0; dim]], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, n: &[u64], s: Complex64) -> Complex64 {
        (self.eval)(n, s)
    }

    /// `Ψ(λn; s) = λ^{−κs} Ψ(n; s)` for `λ ∈ {2, 3}` on fixed probe points.
    pub fn check_homogeneity(&self) -> Result<(), GzetaError> {
        let s = Complex64::new(self.dim as f64 + 0.5, 0.3);
        for point in probe_points(self.dim) {
            let base = self.eval(&point, s);
            if !(base.re.is_finite() && base.im.is_finite()) {
                return Err(GzetaError::NotHomogeneous { point, defect: f64::INFINITY });
            }
            for lambda in [2u64, 3] {
                let expected = base * (-s * self.degree * (lambda as f64).ln()).exp();
                let got = self.eval(&scaled(&point, lambda), s);
                let defect = (got - expected).norm() / expected.norm().max(f64::MIN_POSITIVE);
                if !(defect <= GATE_TOL) {
                    return Err(GzetaError::NotHomogeneous { point, defect });
                }
            }
        }
        Ok(())
    }
}

/// `ξ` homogeneous of degree 0 and `ψ > 0` homogeneous of degree 1; the
/// summand is `ξ(n) ψ(n)^{−s}`.
#[derive(Clone)]
pub struct XiPsiPair {
    dim: usize,
    xi: LatticeFn,
    psi: LatticeFn,
}

impl std::fmt::Debug for XiPsiPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("XiPsiPair").field("dim", &self.dim).finish()
    }
}

impl XiPsiPair {
    pub fn new(dim: usize, xi: LatticeFn, psi: LatticeFn) -> Result<Self, GzetaError> {
        if dim < 1 || dim > 4 {
            return Err(GzetaError::InvalidParameter("dimension must be in 1..=4"));
        }
        let pair = Self { dim, xi, psi };
        for point in probe_points(dim) {
            let (x, p) = (pair.xi(&point), pair.psi(&point));
            if !(p > 0.0 && p.is_finite() && x.is_finite()) {
                return Err(GzetaError::NotHomogeneous { point, defect: f64::INFINITY });
            }
            for lambda in [2u64, 3] {
                let q = scaled(&point, lambda);
                let dx = (pair.xi(&q) - x).abs() / x.abs().max(1e-300);
                let dp = (pair.psi(&q) - lambda as f64 * p).abs() / (lambda as f64 * p);
                let defect = if x == 0.0 { pair.xi(&q).abs() } else { dx }.max(dp);
                if !(defect <= GATE_TOL) {
                    return Err(GzetaError::NotHomogeneous { point, defect });
                }
            }
        }
        Ok(pair)
    }

    /// `ξ ≡ 1`, `ψ = n` on `ℕ`.
    pub fn riemann() -> Self {
        Self::new(1, Arc::new(|_: &[u64]| 1.0), Arc::new(|n: &[u64]| n[0] as f64)).expect("homogeneous")
    }

    /// `ξ = n₁/(n₁+n₂)`, `ψ = n₁+n₂`.
    pub fn simplex_weight() -> Self {
        Self::new(
            2,
            Arc::new(|n: &[u64]| n[0] as f64 / (n[0] + n[1]) as f64),
            Arc::new(|n: &[u64]| (n[0] + n[1]) as f64),
        )
        .expect("homogeneous")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn xi(&self, n: &[u64]) -> f64 {
        (self.xi)(n)
    }

    pub fn psi(&self, n: &[u64]) -> f64 {
        (self.psi)(n)
    }

    /// `ξ ψ^{−s}` as a [`HomogeneousSummand`].
    pub fn to_summand(&self) -> Result<HomogeneousSummand, GzetaError> {
        let (xi, psi) = (self.xi.clone(), self.psi.clone());
        HomogeneousSummand::new(
            "xi-psi",
            self.dim,
            Arc::new(move |n: &[u64], s: Complex64| (-s * psi(n).ln()).exp() * xi(n)),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GzetaOptions {
    pub policy: ExecPolicy,
    /// Upper bound on `box^d · M^d` summand evaluations.
    pub max_work: u128,
    /// Smallest acceptable normalizing constant in [`gzeta_quadrature`].
    pub normalizer_floor: f64,
}

impl Default for GzetaOptions {
    fn default() -> Self {
        Self {
            policy: ExecPolicy::default(),
            max_work: 20_000_000_000,
            normalizer_floor: 1e-12,
        }
    }
}

impl GzetaOptions {
    pub fn with_policy(policy: ExecPolicy) -> Self {
        Self { policy, ..Self::default() }
    }

    fn check(&self, dim: usize, m: u32, boxsize: u64) -> Result<(), GzetaError> {
        if m < 2 {
            return Err(GzetaError::InvalidParameter("M must be at least 2"));
        }
        if boxsize < 1 {
            return Err(GzetaError::InvalidParameter("box must be at least 1"));
        }
        let work = (boxsize as u128 * m as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if work > self.max_work {
            return Err(GzetaError::WorkLimit { work, limit: self.max_work });
        }
        Ok(())
    }
}

/// Non-zero offsets `k ∈ [0, M)^d`, last coordinate fastest.
fn offsets(dim: usize, m: u64) -> Vec<Vec<u64>> {
    let total = m.pow(dim as u32);
    (1..total)
        .map(|mut idx| {
            let mut k = vec![0u64; dim];
            for slot in k.iter_mut().rev() {
                *slot = idx % m;
                idx /= m;
            }
            k
        })
        .collect()
}

/// Calls `visit(n)` for every `n ∈ [1, box]^{d−1}` (empty for `d = 1`).
fn for_each_tail(dim: usize, boxsize: u64, mut visit: impl FnMut(&[u64])) {
    if dim == 1 {
        visit(&[]);
        return;
    }
    let mut n = vec![1u64; dim - 1];
    loop {
        visit(&n);
        let mut i = n.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if n[i] < boxsize {
                n[i] += 1;
                for v in &mut n[i + 1..] {
                    *v = 1;
                }
                break;
            }
        }
    }
}

/// One difference group `Σ_{k≠0} [h(Mn−k) − h(Mn)]`, compensated.
fn real_group(n: &[u64], m: u64, ks: &[Vec<u64>], scratch: &mut Vec<u64>, h: &dyn Fn(&[u64]) -> f64) -> f64 {
    scratch.clear();
    scratch.extend(n.iter().map(|v| v * m));
    let top = h(scratch);
    let mut acc = CompensatedAccumulator::new();
    for k in ks {
        for ((dst, v), kk) in scratch.iter_mut().zip(n).zip(k) {
            *dst = v * m - kk;
        }
        acc.add_finite(h(scratch) - top);
    }
    acc.value()
}

/// `Σ_{n ∈ [1,box]^d} Σ_{k≠0} [h(Mn−k) − h(Mn)]`, reduced over `n₁` slabs.
fn real_difference_series(
    dim: usize,
    m: u32,
    boxsize: u64,
    policy: &ExecPolicy,
    h: &(dyn Fn(&[u64]) -> f64 + Sync),
) -> Result<f64, GzetaError> {
    let mm = m as u64;
    let ks = offsets(dim, mm);
    let acc: CompensatedAccumulator = policy.reduce(1, boxsize, |n1| {
        let mut slab = CompensatedAccumulator::new();
        let mut point = Vec::with_capacity(dim);
        let mut scratch = Vec::with_capacity(dim);
        for_each_tail(dim, boxsize, |rest| {
            point.clear();
            point.push(n1);
            point.extend_from_slice(rest);
            slab.add_finite(real_group(&point, mm, &ks, &mut scratch, h));
        });
        slab.value()
    })?;
    Ok(acc.value())
}

/// Truncated `Σ_{n∈[1,box]^d} [Σ_{k∈[0,M)^d} Ψ(Mn−k; s) − M^d Ψ(Mn; s)]`.
pub fn gzeta_difference_series(
    z: &HomogeneousSummand,
    m: u32,
    s: Complex64,
    boxsize: u64,
    opts: &GzetaOptions,
) -> Result<Complex64, GzetaError> {
    opts.check(z.dim, m, boxsize)?;
    if !(s.re * z.degree > z.dim as f64 - 1.0) {
        return Err(GzetaError::InvalidParameter("need Re(s) > d - 1"));
    }
    let dim = z.dim;
    let mm = m as u64;
    let ks = offsets(dim, mm);
    let acc: ComplexAccumulator = opts.policy.reduce(1, boxsize, |n1| {
        let mut slab = ComplexAccumulator::new();
        let mut finite = true;
        let mut point = Vec::with_capacity(dim);
        let mut scratch = vec![0u64; dim];
        for_each_tail(dim, boxsize, |rest| {
            point.clear();
            point.push(n1);
            point.extend_from_slice(rest);
            for (dst, v) in scratch.iter_mut().zip(&point) {
                *dst = v * mm;
            }
            let top = z.eval(&scratch, s);
            let mut group = ComplexAccumulator::new();
            for k in &ks {
                for ((dst, v), kk) in scratch.iter_mut().zip(&point).zip(k) {
                    *dst = v * mm - kk;
                }
                finite &= group.add(z.eval(&scratch, s) - top).is_ok();
            }
            finite &= slab.add(group.value()).is_ok();
        });
        // A non-finite slab makes the reduction report the failure.
        if finite {
            slab.value()
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        }
    })?;
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceRow {
    pub m: u32,
    /// Series at `s = d/κ` divided by `ln M`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceTable {
    pub rows: Vec<InvarianceRow>,
    /// `max ratio − min ratio`.
    pub spread: f64,
    pub all_positive: bool,
}

/// The difference series at the pole `s = d/κ`, divided by `ln M`, for each `M`.
pub fn gzeta_invariance_check(
    z: &HomogeneousSummand,
    ms: &[u32],
    boxsize: u64,
    opts: &GzetaOptions,
) -> Result<InvarianceTable, GzetaError> {
    if ms.is_empty() {
        return Err(GzetaError::InvalidParameter("no M values given"));
    }
    let s = Complex64::new(z.dim as f64 / z.degree, 0.0);
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let v = gzeta_difference_series(z, m, s, boxsize, opts)?;
        rows.push(InvarianceRow {
            m,
            ratio: v.re / (m as f64).ln(),
        });
    }
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(InvarianceTable {
        all_positive: lo > 0.0,
        spread: hi - lo,
        rows,
    })
}

/// How [`gzeta_quadrature`] normalizes its raw series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `c_P` from the `f ≡ 1` series on the same box, so constants integrate exactly.
    Empirical,
    /// A known `c_P` (for `d = 1`, `ξ ≡ 1`, `ψ = n` it is 1).
    Given(f64),
}

/// `∫₀¹ f` from nodes `{log_M ψ(m)}` with weights `ξ(m) ψ(m)^{−d}` in the
/// `M`-difference arrangement, divided by `c_P ln M`. The error estimate is
/// the change from `box/2` to `box`.
pub fn gzeta_quadrature(
    pair: &XiPsiPair,
    m: u32,
    f: &PeriodicFunction,
    boxsize: u64,
    normalization: Normalization,
    opts: &GzetaOptions,
) -> Result<QuadratureResult, GzetaError> {
    opts.check(pair.dim, m, boxsize)?;
    let dim = pair.dim;
    let d = dim as i32;
    let mm = m as u64;
    let ln_m = (m as f64).ln();
    let h = |n: &[u64]| {
        let p = pair.psi(n);
        pair.xi(n) * f.eval(log_frac_real(p, mm, ln_m)) / p.powi(d)
    };
    let raw = real_difference_series(dim, m, boxsize, &opts.policy, &h)?;
    let c_p = match normalization {
        Normalization::Given(c) => c,
        Normalization::Empirical => {
            let unit = |n: &[u64]| pair.xi(n) / pair.psi(n).powi(d);
            real_difference_series(dim, m, boxsize, &opts.policy, &unit)? / ln_m
        }
    };
    if !(c_p.abs() >= opts.normalizer_floor) {
        return Err(GzetaError::NormalizerFloor(c_p));
    }
    let normalizer = c_p * ln_m;
    let half = (boxsize / 2).max(1);
    let coarse = if half < boxsize {
        let raw_half = real_difference_series(dim, m, half, &opts.policy, &h)?;
        let c_half = match normalization {
            Normalization::Given(c) => c,
            Normalization::Empirical => {
                let unit = |n: &[u64]| pair.xi(n) / pair.psi(n).powi(d);
                real_difference_series(dim, m, half, &opts.policy, &unit)? / ln_m
            }
        };
        raw_half / (c_half * ln_m)
    } else {
        raw / normalizer
    };
    let mut result = QuadratureResult::new(raw, normalizer, boxsize, 0.0, true);
    result.tail_estimate = (result.value - coarse).abs();
    Ok(result)
}
