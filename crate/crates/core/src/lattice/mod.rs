//! Two-sided sums over geometric nodes whose values are Gamma values.
//!
//! `Σ_{n∈ℤ} M^{(Ja+1+b)(n+z)} Φ_{a,b,M,J}(M^{a(n+z)}) = Γ((1+b)/a+J)/a` for every
//! real `z`, together with the two-base variant, the derivative-chain family `Ψ`
//! and four elementary identities that sum to 1.

use thiserror::Error;

use crate::exec::ExecPolicy;
use crate::numerics::{gamma_ref, CompensatedAccumulator, NumericsError, ToleranceConfig};

mod explog;
mod phi;
mod psi;

pub use explog::{explog_differentiate, explog_eval, ExpLogTerm};
pub use phi::{phi, phi_grouped};
pub use psi::{psi, psi_chain, psi_lattice_sum, psi_termwise, ChainTerm, PsiParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Parameters of `Φ_{a,b,M,J}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiParams {
    a: f64,
    b: f64,
    m: u32,
    j: u32,
}

impl PhiParams {
    pub fn new(a: f64, b: f64, m: u32, j: u32) -> Result<Self, LatticeError> {
        Self::with_base(a, b, m, j, 2)
    }

    fn with_base(a: f64, b: f64, m: u32, j: u32, min_m: u32) -> Result<Self, LatticeError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(LatticeError::InvalidParameter("a must be positive"));
        }
        if !b.is_finite() {
            return Err(LatticeError::InvalidParameter("b must be finite"));
        }
        if m < min_m {
            return Err(LatticeError::InvalidParameter("M must be at least 2"));
        }
        if !(b > -(j as f64) * a - 1.0) {
            return Err(LatticeError::InvalidParameter("need b > -J a - 1"));
        }
        Ok(Self { a, b, m, j })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// `b + aJ`, the exponent after differentiating `J` times.
    pub fn beta(&self) -> f64 {
        self.b + self.a * self.j as f64
    }

    /// Same `a`, `b`, `M` with `J` replaced.
    pub fn with_j(&self, j: u32) -> Self {
        Self { j, ..*self }
    }

    /// `Γ((1+b)/a + J)/a`.
    pub fn gamma_target(&self) -> Result<f64, LatticeError> {
        Ok(gamma_ref((1.0 + self.b) / self.a + self.j as f64)? / self.a)
    }
}

/// Default summation range for the two-sided sums.
pub const DEFAULT_RANGE: (i64, i64) = (-120, 60);

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSumResult {
    pub value: f64,
    pub target: f64,
    /// `|value − target|`.
    pub abs_err: f64,
    pub n_range: (i64, i64),
    pub z: f64,
}

impl LatticeSumResult {
    fn new(value: f64, target: f64, n_range: (i64, i64), z: f64) -> Self {
        Self {
            value,
            target,
            abs_err: (value - target).abs(),
            n_range,
            z,
        }
    }
}

fn check_range(range: (i64, i64), z: f64) -> Result<(), LatticeError> {
    if range.0 > 0 || range.1 < 0 {
        return Err(LatticeError::InvalidParameter("range must contain 0"));
    }
    if !z.is_finite() {
        return Err(LatticeError::InvalidParameter("z must be finite"));
    }
    Ok(())
}

/// Evaluates `term(n)` for every `n` in the range (in parallel when allowed)
/// and adds the results in ascending `n`.
pub(crate) fn node_sum<F>(range: (i64, i64), policy: &ExecPolicy, term: F) -> Result<f64, LatticeError>
where
    F: Fn(i64) -> Result<f64, LatticeError> + Sync,
{
    let count = (range.1 - range.0 + 1) as u64;
    let terms = policy.map_ordered(count, |i| term(range.0 + i as i64));
    let mut acc = CompensatedAccumulator::new();
    for t in terms {
        acc.add(t?)?;
    }
    Ok(acc.value())
}

/// One lattice term `base^{(β+1)x} · F(base^{a x})`, with `x = n + z`. Nodes
/// whose argument overflows contribute 0 since `F` decays exponentially there.
pub(crate) fn lattice_term<F>(ln_base: f64, a: f64, beta: f64, x: f64, f: F) -> Result<f64, LatticeError>
where
    F: Fn(f64) -> Result<f64, LatticeError>,
{
    let arg = (a * x * ln_base).exp();
    if !arg.is_finite() || arg > 1e300 {
        return Ok(0.0);
    }
    let v = f(arg)?;
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok(((beta + 1.0) * x * ln_base).exp() * v)
}

/// `Σ_{n=n_min}^{n_max} M^{(Ja+1+b)(n+z)} Φ_{a,b,M,J}(M^{a(n+z)})`.
pub fn lattice_sum_single(
    p: &PhiParams,
    z: f64,
    range: (i64, i64),
    policy: &ExecPolicy,
    tol: &ToleranceConfig,
) -> Result<LatticeSumResult, LatticeError> {
    check_range(range, z)?;
    let ln_m = (p.m() as f64).ln();
    let value = node_sum(range, policy, |n| {
        lattice_term(ln_m, p.a(), p.beta(), n as f64 + z, |w| phi(p, w, tol))
    })?;
    Ok(LatticeSumResult::new(value, p.gamma_target()?, range, z))
}

/// `Σ_n (M/N)^{(aJ+1+b)(n+z)} [Φ_{a,b,M,J} − Φ_{a,b,N,J}]((M/N)^{a(n+z)})`.
/// `N = 1` is accepted; its `Φ` has no terms.
pub fn lattice_sum_pair(
    a: f64,
    b: f64,
    m: u32,
    n: u32,
    j: u32,
    z: f64,
    range: (i64, i64),
    policy: &ExecPolicy,
    tol: &ToleranceConfig,
) -> Result<LatticeSumResult, LatticeError> {
    check_range(range, z)?;
    let (pm, pn) = pair_params(a, b, m, n, j)?;
    let ln_base = (m as f64 / n as f64).ln();
    let value = node_sum(range, policy, |k| {
        lattice_term(ln_base, a, pm.beta(), k as f64 + z, |w| pair_phi(&pm, pn.as_ref(), w, tol))
    })?;
    Ok(LatticeSumResult::new(value, pm.gamma_target()?, range, z))
}

pub(crate) fn pair_params(a: f64, b: f64, m: u32, n: u32, j: u32) -> Result<(PhiParams, Option<PhiParams>), LatticeError> {
    if n < 1 || m <= n {
        return Err(LatticeError::InvalidParameter("need M > N >= 1"));
    }
    let pm = PhiParams::new(a, b, m, j)?;
    let pn = if n >= 2 { Some(PhiParams::new(a, b, n, j)?) } else { None };
    Ok((pm, pn))
}

/// `Φ_M(w) − Φ_N(w)`, where a missing `N` means `N = 1`.
pub(crate) fn pair_phi(pm: &PhiParams, pn: Option<&PhiParams>, w: f64, tol: &ToleranceConfig) -> Result<f64, LatticeError> {
    let first = phi(pm, w, tol)?;
    match pn {
        Some(pn) => Ok(first - phi(pn, w, tol)?),
        None => Ok(first),
    }
}

/// One row of [`closed_form_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub id: u32,
    pub base: f64,
    pub result: LatticeSumResult,
}

/// Summand of identity `id` at `x = base^{n+z}`, written in `u = e^{−x}` so
/// that large `x` underflows cleanly.
fn identity_summand(id: u32, x: f64) -> f64 {
    let u = (-x).exp();
    match id {
        // x/(e^x+1)
        1 => x * u / (1.0 + u),
        // x² e^x/(e^x+1)²
        2 => x * x * u / ((1.0 + u) * (1.0 + u)),
        // x(e^x+2)/(e^{2x}+e^x+1)
        3 => x * (u + 2.0 * u * u) / (1.0 + u + u * u),
        // x(2e^x+1)/(e^{3x}+2e^{2x}+2e^x+1)
        _ => x * (2.0 * u * u + u * u * u) / (1.0 + 2.0 * u + 2.0 * u * u + u * u * u),
    }
}

/// Bases of the four identities: `2^{n+z}`, `2^{n+z}` (with weight `4^{n+z}`),
/// `3^{n+z}` and `(3/2)^{n+z}`.
pub const IDENTITY_BASES: [f64; 4] = [2.0, 2.0, 3.0, 1.5];

/// Evaluates the four elementary identities over `range`; each target is 1.
pub fn closed_form_suite(z: f64, range: (i64, i64), policy: &ExecPolicy) -> Result<Vec<IdentityRow>, LatticeError> {
    check_range(range, z)?;
    let mut rows = Vec::with_capacity(4);
    for (i, base) in IDENTITY_BASES.iter().enumerate() {
        let id = i as u32 + 1;
        let value = node_sum(range, policy, |n| {
            let x = base.powf(n as f64 + z);
            Ok(identity_summand(id, x))
        })?;
        rows.push(IdentityRow {
            id,
            base: *base,
            result: LatticeSumResult::new(value, 1.0, range, z),
        });
    }
    Ok(rows)
}
