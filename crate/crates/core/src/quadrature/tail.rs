//! Bounds on the omitted groups.
//!
//! Split each pair as `[f(x)−f(y)]/(Mn−k) + f(y)[1/(Mn−k) − 1/(Mn)]`. The first
//! part is at most `C ρ(gap)/(Mn−k)` with the node gap
//! `log(Mn/(Mn−k)) / |ln base| ≤ c/(n−1)`, `c = (M−1)/(M |ln base|)`; the second
//! sums to `(M−1) max|f| / (2M N)` over `n > N`. What remains is the series
//! `Σ_{j≥N} ρ(c/j)/j`, bounded per modulus kind below.

use super::function::{ModulusKind, ModulusOfContinuity, PeriodicFunction};
use super::QuadratureError;

const GRID: usize = 4096;
const LOGLOG_KNEE: f64 = 0.065_988_035_845_312_54;

/// Sampled `(C, max|h|)` on a 4096-point grid: `C` is the largest ratio
/// `|h(x) − h(y)| / ρ(|x − y|)` over dyadic strides, wrapping periodically.
pub fn estimate_constants(h: &dyn Fn(f64) -> f64, modulus: &ModulusOfContinuity) -> Result<(f64, f64), QuadratureError> {
    let values: Vec<f64> = (0..GRID).map(|j| h(j as f64 / GRID as f64)).collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(crate::numerics::NumericsError::NonFiniteTerm(*bad).into());
    }
    let sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut c: f64 = 0.0;
    let mut stride = 1;
    while stride < GRID {
        let rho = modulus.rho(stride as f64 / GRID as f64);
        for j in 0..GRID {
            let d = (values[(j + stride) % GRID] - values[j]).abs();
            c = c.max(d / rho);
        }
        stride *= 2;
    }
    Ok((c, sup))
}

/// Resolved constants for one composite integrand.
#[derive(Debug, Clone)]
pub(crate) struct TailModel {
    pub modulus: ModulusOfContinuity,
    pub c: f64,
    pub sup: f64,
    pub heuristic: bool,
}

impl TailModel {
    /// Uses the declared modulus, constant and sup where present and samples
    /// the rest. Without a modulus, Lipschitz order one is assumed.
    pub fn resolve(
        h: &dyn Fn(f64) -> f64,
        modulus: Option<&ModulusOfContinuity>,
        sup: Option<f64>,
    ) -> Result<Self, QuadratureError> {
        let (modulus, mut heuristic) = match modulus {
            Some(m) => (m.clone(), false),
            None => (ModulusOfContinuity::lipschitz(1.0, None)?, true),
        };
        let (c, s) = match (modulus.constant(), sup) {
            (Some(c), Some(s)) => (c, s),
            (declared_c, declared_s) => {
                heuristic = true;
                let (ec, es) = estimate_constants(h, &modulus)?;
                (declared_c.unwrap_or(ec), declared_s.unwrap_or(es))
            }
        };
        if matches!(modulus.kind(), ModulusKind::Custom(_)) {
            heuristic = true;
        }
        Ok(Self {
            modulus,
            c,
            sup: s,
            heuristic,
        })
    }

    pub fn for_function(f: &PeriodicFunction) -> Result<Self, QuadratureError> {
        Self::resolve(&|x| f.eval(x), f.modulus(), f.sup())
    }

    /// Tail of one family `Σ_{n>from} Σ_{k<m} [...]` with node base `ln_base`.
    pub fn family_tail(&self, m: u64, ln_base: f64, from: u64) -> f64 {
        if m < 2 {
            return 0.0;
        }
        let from = from.max(1);
        let mf = m as f64;
        let gap = (mf - 1.0) / (mf * ln_base.abs());
        let first = if self.c > 0.0 {
            (mf - 1.0) / mf * self.c * rho_series(&self.modulus, gap, from)
        } else {
            0.0
        };
        let second = (mf - 1.0) * self.sup / (2.0 * mf * from as f64);
        first + second
    }
}

/// Upper bound on `Σ_{j≥n} ρ(c/j)/j`.
fn rho_series(modulus: &ModulusOfContinuity, c: f64, n: u64) -> f64 {
    let h = |t: f64| modulus.rho(c / t) / t;
    let nf = n as f64;
    match modulus.kind() {
        ModulusKind::Lipschitz { exponent } => h(nf) + c.powf(*exponent) * nf.powf(-exponent) / exponent,
        ModulusKind::LogLog { b } => {
            // Below the knee ρ is constant; sum those terms one by one.
            let mut total = 0.0;
            let mut j = n;
            while c / (j as f64) > LOGLOG_KNEE {
                total += h(j as f64);
                j += 1;
            }
            let jf = j as f64;
            total + h(jf) + (jf / c).ln().ln().powf(1.0 - b) / (b - 1.0)
        }
        ModulusKind::Custom(_) => condensed(&h, n),
    }
}

/// Cauchy condensation `Σ_i 2^i n h(2^i n)`, valid for decreasing `h`; stops
/// once the blocks are negligible.
pub(crate) fn condensed(h: &dyn Fn(f64) -> f64, n: u64) -> f64 {
    let mut total = 0.0;
    let mut scale = n as f64;
    for _ in 0..200 {
        let block = scale * h(scale);
        total += block;
        if block <= 1e-17 * total || !block.is_finite() {
            break;
        }
        scale *= 2.0;
    }
    total
}

/// Bound on the omitted raw tail `Σ_{n>from_group}` of the plain series for `f`.
///
/// Constants that `f` does not declare are sampled, which makes the bound
/// heuristic.
pub fn tail_bound(f: &PeriodicFunction, m: u32, from_group: u64) -> Result<f64, QuadratureError> {
    if f.modulus().is_none() {
        return Err(QuadratureError::ModulusAbsent);
    }
    if m < 2 {
        return Err(QuadratureError::InvalidScheme("M must be at least 2"));
    }
    let model = TailModel::for_function(f)?;
    Ok(model.family_tail(m as u64, (m as f64).ln(), from_group))
}
