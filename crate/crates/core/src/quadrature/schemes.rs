use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use super::function::{PeriodicFunction, RealFn};
use super::nodes::{frac, log_frac, log_frac_real, reciprocal_frac};
use super::tail::{condensed, TailModel};
use super::{QuadratureError, QuadratureOptions, QuadratureResult};
use crate::exec::PairAccumulator;
use crate::numerics::{factorial, CompensatedAccumulator};

/// Node/weight family of a series.
#[derive(Clone)]
pub enum NodeScheme {
    Plain {
        m: u32,
    },
    /// Substitution `x = φ(t)` with `φ(1) − φ(0) = 1`.
    Transformed {
        m: u32,
        phi: RealFn,
        dphi: RealFn,
    },
    /// Nodes `χ({log_M m})` weighted by `g / G_φ`, where `χ(φ(y)) = y`,
    /// `φ(0) = 0`, `φ(L) = 1`.
    Lattice {
        m: u32,
        l: u32,
        chi: RealFn,
        phi: RealFn,
        dphi: RealFn,
        g: RealFn,
    },
    /// Nodes `{L / {log_M m}}` weighted by `g / G`.
    ContinuedFraction {
        m: u32,
        l: u32,
        g: RealFn,
    },
    /// Nodes `{ln m / ln(M/N)}`; the `N` family enters with a minus sign.
    RationalBase {
        m: u32,
        n: u32,
    },
    /// Binomial combination of `L − 1` times differentiated series.
    DerivativeForm {
        m: u32,
        n: u32,
        l: u32,
    },
}

impl fmt::Debug for NodeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plain { m } => write!(f, "Plain(M={m})"),
            Self::Transformed { m, .. } => write!(f, "Transformed(M={m})"),
            Self::Lattice { m, l, .. } => write!(f, "Lattice(M={m}, L={l})"),
            Self::ContinuedFraction { m, l, .. } => write!(f, "ContinuedFraction(M={m}, L={l})"),
            Self::RationalBase { m, n } => write!(f, "RationalBase(M={m}, N={n})"),
            Self::DerivativeForm { m, n, l } => write!(f, "DerivativeForm(M={m}, N={n}, L={l})"),
        }
    }
}

impl NodeScheme {
    /// The rational-node lattice scheme: `χ(x) = M^x − 1`, `φ(y) = log_M(y + 1)`,
    /// `g ≡ 1`. Nodes are the rationals `{p / M^q}`; `φ(L) = 1` forces `L = M − 1`.
    pub fn rational_lattice(m: u32) -> Self {
        let mf = m as f64;
        let ln_m = mf.ln();
        Self::Lattice {
            m,
            l: m.saturating_sub(1).max(1),
            chi: Arc::new(move |x: f64| mf.powf(x) - 1.0),
            phi: Arc::new(move |y: f64| (y + 1.0).ln() / ln_m),
            dphi: Arc::new(move |y: f64| 1.0 / ((y + 1.0) * ln_m)),
            g: Arc::new(|_| 1.0),
        }
    }

    pub fn m(&self) -> u32 {
        match self {
            Self::Plain { m }
            | Self::Transformed { m, .. }
            | Self::Lattice { m, .. }
            | Self::ContinuedFraction { m, .. }
            | Self::RationalBase { m, .. }
            | Self::DerivativeForm { m, .. } => *m,
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.m() < 2 {
            return Err(QuadratureError::InvalidScheme("M must be at least 2"));
        }
        match self {
            Self::Plain { .. } => Ok(()),
            Self::Transformed { phi, .. } => {
                if ((phi(1.0) - phi(0.0)) - 1.0).abs() > 1e-9 {
                    return Err(QuadratureError::InvalidScheme("phi(1) - phi(0) must equal 1"));
                }
                Ok(())
            }
            Self::Lattice { l, chi, phi, .. } => {
                if *l < 1 {
                    return Err(QuadratureError::InvalidScheme("L must be at least 1"));
                }
                let lf = *l as f64;
                if phi(0.0).abs() > 1e-12 || (phi(lf) - 1.0).abs() > 1e-12 {
                    return Err(QuadratureError::InvalidScheme("phi(0) = 0 and phi(L) = 1 are required"));
                }
                for i in 0..=64 {
                    let y = lf * i as f64 / 64.0;
                    if (chi(phi(y)) - y).abs() > 1e-9 * (1.0 + y) {
                        return Err(QuadratureError::InverseMismatch(y));
                    }
                }
                Ok(())
            }
            Self::ContinuedFraction { l, .. } => {
                if *l < 1 {
                    return Err(QuadratureError::InvalidScheme("L must be at least 1"));
                }
                Ok(())
            }
            Self::RationalBase { m, n } => {
                if *n < 1 || m == n {
                    return Err(QuadratureError::InvalidScheme("rational base needs N >= 1 and M != N"));
                }
                Ok(())
            }
            Self::DerivativeForm { m, n, l } => {
                if *n < 1 || m == n {
                    return Err(QuadratureError::InvalidScheme("derivative form needs N >= 1 and M != N"));
                }
                if !(2..=6).contains(l) {
                    return Err(QuadratureError::InvalidScheme("derivative form needs 2 <= L <= 6"));
                }
                Ok(())
            }
        }
    }
}

/// One group of a paired series: `Σ_{k=1}^{M−1} [h(Mn−k) − h(Mn)]`, with
/// `h(j) = weight(node(j), j)`.
#[inline]
pub(crate) fn paired_group<N, H>(top: u64, m: u64, node: N, h: H) -> f64
where
    N: Fn(u64) -> f64,
    H: Fn(f64, f64) -> f64,
{
    let top_term = h(node(top), top as f64);
    let mut acc = CompensatedAccumulator::new();
    for k in 1..m {
        let j = top - k;
        acc.add_finite(h(node(j), j as f64) - top_term);
    }
    acc.value()
}

/// Records the first node whose denominator falls under the floor.
struct FloorGuard {
    hit: AtomicBool,
    node: AtomicU64,
    floor: f64,
}

impl FloorGuard {
    fn new(floor: f64) -> Self {
        Self {
            hit: AtomicBool::new(false),
            node: AtomicU64::new(0),
            floor,
        }
    }

    #[inline]
    fn check(&self, denom: f64, node: f64) -> bool {
        if denom.abs() < self.floor || !denom.is_finite() {
            if !self.hit.swap(true, Ordering::Relaxed) {
                self.node.store(node.to_bits(), Ordering::Relaxed);
            }
            false
        } else {
            true
        }
    }

    fn finish<T>(&self, r: Result<T, QuadratureError>) -> Result<T, QuadratureError> {
        if self.hit.load(Ordering::Relaxed) {
            return Err(QuadratureError::DenominatorFloor {
                node: f64::from_bits(self.node.load(Ordering::Relaxed)),
                floor: self.floor,
            });
        }
        r
    }
}

fn plain_series<H>(m: u32, groups: u64, opts: &QuadratureOptions, h: H) -> Result<f64, QuadratureError>
where
    H: Fn(f64, f64) -> f64 + Sync,
{
    let mm = m as u64;
    let ln_m = (m as f64).ln();
    let acc: CompensatedAccumulator = opts
        .policy
        .reduce(1, groups, |n| paired_group(mm * n, mm, |j| log_frac(j, mm, ln_m), &h))?;
    Ok(acc.value())
}

/// `ln M ∫₀¹ f = Σ_n Σ_{k=1}^{M−1} [f({log_M(Mn−k)})/(Mn−k) − f({log_M Mn})/(Mn)]`.
#[allow(non_snake_case)]
pub fn integral_logM(
    f: &PeriodicFunction,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::Plain { m }.validate()?;
    opts.check_groups(groups)?;
    let raw = plain_series(m, groups, opts, |x, j| f.eval_reduced(x) / j)?;
    let model = TailModel::for_function(f)?;
    let ln_m = (m as f64).ln();
    let tail = model.family_tail(m as u64, ln_m, groups);
    Ok(QuadratureResult::new(raw, ln_m, groups, tail, model.heuristic))
}

/// Plain series applied to the composite `f(φ(x)) φ′(x)`.
pub fn integral_transformed(
    f: &PeriodicFunction,
    phi: &RealFn,
    dphi: &RealFn,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::Transformed {
        m,
        phi: phi.clone(),
        dphi: dphi.clone(),
    }
    .validate()?;
    opts.check_groups(groups)?;
    let composite = |x: f64| f.eval(phi(x)) * dphi(x);
    let raw = plain_series(m, groups, opts, |x, j| composite(x) / j)?;
    let model = TailModel::resolve(&composite, None, None)?;
    let ln_m = (m as f64).ln();
    let tail = model.family_tail(m as u64, ln_m, groups);
    Ok(QuadratureResult::new(raw, ln_m, groups, tail, true))
}

/// `G_φ(y) = Σ_{l<L} g(φ(l + y)) φ′(l + y)`.
pub fn lattice_denominator(l: u32, g: &dyn Fn(f64) -> f64, phi: &dyn Fn(f64) -> f64, dphi: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    (0..l)
        .map(|i| {
            let t = i as f64 + y;
            g(phi(t)) * dphi(t)
        })
        .sum()
}

/// Nodes `χ(x)` at `x = {log_M m}` with weights `g(x) / (m G_φ({χ(x)}))`.
#[allow(clippy::too_many_arguments)]
pub fn integral_lattice_nodes(
    f: &PeriodicFunction,
    g: &RealFn,
    chi: &RealFn,
    phi: &RealFn,
    dphi: &RealFn,
    l: u32,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::Lattice {
        m,
        l,
        chi: chi.clone(),
        phi: phi.clone(),
        dphi: dphi.clone(),
        g: g.clone(),
    }
    .validate()?;
    opts.check_groups(groups)?;
    let guard = FloorGuard::new(opts.denominator_floor);
    let composite = |x: f64| {
        let c = chi(x);
        let denom = lattice_denominator(l, g.as_ref(), phi.as_ref(), dphi.as_ref(), frac(c));
        if !guard.check(denom, c) {
            return 0.0;
        }
        f.eval(c) * g(x) / denom
    };
    let raw = guard.finish(plain_series(m, groups, opts, |x, j| composite(x) / j))?;
    let model = TailModel::resolve(&composite, None, None)?;
    let ln_m = (m as f64).ln();
    let tail = model.family_tail(m as u64, ln_m, groups);
    Ok(QuadratureResult::new(raw, ln_m, groups, tail, true))
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre8(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
        s += w * (g(mid - half * x) + g(mid + half * x));
    }
    s * half
}

/// `G(u) = Σ_{n≥L} g(L/(n+u)) (n+u)^{−2}` for `u ∈ [0, 1)`.
///
/// Summed directly up to `K` and closed with Euler–Maclaurin:
/// `∫_K^∞ h = (1/L) ∫_0^{L/(K+u)} g`, plus `h(K)/2 − h′(K)/12`. `K` is chosen so
/// that the first omitted correction, of size `~ max|g| K^{−5}/30`, is below
/// `inner_tol`.
pub fn cf_denominator(l: u32, g: &dyn Fn(f64) -> f64, u: f64, inner_tol: f64) -> f64 {
    let lf = l as f64;
    let extra = (1.0 / (30.0 * inner_tol.max(1e-16))).powf(0.2).ceil().max(50.0) as u32;
    let k = l + extra;
    let h = |t: f64| {
        let v = t + u;
        g(lf / v) / (v * v)
    };
    let mut acc = CompensatedAccumulator::new();
    for n in l..k {
        acc.add_finite(h(n as f64));
    }
    let kf = k as f64;
    let integral = gauss_legendre8(g, 0.0, lf / (kf + u)) / lf;
    let delta = 1e-2;
    let dh = (h(kf + delta) - h(kf - delta)) / (2.0 * delta);
    acc.add_finite(integral);
    acc.add_finite(0.5 * h(kf));
    acc.add_finite(-dh / 12.0);
    acc.value()
}

/// Nodes `{L/{log_M m}}` (with `{L/0} = 0`) and weights `g(x) / (m G(node))`;
/// the series equals `L ln M ∫₀¹ f`.
pub fn integral_cf_nodes(
    f: &PeriodicFunction,
    g: &RealFn,
    l: u32,
    m: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::ContinuedFraction { m, l, g: g.clone() }.validate()?;
    opts.check_groups(groups)?;
    let guard = FloorGuard::new(opts.denominator_floor);
    let lf = l as f64;
    let composite = |x: f64| {
        let node = reciprocal_frac(lf, x);
        let denom = cf_denominator(l, g.as_ref(), node, opts.inner_tol);
        if !guard.check(denom, node) {
            return 0.0;
        }
        f.eval_reduced(node) * g(x) / denom
    };
    let raw = guard.finish(plain_series(m, groups, opts, |x, j| composite(x) / j))?;
    let model = TailModel::resolve(&composite, None, None)?;
    let ln_m = (m as f64).ln();
    let tail = model.family_tail(m as u64, ln_m, groups);
    Ok(QuadratureResult::new(raw, lf * ln_m, groups, tail, true))
}

/// `ln(M/N) ∫₀¹ f` as the `M` family minus the `N` family, nodes `{ln m / ln(M/N)}`.
pub fn integral_rational_base(
    f: &PeriodicFunction,
    m: u32,
    n: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::RationalBase { m, n }.validate()?;
    opts.check_groups(groups)?;
    let ln_base = (m as f64 / n as f64).ln();
    let node = |j: u64| frac((j as f64).ln() / ln_base);
    let h = |x: f64, j: f64| f.eval_reduced(x) / j;
    let (mm, nn) = (m as u64, n as u64);
    let acc: PairAccumulator = opts.policy.reduce(1, groups, |g| {
        (paired_group(mm * g, mm, node, h), paired_group(nn * g, nn, node, h))
    })?;
    let raw = acc.first.value() - acc.second.value();
    let model = TailModel::for_function(f)?;
    let tail = model.family_tail(mm, ln_base, groups) + model.family_tail(nn, ln_base, groups);
    Ok(QuadratureResult::new(raw, ln_base, groups, tail, model.heuristic))
}

/// Per-`l` constants of the derivative form: multiplier `A_l = M^l N^{L−1−l}`
/// and coefficient `C(L−1, l) (−M)^l N^{L−1−l}`.
pub(crate) fn derivative_coefficients(m: u32, n: u32, l: u32) -> Vec<(f64, f64)> {
    let (mf, nf) = (m as f64, n as f64);
    let mut binom = 1.0;
    (0..l)
        .map(|i| {
            if i > 0 {
                binom = binom * (l - i) as f64 / i as f64;
            }
            let a = mf.powi(i as i32) * nf.powi((l - 1 - i) as i32);
            let c = binom * (-mf).powi(i as i32) * nf.powi((l - 1 - i) as i32);
            (a, c)
        })
        .collect()
}

/// `(L−1)! ln(M/N)^L ∫₀¹ f` from the binomial combination of series with
/// summand `(−ln w)^{L−1} w^{−1} f(log_{M/N} w)`. With `N = 1` the second
/// family is empty.
pub fn integral_derivative_form(
    f: &PeriodicFunction,
    m: u32,
    n: u32,
    l: u32,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    NodeScheme::DerivativeForm { m, n, l }.validate()?;
    opts.check_groups(groups)?;
    let ln_base = (m as f64 / n as f64).ln();
    let coeffs = derivative_coefficients(m, n, l);
    let power = (l - 1) as i32;
    let integer_base = n == 1;
    let weighted = |a: f64, j: f64| {
        let w = a * j;
        let node = if integer_base {
            log_frac_real(w, m as u64, ln_base)
        } else {
            frac(w.ln() / ln_base)
        };
        (-w.ln()).powi(power) / w * f.eval_reduced(node)
    };
    let family = |p: u64, g: u64| -> f64 {
        let mut acc = CompensatedAccumulator::new();
        for &(a, c) in &coeffs {
            acc.add_finite(c * paired_group(p * g, p, |j| j as f64, |j, _| weighted(a, j)));
        }
        acc.value()
    };
    let (mm, nn) = (m as u64, n as u64);
    let acc: PairAccumulator = opts.policy.reduce(1, groups, |g| (family(mm, g), family(nn, g)))?;
    let raw = acc.first.value() - acc.second.value();
    let normalizer = factorial(l - 1) * ln_base.powi(l as i32);

    let model = TailModel::for_function(f)?;
    let mut tail = 0.0;
    for &(a, c) in &coeffs {
        for p in [mm, nn] {
            if p < 2 {
                continue;
            }
            let pf = p as f64;
            let gap = (pf - 1.0) / (pf * ln_base.abs());
            let h = |t: f64| {
                let lam = (a * pf * (t + 1.0)).ln();
                let rho_part = model.c * model.modulus.rho(gap / t) * lam.powi(power);
                let sup_part = model.sup * (lam.powi(power) + power as f64 * lam.powi(power - 1)) / (2.0 * t);
                (c / a).abs() * (pf - 1.0) / pf * (rho_part + sup_part) / t
            };
            tail += condensed(&h, groups.max(1));
        }
    }
    Ok(QuadratureResult::new(raw, normalizer, groups, tail, true))
}

/// Dispatches on the scheme.
pub fn integrate(
    scheme: &NodeScheme,
    f: &PeriodicFunction,
    groups: u64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    match scheme {
        NodeScheme::Plain { m } => integral_logM(f, *m, groups, opts),
        NodeScheme::Transformed { m, phi, dphi } => integral_transformed(f, phi, dphi, *m, groups, opts),
        NodeScheme::Lattice { m, l, chi, phi, dphi, g } => {
            integral_lattice_nodes(f, g, chi, phi, dphi, *l, *m, groups, opts)
        }
        NodeScheme::ContinuedFraction { m, l, g } => integral_cf_nodes(f, g, *l, *m, groups, opts),
        NodeScheme::RationalBase { m, n } => integral_rational_base(f, *m, *n, groups, opts),
        NodeScheme::DerivativeForm { m, n, l } => integral_derivative_form(f, *m, *n, *l, groups, opts),
    }
}
