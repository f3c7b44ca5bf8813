use std::fmt;
use std::sync::Arc;

use super::QuadratureError;

/// Shared real map, safe to call from several threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Threshold below which the loglog modulus uses its closed form; above it
/// the modulus is held constant so it stays monotone on all of `(0, ∞)`.
const LOGLOG_KNEE: f64 = 0.065_988_035_845_312_54; // e^{-e}

#[derive(Clone)]
pub enum ModulusKind {
    /// `ρ(t) = t^a`, `0 < a ≤ 1`.
    Lipschitz { exponent: f64 },
    /// `ρ(t) = 1 / (|ln t| · |ln|ln t||^b)`, `b > 1`.
    LogLog { b: f64 },
    /// Any positive non-decreasing map.
    Custom(RealFn),
}

impl fmt::Debug for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lipschitz { exponent } => write!(f, "Lipschitz({exponent})"),
            Self::LogLog { b } => write!(f, "LogLog({b})"),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Modulus of continuity `ρ` with an optional constant `C` such that
/// `|f(x) − f(y)| ≤ C ρ(|x − y|)`.
#[derive(Debug, Clone)]
pub struct ModulusOfContinuity {
    kind: ModulusKind,
    constant: Option<f64>,
    label: String,
}

impl ModulusOfContinuity {
    pub fn lipschitz(exponent: f64, constant: Option<f64>) -> Result<Self, QuadratureError> {
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(QuadratureError::InvalidModulus("Lipschitz exponent must lie in (0, 1]"));
        }
        check_constant(constant)?;
        Ok(Self {
            kind: ModulusKind::Lipschitz { exponent },
            constant,
            label: format!("lipschitz({exponent})"),
        })
    }

    pub fn loglog(b: f64, constant: Option<f64>) -> Result<Self, QuadratureError> {
        if !(b > 1.0 && b.is_finite()) {
            return Err(QuadratureError::InvalidModulus("loglog exponent must exceed 1"));
        }
        check_constant(constant)?;
        Ok(Self {
            kind: ModulusKind::LogLog { b },
            constant,
            label: format!("loglog({b})"),
        })
    }

    /// A caller-supplied `ρ`. Positivity and monotonicity are spot-checked on a
    /// log-spaced grid over `(1e-12, 1]`.
    pub fn custom(label: impl Into<String>, rho: RealFn, constant: Option<f64>) -> Result<Self, QuadratureError> {
        check_constant(constant)?;
        let mut prev = 0.0;
        for i in 0..=240 {
            let t = 10f64.powf(-12.0 + i as f64 * 0.05);
            let r = rho(t);
            if !(r > 0.0 && r.is_finite()) || r < prev {
                return Err(QuadratureError::InvalidModulus("custom modulus must be positive and non-decreasing"));
            }
            prev = r;
        }
        Ok(Self {
            kind: ModulusKind::Custom(rho),
            constant,
            label: label.into(),
        })
    }

    pub fn kind(&self) -> &ModulusKind {
        &self.kind
    }

    pub fn constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_constant(mut self, constant: f64) -> Result<Self, QuadratureError> {
        check_constant(Some(constant))?;
        self.constant = Some(constant);
        Ok(self)
    }

    pub fn rho(&self, t: f64) -> f64 {
        match &self.kind {
            ModulusKind::Lipschitz { exponent } => t.powf(*exponent),
            ModulusKind::LogLog { b } => {
                let t = t.min(LOGLOG_KNEE);
                let l = -t.ln();
                1.0 / (l * l.ln().powf(*b))
            }
            ModulusKind::Custom(rho) => rho(t),
        }
    }

    /// Partial sum `Σ_{2≤n≤N} ρ(1/n²)(ln n)^L / n`.
    pub fn class_b_partial_sum(&self, l: u32, n_max: u64) -> f64 {
        (2..=n_max)
            .map(|n| {
                let nf = n as f64;
                self.rho(1.0 / (nf * nf)) * nf.ln().powi(l as i32) / nf
            })
            .sum()
    }

    /// Whether `ρ` belongs to the class `B_L`.
    ///
    /// Exact for the Lipschitz (always) and loglog (`b > L + 1`) kinds. A custom
    /// `ρ` is accepted when the dyadic blocks of the series shrink
    /// geometrically over `n ∈ [2^10, 2^20]`.
    pub fn is_class_b(&self, l: u32) -> bool {
        match &self.kind {
            ModulusKind::Lipschitz { .. } => true,
            ModulusKind::LogLog { b } => *b > l as f64 + 1.0,
            ModulusKind::Custom(_) => {
                let block = |i: u32| -> f64 {
                    let n0 = 1u64 << i;
                    let nf = n0 as f64;
                    // Condensed block: n0 terms near n0.
                    nf * self.rho(1.0 / (nf * nf)) * nf.ln().powi(l as i32) / nf
                };
                let blocks: Vec<f64> = (10..=20).map(block).collect();
                blocks.windows(2).all(|w| w[1] <= 0.95 * w[0])
            }
        }
    }
}

fn check_constant(constant: Option<f64>) -> Result<(), QuadratureError> {
    match constant {
        Some(c) if !(c >= 0.0 && c.is_finite()) => Err(QuadratureError::InvalidModulus("modulus constant must be finite and non-negative")),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothnessHint {
    TrigPolynomial(u32),
    Smooth,
    Rough,
}

/// A 1-periodic real function. Arguments are reduced mod 1 before evaluation.
#[derive(Clone)]
pub struct PeriodicFunction {
    eval: RealFn,
    modulus: Option<ModulusOfContinuity>,
    hint: SmoothnessHint,
    sup: Option<f64>,
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction")
            .field("modulus", &self.modulus)
            .field("hint", &self.hint)
            .field("sup", &self.sup)
            .finish_non_exhaustive()
    }
}

impl PeriodicFunction {
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_arc(Arc::new(eval))
    }

    pub fn from_arc(eval: RealFn) -> Self {
        Self {
            eval,
            modulus: None,
            hint: SmoothnessHint::Smooth,
            sup: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::new(move |_| c);
        f.modulus = ModulusOfContinuity::lipschitz(1.0, Some(0.0)).ok();
        f.hint = SmoothnessHint::TrigPolynomial(0);
        f.sup = Some(c.abs());
        f
    }

    pub fn with_modulus(mut self, modulus: ModulusOfContinuity) -> Self {
        self.modulus = Some(modulus);
        self
    }

    pub fn with_hint(mut self, hint: SmoothnessHint) -> Self {
        self.hint = hint;
        self
    }

    /// Declares `max |f|`.
    pub fn with_sup(mut self, sup: f64) -> Self {
        self.sup = Some(sup.abs());
        self
    }

    pub fn modulus(&self) -> Option<&ModulusOfContinuity> {
        self.modulus.as_ref()
    }

    pub fn hint(&self) -> SmoothnessHint {
        self.hint
    }

    pub fn sup(&self) -> Option<f64> {
        self.sup
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let r = x - x.floor();
        (self.eval)(if r >= 1.0 { 0.0 } else { r })
    }

    /// Evaluation without the mod-1 reduction, for arguments already in `[0, 1)`.
    #[inline]
    pub(crate) fn eval_reduced(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Largest observed `|f(x) − f(y)| / (C ρ(|x − y|))` over `pairs` points
    /// of a Weyl sequence; values above one indicate a violated modulus.
    pub fn modulus_violation(&self, pairs: usize) -> Option<f64> {
        let modulus = self.modulus.as_ref()?;
        let c = modulus.constant()?;
        let alpha = 0.618_033_988_749_894_9;
        let beta = 0.414_213_562_373_095_1;
        let mut worst: f64 = 0.0;
        for i in 0..pairs {
            let x = (i as f64 * alpha).fract();
            let y = (i as f64 * beta + 0.5).fract();
            let d = (x - y).abs().min(1.0 - (x - y).abs());
            if d == 0.0 {
                continue;
            }
            let allowed = c * modulus.rho(d);
            let diff = (self.eval(x) - self.eval(y)).abs();
            if allowed > 0.0 {
                worst = worst.max(diff / allowed);
            } else if diff > 0.0 {
                worst = f64::INFINITY;
            }
        }
        Some(worst)
    }
}
