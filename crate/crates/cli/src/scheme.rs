//! Scheme flags and their translation into core node schemes.

use std::sync::Arc;

use clap::{Args, ValueEnum};
use zsk_core::quadrature::{ModulusOfContinuity, NodeScheme, PeriodicFunction, RealFn};

use crate::error::CliError;
use crate::expr::{Expr, Vars, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Plain,
    Transformed,
    Lattice,
    Bspl,
    Cf,
    Rational,
    Derivative,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value = "plain")]
    pub scheme: SchemeKind,
    #[arg(long = "M", default_value_t = 2)]
    pub m: u32,
    /// Second base of the rational and derivative schemes.
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// Lattice period, continued-fraction numerator or derivative order.
    #[arg(long = "L")]
    pub l: Option<u32>,
    /// Substitution `phi(x)` for the transformed and lattice schemes.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub dphi: Option<String>,
    /// Left inverse of `phi` for the lattice scheme.
    #[arg(long)]
    pub chi: Option<String>,
    /// Weight `g(x)` of the lattice and continued-fraction schemes.
    #[arg(long)]
    pub g: Option<String>,
}

fn real_fn(src: &str) -> Result<RealFn, CliError> {
    let e = Arc::new(Expr::parse_with(src, &[Var::X])?);
    Ok(Arc::new(move |x: f64| e.eval_real(&Vars::at_x(x)).unwrap_or(f64::NAN)))
}

fn required(field: &Option<String>, name: &str, scheme: &str) -> Result<RealFn, CliError> {
    match field {
        Some(src) => real_fn(src),
        None => Err(CliError::Config(format!("the {scheme} scheme needs --{name}"))),
    }
}

impl SchemeArgs {
    pub fn build(&self) -> Result<NodeScheme, CliError> {
        let m = self.m;
        let scheme = match self.scheme {
            SchemeKind::Plain => NodeScheme::Plain { m },
            SchemeKind::Transformed => NodeScheme::Transformed {
                m,
                phi: required(&self.phi, "phi", "transformed")?,
                dphi: required(&self.dphi, "dphi", "transformed")?,
            },
            SchemeKind::Lattice => NodeScheme::Lattice {
                m,
                l: self.l.unwrap_or(1),
                chi: required(&self.chi, "chi", "lattice")?,
                phi: required(&self.phi, "phi", "lattice")?,
                dphi: required(&self.dphi, "dphi", "lattice")?,
                g: real_fn(self.g.as_deref().unwrap_or("1"))?,
            },
            SchemeKind::Bspl => NodeScheme::rational_lattice(m),
            SchemeKind::Cf => NodeScheme::ContinuedFraction {
                m,
                l: self.l.unwrap_or(1),
                g: real_fn(self.g.as_deref().unwrap_or("1"))?,
            },
            SchemeKind::Rational => NodeScheme::RationalBase {
                m,
                n: self.n.ok_or_else(|| CliError::Config("the rational scheme needs --N".into()))?,
            },
            SchemeKind::Derivative => NodeScheme::DerivativeForm {
                m,
                n: self.n.unwrap_or(1),
                l: self.l.unwrap_or(2),
            },
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// An integrand parsed from `x`-only source, plus its declared modulus.
pub struct Integrand {
    pub expr: Arc<Expr>,
    pub function: PeriodicFunction,
    pub modulus_label: String,
}

/// Grid used to catch domain errors before a long run.
const SCAN_POINTS: u32 = 4096;

impl Integrand {
    pub fn parse(src: &str, lipschitz: Option<&[f64]>) -> Result<Self, CliError> {
        let expr = Arc::new(Expr::parse_with(src, &[Var::X])?);
        for i in 0..SCAN_POINTS {
            let x = (i as f64 + 0.5) / SCAN_POINTS as f64;
            expr.eval_real(&Vars::at_x(x)).map_err(|e| CliError::Domain(format!("{e} at x = {x}")))?;
        }
        expr.eval_real(&Vars::at_x(0.0)).map_err(|e| CliError::Domain(format!("{e} at x = 0")))?;
        let e = Arc::clone(&expr);
        let mut function = PeriodicFunction::new(move |x: f64| e.eval_real(&Vars::at_x(x)).unwrap_or(f64::NAN));
        let modulus_label = match lipschitz {
            None => "smooth".to_string(),
            Some([a, c]) => {
                function = function.with_modulus(ModulusOfContinuity::lipschitz(*a, Some(*c))?);
                format!("lipschitz({a}, {c})")
            }
            Some(_) => return Err(CliError::Config("--lipschitz takes two numbers: a,C".into())),
        };
        Ok(Self {
            expr,
            function,
            modulus_label,
        })
    }
}
