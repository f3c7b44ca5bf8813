//! `zsk sweep`: one run per grid point, for error-versus-parameter tables.

use clap::{ArgAction, Args, ValueEnum};
use serde_json::{json, Value};
use zsk_core::lattice::{closed_form_suite, lattice_sum_single, PhiParams, DEFAULT_RANGE};
use zsk_core::numerics::{periodic_trapezoid_integral, ToleranceConfig};
use zsk_core::quadrature::integrate;

use crate::config::CommonArgs;
use crate::error::CliError;
use crate::integrate::options;
use crate::output::{num, Report};
use crate::scheme::{Integrand, SchemeArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Integrate,
    ClosedForm,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Groups,
    Z,
    #[value(name = "M")]
    M,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub target: SweepTarget,
    /// Integrand in `x` for the integrate target.
    pub expr: Option<String>,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Explicit grid values.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true)]
    pub values: Vec<f64>,
    /// Arithmetic grid `start:stop:step`, stop excluded.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub groups: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z: f64,
    /// Which of the four elementary identities (1 to 4).
    #[arg(long, default_value_t = 1)]
    pub identity: u32,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long = "J", default_value_t = 0)]
    pub j: u32,
    /// Exact integral; a 2^16-point trapezoid value is used when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub exact: Option<f64>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub lipschitz: Option<Vec<f64>>,
    #[arg(long)]
    pub max_terms: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("grid {spec:?} is not start:stop:step")))?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Config(format!("grid {spec:?} is not start:stop:step")));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config("grid step must be positive and bounds finite".into()));
    }
    let count = ((stop - start) / step - 1e-9).ceil().max(0.0) as usize;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn grid(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let mut values = args.values.clone();
    if let Some(spec) = &args.grid {
        values.extend(parse_grid(spec)?);
    }
    if values.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    Ok(values)
}

fn as_count(v: f64, name: &str) -> Result<u64, CliError> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e18 {
        Ok(v as u64)
    } else {
        Err(CliError::Config(format!("{name} value {v} is not a positive integer")))
    }
}

/// Trend of the error column: constant values, or the direction of the error.
pub fn trend(values: &[f64], errors: &[f64]) -> &'static str {
    let v0 = values[0];
    if values.iter().all(|v| (v - v0).abs() <= 1e-10 * v0.abs().max(1.0)) {
        return "constant";
    }
    if errors.windows(2).all(|w| w[1] <= w[0]) {
        "decreasing"
    } else if errors.windows(2).all(|w| w[1] >= w[0]) {
        "increasing"
    } else {
        "mixed"
    }
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let values = grid(args)?;
    let policy = args.common.policy()?;
    let columns = vec!["param", "value", "reference", "error", "tail_estimate", "seconds"];
    let mut report = Report::new("sweep", columns);
    report.set("target", json!(args.target.to_possible_value().map(|v| v.get_name().to_string())));
    report.set("param", json!(args.param.to_possible_value().map(|v| v.get_name().to_string())));
    let (mut vals, mut errs) = (Vec::new(), Vec::new());

    let integrand = match args.target {
        SweepTarget::Integrate => {
            let src = args.expr.as_deref().ok_or_else(|| CliError::Config("sweep integrate needs an expression".into()))?;
            Some(Integrand::parse(src, args.lipschitz.as_deref())?)
        }
        _ => None,
    };
    let reference = match (&integrand, args.exact) {
        (_, Some(v)) => Some((v, "exact")),
        (Some(f), None) => Some((periodic_trapezoid_integral(|x| f.function.eval(x), 1 << 16)?, "trapezoid")),
        (None, None) => None,
    };
    if let Some((_, kind)) = reference {
        report.set("reference_kind", json!(kind));
    }
    if args.target != SweepTarget::Integrate && args.param == SweepParam::Groups {
        return Err(CliError::Config("identity sweeps take --param z or M".into()));
    }
    if args.target == SweepTarget::ClosedForm && args.param == SweepParam::M {
        return Err(CliError::Config("closed-form sweeps take --param z".into()));
    }
    if !(1..=4).contains(&args.identity) {
        return Err(CliError::Config("--identity must be 1, 2, 3 or 4".into()));
    }

    for &v in &values {
        let start = std::time::Instant::now();
        let (value, target, tail) = match args.target {
            SweepTarget::Integrate => {
                let f = integrand.as_ref().expect("parsed above");
                let mut scheme_args = args.scheme.clone();
                let mut groups = args.groups;
                match args.param {
                    SweepParam::Groups => groups = as_count(v, "groups")?,
                    SweepParam::M => scheme_args.m = as_count(v, "M")? as u32,
                    SweepParam::Z => return Err(CliError::Config("integrate sweeps take --param groups or M".into())),
                }
                let scheme = scheme_args.build()?;
                let r = integrate(&scheme, &f.function, groups, &options(&args.common, args.max_terms)?)?;
                (r.value, reference.map(|r| r.0).unwrap_or(f64::NAN), num(r.tail_estimate))
            }
            SweepTarget::ClosedForm => {
                let rows = closed_form_suite(v, DEFAULT_RANGE, &policy)?;
                (rows[(args.identity - 1) as usize].result.value, 1.0, Value::Null)
            }
            SweepTarget::Lattice => {
                let (m, z) = match args.param {
                    SweepParam::M => (as_count(v, "M")? as u32, args.z),
                    _ => (args.scheme.m, v),
                };
                let p = PhiParams::new(args.a, args.b, m, args.j)?;
                let r = lattice_sum_single(&p, z, DEFAULT_RANGE, &policy, &ToleranceConfig::default())?;
                (r.value, r.target, Value::Null)
            }
        };
        let seconds = (!args.common.no_timing).then(|| start.elapsed().as_secs_f64());
        let err = (value - target).abs();
        report.push(vec![num(v), num(value), num(target), num(err), tail, seconds.map(num).unwrap_or(Value::Null)]);
        vals.push(value);
        errs.push(err);
    }
    let t = trend(&vals, &errs);
    report.set("trend", json!(t));
    report.emit(&args.common)?;
    eprintln!("trend: {t} over {} points", vals.len());
    Ok(())
}
