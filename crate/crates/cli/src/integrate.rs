//! `zsk integrate` and `zsk nodes`.

use clap::{ArgAction, Args};
use serde_json::{json, Value};
use zsk_core::quadrature::{integrate, node_stream, NodeScheme, QuadratureOptions, QuadratureResult};

use crate::config::CommonArgs;
use crate::error::CliError;
use crate::output::{num, Report};
use crate::scheme::{Integrand, SchemeArgs, SchemeKind};

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct IntegrateArgs {
    /// Integrand in `x`, e.g. "sin(2*pi*x)^2".
    pub expr: String,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub groups: u64,
    /// Declares a Lipschitz modulus `|f(x)−f(y)| ≤ C|x−y|^a`; without it the
    /// integrand is treated as smooth and the tail is heuristic.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1)]
    pub lipschitz: Option<Vec<f64>>,
    /// Adds rows at every power of ten below `--groups`.
    #[arg(long)]
    pub table: bool,
    /// Expected value; a miss beyond `--tol` exits with status 2.
    #[arg(long, allow_hyphen_values = true)]
    pub expect: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Raises the group limit of the core's tolerance settings.
    #[arg(long)]
    pub max_terms: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn options(common: &CommonArgs, max_terms: Option<u64>) -> Result<QuadratureOptions, CliError> {
    let mut opts = QuadratureOptions::default().with_policy(common.policy()?);
    if let Some(t) = max_terms {
        opts.tol = opts.tol.with_max_terms(t)?;
    }
    Ok(opts)
}

/// Powers of ten below `groups`, then `groups` itself.
pub fn decades(groups: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |g| g.checked_mul(10)).take_while(|&g| g < groups).collect();
    out.push(groups);
    out
}

pub fn result_row(r: &QuadratureResult, seconds: Option<f64>) -> Vec<Value> {
    vec![
        json!(r.groups_used),
        num(r.value),
        num(r.raw_series_sum),
        num(r.normalizer),
        num(r.tail_estimate),
        json!(r.tail_heuristic),
        seconds.map(num).unwrap_or(Value::Null),
    ]
}

pub fn run(args: &IntegrateArgs) -> Result<(), CliError> {
    if args.groups == 0 {
        return Err(CliError::Config("--groups must be at least 1".into()));
    }
    let scheme = args.scheme.build()?;
    let integrand = Integrand::parse(&args.expr, args.lipschitz.as_deref())?;
    let opts = options(&args.common, args.max_terms)?;
    let columns = vec!["groups", "value", "raw_series_sum", "normalizer", "tail_estimate", "tail_heuristic", "seconds"];
    let mut report = Report::new("integrate", columns);
    report.set("expression", json!(integrand.expr.to_string()));
    report.set("scheme", json!(format!("{scheme:?}")));
    report.set("modulus", json!(integrand.modulus_label));
    report.set("threads", json!(opts.policy.threads()));
    report.set("chunk", json!(opts.policy.chunk()));

    let sizes = if args.table { decades(args.groups) } else { vec![args.groups] };
    let mut last = None;
    for g in sizes {
        let start = std::time::Instant::now();
        let r = integrate(&scheme, &integrand.function, g, &opts)?;
        let seconds = (!args.common.no_timing).then(|| start.elapsed().as_secs_f64());
        report.push(result_row(&r, seconds));
        last = Some(r);
    }
    let r = last.expect("at least one size");
    report.set("value", num(r.value));
    report.set("tail_estimate", num(r.tail_estimate));
    report.set("tail_heuristic", json!(r.tail_heuristic));
    report.set("groups", json!(r.groups_used));
    let verdict = args.expect.map(|target| {
        let err = (r.value - target).abs();
        (err <= args.tol, err, target)
    });
    if let Some((pass, err, target)) = verdict {
        report.set("expect", json!({"target": target, "tol": args.tol, "abs_err": num(err), "pass": pass}));
    }
    report.emit(&args.common)?;
    match verdict {
        Some((false, err, target)) => Err(CliError::Tolerance(format!("|{} - {target}| = {err:e} > {}", r.value, args.tol))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct NodesArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Number of rows to emit.
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn run_nodes(args: &NodesArgs) -> Result<(), CliError> {
    let scheme = args.scheme.build()?;
    let rows = node_stream(&scheme, args.count)?;
    let with_family = matches!(scheme, NodeScheme::RationalBase { .. } | NodeScheme::DerivativeForm { .. });
    let with_g = matches!(args.scheme.scheme, SchemeKind::Lattice | SchemeKind::Cf | SchemeKind::Bspl);
    let mut columns = vec!["group", "k", "node", "weight"];
    if with_family {
        columns.push("family");
    }
    if with_g {
        columns.push("g_value");
    }
    let mut report = Report::new("nodes", columns);
    report.set("scheme", json!(format!("{scheme:?}")));
    for row in rows.iter().take(args.count) {
        let mut cells = vec![json!(row.group), json!(row.k), num(row.node), num(row.weight)];
        if with_family {
            cells.push(json!(row.family));
        }
        if with_g {
            cells.push(row.g_value.map(num).unwrap_or(Value::Null));
        }
        report.push(cells);
    }
    let mut common = args.common.clone();
    common.format.get_or_insert(crate::config::Format::Csv);
    // Node dumps are data, not runs; they carry no timing.
    common.no_timing = true;
    report.emit(&common)
}
