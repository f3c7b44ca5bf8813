//! `--config` files and the settings shared by every subcommand.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use zsk_core::ExecPolicy;

use crate::error::CliError;

pub const THREADS_ENV: &str = "ZSK_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML file of `flag = value` lines; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially. Defaults to $ZSK_THREADS, then all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Groups per reduction chunk.
    #[arg(long)]
    pub chunk: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave wall-clock fields out of reports so repeated runs compare equal.
    #[arg(long)]
    pub no_timing: bool,
}

impl CommonArgs {
    pub fn policy(&self) -> Result<ExecPolicy, CliError> {
        let threads = match self.threads {
            Some(t) => Some(t),
            None => match std::env::var(THREADS_ENV) {
                Ok(v) if !v.trim().is_empty() => Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
                ),
                _ => None,
            },
        };
        let policy = match threads {
            Some(0) => return Err(CliError::Config("threads must be at least 1".into())),
            Some(1) => ExecPolicy::sequential(),
            Some(t) => ExecPolicy::parallel(Some(t)),
            None => ExecPolicy::parallel(None),
        };
        Ok(match self.chunk {
            Some(0) => return Err(CliError::Config("chunk must be at least 1".into())),
            Some(c) => policy.with_chunk(c),
            None => policy,
        })
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

/// Finds `--config PATH` or `--config=PATH` in raw arguments.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Turns a TOML table into flag tokens: `M = 3` becomes `--M 3`, arrays are
/// comma-joined and `true` booleans become bare flags.
pub fn config_tokens(text: &str) -> Result<Vec<OsString>, CliError> {
    let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("config file: {e}")))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let rendered = match value {
            toml::Value::Boolean(true) => {
                out.push(flag.into());
                continue;
            }
            toml::Value::Boolean(false) => continue,
            toml::Value::Array(items) => items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(","),
            other => scalar(&other)?,
        };
        out.push(format!("{flag}={rendered}").into());
    }
    Ok(out)
}

fn scalar(v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(format!("{f:?}")),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(CliError::Config(format!("config value {v} is not a scalar"))),
    }
}

fn read_config(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    config_tokens(&text)
}

/// Splices config-file flags in right after the subcommand name so that
/// flags given on the command line override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let tokens = read_config(&path)?;
    let at = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(args.len());
    let mut out = args[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
