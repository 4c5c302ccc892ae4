//! Flags, the optional TOML config file, and their merge.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use affine_yangian::evalmap::EvalParams;
use affine_yangian::{RankData, Scalar};
use clap::ValueEnum;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Rank(#[from] affine_yangian::foundation::FoundationError),
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("--{flag}: {message}")]
    Invalid { flag: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Every option of every command. Unset fields take command defaults; the
/// resolved copy is echoed in the report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Truncation window: modes in [-N, N] are compared.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<i32>,
    /// Largest summation index kept when expanding tails.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smax: Option<i64>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Relation ids to keep, e.g. eq2.1,eq2.5.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<String>>,
    /// Relation ids to drop.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip: Option<Vec<String>>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Rational value for ε1; symbolic when unset.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps1: Option<String>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<String>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Dynkin node.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    /// Loop mode.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i32>,
    /// Term of the commutator expansion, 3 to 6.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<u8>,
    /// Matrix row of a diagonal target.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
}

macro_rules! merge_fields {
    ($a:expr, $b:expr; $($f:ident),*) => {
        RunConfig { $($f: $a.$f.clone().or_else(|| $b.$f.clone())),* }
    };
}

impl RunConfig {
    /// Fields set in `self` win over `file`.
    pub fn over(&self, file: &RunConfig) -> RunConfig {
        merge_fields!(self, file; m, n, window, smax, mode, only, skip, format, out, eps1, eps2, alpha, i, a, term, row)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    pub fn rank(&self) -> Result<RankData, ConfigError> {
        Ok(RankData::new(self.m.unwrap_or(3), self.n.unwrap_or(2))?)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn params(&self) -> Result<EvalParams<Scalar>, ConfigError> {
        let rank = self.rank()?;
        let value = |flag: &'static str, s: &Option<String>, formal: Scalar| -> Result<Scalar, ConfigError> {
            match s {
                None => Ok(formal),
                Some(v) => BigRational::from_str(v.trim())
                    .map(Scalar::from_rational)
                    .map_err(|_| ConfigError::Invalid {
                        flag,
                        message: format!("{v:?} is not a rational number"),
                    }),
            }
        };
        Ok(EvalParams::new(
            rank,
            value("eps1", &self.eps1, Scalar::eps1())?,
            value("eps2", &self.eps2, Scalar::eps2())?,
            value("alpha", &self.alpha, Scalar::alpha())?,
        ))
    }

    /// Fills the rank so the echo is explicit.
    pub fn with_rank(mut self) -> Self {
        self.m = Some(self.m.unwrap_or(3));
        self.n = Some(self.n.unwrap_or(2));
        self
    }
}

pub fn invalid(flag: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        flag,
        message: message.into(),
    }
}
