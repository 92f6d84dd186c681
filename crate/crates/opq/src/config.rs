//! Run configuration: defaults, an optional TOML file and command-line flags,
//! merged in that order of increasing priority.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use opq_core::jacobi::JacobiParams;
use opq_core::sobolev::SobolevParams;
use opq_core::{Precision, Real};
use serde::{Deserialize, Serialize};

use crate::error::OpqError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// A partial configuration. Every field is optional so that layers can be
/// stacked; see [`ConfigLayer::over`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub precision_bits: Option<u32>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    #[serde(rename = "M")]
    pub m: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<String>,
    pub a: Option<String>,
    pub n_max: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub l: Option<usize>,
    pub j: Option<usize>,
}

macro_rules! pick {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        ConfigLayer { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, OpqError> {
        toml::from_str(text).map_err(|e| OpqError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, OpqError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OpqError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `self` where set, `lower` otherwise.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        pick!(self, lower, precision_bits, alpha, beta, m, n, a, n_max, format, out, seed, k, s, l, j)
    }
}

/// Which command is running; decides the command-specific defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Scan,
    Figure,
    Table,
}

impl CommandKind {
    pub fn defaults(self) -> ConfigLayer {
        let n_max = match self {
            CommandKind::Verify | CommandKind::Table => 30,
            CommandKind::Scan | CommandKind::Figure => 4096,
        };
        ConfigLayer {
            precision_bits: Some(256),
            alpha: Some("0.5".into()),
            beta: Some("2.5".into()),
            m: Some("1".into()),
            n: Some("1".into()),
            a: Some("-1".into()),
            n_max: Some(n_max),
            format: Some(Format::Csv),
            out: None,
            seed: Some(0),
            k: None,
            s: None,
            l: None,
            j: None,
        }
    }
}

/// The effective, validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub alpha: String,
    pub beta: String,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "N")]
    pub n: String,
    pub a: String,
    pub n_max: usize,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

impl RunConfig {
    /// Merges `flags > file > defaults` and validates the result. Masses are
    /// checked here, before any computation.
    pub fn resolve(kind: CommandKind, flags: ConfigLayer, file: Option<ConfigLayer>) -> Result<Self, OpqError> {
        let merged = flags.over(file.unwrap_or_default()).over(kind.defaults());
        let cfg = RunConfig {
            precision_bits: merged.precision_bits.unwrap_or(256),
            alpha: merged.alpha.unwrap_or_default(),
            beta: merged.beta.unwrap_or_default(),
            m: merged.m.unwrap_or_default(),
            n: merged.n.unwrap_or_default(),
            a: merged.a.unwrap_or_default(),
            n_max: merged.n_max.unwrap_or(1),
            format: merged.format.unwrap_or_default(),
            out: merged.out,
            seed: merged.seed.unwrap_or(0),
            k: merged.k,
            s: merged.s,
            l: merged.l,
            j: merged.j,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), OpqError> {
        if self.n_max < 1 {
            return Err(OpqError::Config("n_max must be at least 1".into()));
        }
        let prec = self.prec()?;
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("a", &self.a)] {
            parse(name, v, prec)?;
        }
        self.sobolev()?;
        Ok(())
    }

    pub fn prec(&self) -> Result<Precision, OpqError> {
        Precision::new(self.precision_bits).map_err(|e| OpqError::Config(e.to_string()))
    }

    pub fn jacobi(&self) -> Result<JacobiParams, OpqError> {
        let prec = self.prec()?;
        let p = JacobiParams::new(parse("alpha", &self.alpha, prec)?, parse("beta", &self.beta, prec)?)?;
        Ok(p)
    }

    pub fn sobolev(&self) -> Result<SobolevParams, OpqError> {
        let prec = self.prec()?;
        let sp = SobolevParams::new(
            parse("M", &self.m, prec)?,
            parse("N", &self.n, prec)?,
            parse("a", &self.a, prec)?,
        )?;
        Ok(sp)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig is always representable as TOML")
    }
}

fn parse(name: &str, v: &str, prec: Precision) -> Result<Real, OpqError> {
    Real::parse(v, prec).map_err(|_| OpqError::Config(format!("{name}: {v:?} is not a decimal number")))
}
