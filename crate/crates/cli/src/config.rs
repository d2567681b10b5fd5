//! Run configuration, read from a JSON file and overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ecd_core::{ComponentSet, EcdParams, Grid, SchurTarget, SystemKind, SystemSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID_COUNT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Dist,
    OrderCheck,
    Examples,
    SchurScan,
    McVerify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RelationChoice {
    St,
    Hr,
    Rh,
    Lr,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ExampleChoice {
    #[serde(rename = "1")]
    #[value(name = "1")]
    One,
    #[serde(rename = "2")]
    #[value(name = "2")]
    Two,
    #[serde(rename = "3")]
    #[value(name = "3")]
    Three,
    #[serde(rename = "4")]
    #[value(name = "4")]
    Four,
    #[serde(rename = "fig1")]
    #[value(name = "fig1")]
    Fig1,
    #[serde(rename = "fig2")]
    #[value(name = "fig2")]
    Fig2,
    #[serde(rename = "all")]
    #[value(name = "all")]
    All,
}

/// One component's parameters (the `dist` command, fixed Schur parameters).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// A system description. Length-1 vectors are broadcast to the component
/// count.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SystemKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

/// Either explicit `points`, or `min`/`max` with optional `count` and
/// `spacing`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_a: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_b: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SchurTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks the `command` field against the subcommand actually run.
    pub fn claim(&mut self, command: CommandName) -> anyhow::Result<()> {
        match self.command {
            Some(c) if c != command => bail!(
                "config file is for `{}`, not `{}`",
                command_label(c),
                command_label(command)
            ),
            _ => {
                self.command = Some(command);
                Ok(())
            }
        }
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_default()
    }
}

pub fn command_label(c: CommandName) -> &'static str {
    match c {
        CommandName::Dist => "dist",
        CommandName::OrderCheck => "order-check",
        CommandName::Examples => "examples",
        CommandName::SchurScan => "schur-scan",
        CommandName::McVerify => "mc-verify",
    }
}

/// Replaces `slot` with `flag` when the flag was given.
pub fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

impl ParamsConfig {
    pub fn resolve(&self) -> anyhow::Result<EcdParams> {
        let alpha = self.alpha.context("missing --alpha")?;
        let beta = self.beta.context("missing --beta")?;
        let lambda = self.lambda.context("missing --lambda")?;
        Ok(EcdParams::new(alpha, beta, lambda)?)
    }

    /// Fixed parameters with unset entries taken as 1.
    pub fn resolve_or_unit(&self) -> anyhow::Result<EcdParams> {
        Ok(EcdParams::new(
            self.alpha.unwrap_or(1.0),
            self.beta.unwrap_or(1.0),
            self.lambda.unwrap_or(1.0),
        )?)
    }
}

impl SystemConfig {
    pub fn resolve(&self, label: char) -> anyhow::Result<SystemSpec> {
        let lower = label.to_ascii_lowercase();
        let kind = self.kind.context("missing --kind")?;
        let alpha = self.alpha.as_deref().with_context(|| format!("missing --{lower}-alpha"))?;
        let beta = self.beta.as_deref().with_context(|| format!("missing --{lower}-beta"))?;
        let lambda = self
            .lambda
            .as_deref()
            .with_context(|| format!("missing --{lower}-lambda"))?;
        let comps = ComponentSet::from_vectors(alpha, beta, lambda)
            .with_context(|| format!("system {label}"))?;
        Ok(SystemSpec::new(comps, kind))
    }
}

impl GridConfig {
    /// `None` when neither points nor a range were given.
    pub fn resolve(&self) -> anyhow::Result<Option<Grid>> {
        if let Some(points) = &self.points {
            if self.min.is_some() || self.max.is_some() || self.count.is_some() {
                bail!("grid points cannot be combined with a grid range");
            }
            return Ok(Some(Grid::new(points.clone())?));
        }
        match (self.min, self.max) {
            (None, None) => {
                if self.count.is_some() || self.spacing.is_some() {
                    bail!("grid count or spacing given without --grid-min/--grid-max");
                }
                Ok(None)
            }
            (Some(min), Some(max)) => {
                let count = self.count.unwrap_or(DEFAULT_GRID_COUNT);
                let grid = match self.spacing.unwrap_or_default() {
                    Spacing::Linear => Grid::linear(min, max, count)?,
                    Spacing::Log => Grid::logarithmic(min, max, count)?,
                };
                Ok(Some(grid))
            }
            _ => bail!("--grid-min and --grid-max must be given together"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::parse(r#"{"seed": 1, "sede": 2}"#).is_err());
        assert!(RunConfig::parse(r#"{"grid": {"min": 1, "max": 2, "cnt": 3}}"#).is_err());
        assert!(RunConfig::parse(r#"{"system_a": {"kind": "series", "mu": [1]}}"#).is_err());
    }

    #[test]
    fn round_trips() {
        let text = r#"{
            "command": "order-check",
            "system_a": {"kind": "series", "alpha": [0.7], "beta": [2], "lambda": [0.8, 1.2]},
            "relation": "all",
            "example": "fig2",
            "grid": {"min": 0.1, "max": 2, "count": 50, "spacing": "log"},
            "format": "json"
        }"#;
        let c = RunConfig::parse(text).unwrap();
        let back = RunConfig::parse(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.example, Some(ExampleChoice::Fig2));
    }

    #[test]
    fn claim_rejects_other_commands() {
        let mut c = RunConfig {
            command: Some(CommandName::Dist),
            ..Default::default()
        };
        assert!(c.claim(CommandName::McVerify).is_err());
        assert!(c.claim(CommandName::Dist).is_ok());
    }

    #[test]
    fn grid_resolution() {
        assert!(GridConfig::default().resolve().unwrap().is_none());
        let g = GridConfig {
            min: Some(1.0),
            max: Some(100.0),
            count: Some(3),
            spacing: Some(Spacing::Log),
            points: None,
        };
        let pts = g.resolve().unwrap().unwrap();
        assert!((pts.points()[1] - 10.0).abs() < 1e-12);
        let bad = GridConfig {
            min: Some(1.0),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
        let neg = GridConfig {
            points: Some(vec![-1.0, 2.0]),
            ..Default::default()
        };
        assert!(neg.resolve().is_err());
    }

    #[test]
    fn system_needs_every_vector() {
        let s = SystemConfig {
            kind: Some(SystemKind::Series),
            alpha: Some(vec![0.7]),
            beta: Some(vec![2.0]),
            lambda: None,
        };
        let err = s.resolve('B').unwrap_err().to_string();
        assert!(err.contains("--b-lambda"), "{err}");
    }
}
