//! Scenario files: the JSON schema read by every `flexcon` command.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::extensions::ContinuousMeanConfig;
use crate::model::{
    validate_scenario, BehaviorMode, ContractMenu, ContractOption, MarketParams, Mode, TypeDistribution,
    VariationModel, DEFAULT_TIE_TOL_REL,
};
use crate::peak::SlotModel;

/// Value of the mandatory top-level `schema` field.
pub const SCHEMA: &str = "flexcon/v1";

/// Menu synthesis method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Prices `p0`, bands from the 3/2 rule; evaluated optimistically.
    #[default]
    Approx,
    /// The approximate bands at price `p0 − ε`; evaluated pessimistically.
    Robust,
    /// The super-optimal benchmark menu (IC not imposed).
    Super,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Approx => "approx",
            Method::Robust => "robust",
            Method::Super => "super",
        })
    }
}

/// `"auto"` or a positive number below `p0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Value(f64),
    Word(String),
}

impl Default for EpsilonSpec {
    fn default() -> Self {
        EpsilonSpec::Word("auto".into())
    }
}

impl EpsilonSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(EpsilonSpec::Word(s.into()));
        }
        s.parse()
            .map(EpsilonSpec::Value)
            .map_err(|_| Error::Config(format!("epsilon must be \"auto\" or a number, got {s:?}")))
    }

    pub fn resolve(&self) -> Result<crate::design::Epsilon> {
        match self {
            EpsilonSpec::Value(v) => Ok(crate::design::Epsilon::Fixed(*v)),
            EpsilonSpec::Word(w) if w == "auto" => Ok(crate::design::Epsilon::Auto),
            EpsilonSpec::Word(w) => Err(Error::Config(format!("epsilon must be \"auto\" or a number, got {w:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub epsilon: EpsilonSpec,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Peak-pricing comparator: adds a `peak_ratio` column to sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakSection {
    pub slots: SlotModel,
    /// Rescales every slot so its largest mean is this multiple of the smallest.
    #[serde(default)]
    pub mean_ratio: Option<f64>,
    /// Price reduction of the flexible (robust) menus.
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
}

impl PeakSection {
    pub fn model(&self) -> SlotModel {
        match self.mean_ratio {
            Some(r) => self.slots.with_mean_ratio(r),
            None => self.slots.clone(),
        }
    }
}

/// One scenario. `dist` is required unless `continuous` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    pub params: MarketParams,
    #[serde(default)]
    pub dist: Option<TypeDistribution>,
    #[serde(default)]
    pub variation: VariationModel,
    /// Explicit menu, one option per type. Takes precedence over `design`.
    #[serde(default)]
    pub menu: Option<Vec<ContractOption>>,
    /// Tie-breaking applied to an explicit menu.
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Absolute tie tolerance; defaults to `1e-9·p0`.
    #[serde(default)]
    pub tie_tol: Option<f64>,
    #[serde(default)]
    pub design: Option<DesignSection>,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub continuous: Option<ContinuousMeanConfig>,
    #[serde(default)]
    pub peak: Option<PeakSection>,
}

fn default_mode() -> Mode {
    Mode::Optimistic
}

impl ScenarioConfig {
    /// Reads, parses and validates a config file.
    pub fn load(path: &Path) -> Result<(Self, Value)> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates config text. Syntax and type errors carry the
    /// line and column of the offending token.
    pub fn parse(text: &str) -> Result<(Self, Value)> {
        let anchored = |e: serde_json::Error| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()));
        let raw: Value = serde_json::from_str(text).map_err(anchored)?;
        check_schema(&raw)?;
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(anchored)?;
        cfg.validate()?;
        Ok((cfg, raw))
    }

    /// Builds and validates a config from an already parsed JSON tree.
    pub fn from_value(raw: &Value) -> Result<Self> {
        check_schema(raw)?;
        let cfg: ScenarioConfig = serde_json::from_value(raw.clone()).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tie_tol {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::Config(format!("tie_tol must be finite and non-negative, got {tol}")));
            }
        }
        if let Some(peak) = &self.peak {
            peak.slots.validate()?;
            if let Some(r) = peak.mean_ratio {
                if !(r >= 1.0 && r.is_finite()) {
                    return Err(Error::Config(format!("peak.mean_ratio must be at least 1, got {r}")));
                }
            }
            if peak.trials == 0 {
                return Err(Error::Config("peak.trials must be at least 1".into()));
            }
        }
        if let Some(c) = &self.continuous {
            return c.validate();
        }
        let dist = self.dist()?;
        validate_scenario(&self.params, dist, self.menu().as_ref(), &self.variation).into_result()
    }

    pub fn dist(&self) -> Result<&TypeDistribution> {
        self.dist.as_ref().ok_or_else(|| Error::Config("missing \"dist\" section".into()))
    }

    pub fn menu(&self) -> Option<ContractMenu> {
        self.menu.as_ref().map(|o| ContractMenu::new(o.clone()))
    }

    /// Tie-breaking for an explicit menu.
    pub fn behavior(&self) -> BehaviorMode {
        self.behavior_for(self.mode)
    }

    pub fn behavior_for(&self, mode: Mode) -> BehaviorMode {
        BehaviorMode { mode, tie_tol: self.tie_tol.unwrap_or(DEFAULT_TIE_TOL_REL * self.params.p0) }
    }
}

fn check_schema(raw: &Value) -> Result<()> {
    match raw.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => Ok(()),
        Some(other) => Err(Error::Config(format!("unsupported schema {other:?}, expected {SCHEMA:?}"))),
        None => Err(Error::Config(format!("missing top-level \"schema\": {SCHEMA:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_TYPE: &str = r#"{
        "schema": "flexcon/v1",
        "params": {"p0": 1.0, "k": 2.0, "c0": 0.2, "c_hat": 0.1, "N": 10},
        "dist": {"means": [1.0, 3.0], "probs": [0.9, 0.1]}
    }"#;

    #[test]
    fn defaults() {
        let (cfg, _) = ScenarioConfig::parse(TWO_TYPE).unwrap();
        assert_eq!(cfg.params.n_customers, 10);
        assert_eq!(cfg.variation, VariationModel::Uniform);
        assert_eq!(cfg.mode, Mode::Optimistic);
        assert_eq!(cfg.behavior().tie_tol, 1e-9);
        assert!(cfg.menu.is_none() && cfg.design.is_none());
    }

    #[test]
    fn syntax_errors_are_line_anchored() {
        let err = ScenarioConfig::parse("{\n  \"schema\": \"flexcon/v1\",\n  \"params\": [\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = ScenarioConfig::parse(&TWO_TYPE.replace("\"k\": 2.0", "\"k\": \"two\"")).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn schema_and_unknown_fields_rejected() {
        assert!(ScenarioConfig::parse(&TWO_TYPE.replace("flexcon/v1", "flexcon/v0")).is_err());
        assert!(ScenarioConfig::parse(&TWO_TYPE.replace("\"params\"", "\"colour\": 1, \"params\"")).is_err());
    }

    #[test]
    fn validation_runs_at_load() {
        let bad = TWO_TYPE.replace("[0.9, 0.1]", "[0.9, 0.2]");
        assert_eq!(ScenarioConfig::parse(&bad).unwrap_err().exit_code(), 2);
        let pricey = TWO_TYPE.replace(
            "\"dist\"",
            "\"menu\": [{\"p\": 1.5, \"delta\": 0.5, \"p_bar\": 4, \"center\": 1}, {\"p\": 1, \"delta\": 0.5, \"p_bar\": 4, \"center\": 3}], \"dist\"",
        );
        assert!(ScenarioConfig::parse(&pricey).is_err());
    }

    #[test]
    fn epsilon_spec() {
        assert_eq!(EpsilonSpec::parse("auto").unwrap().resolve().unwrap(), crate::design::Epsilon::Auto);
        assert_eq!(EpsilonSpec::parse("0.25").unwrap().resolve().unwrap(), crate::design::Epsilon::Fixed(0.25));
        assert!(EpsilonSpec::parse("some").is_err());
        assert!(EpsilonSpec::Word("x".into()).resolve().is_err());
    }
}
