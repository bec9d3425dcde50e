//! Versioned scenario files (JSON or TOML).

use std::path::Path;

use serde::Deserialize;

use crate::formats::DomainSpec;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    pub effort: f64,
    #[serde(default)]
    pub weights: Option<WeightsSpec>,
    pub task: Task,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub kappa1: f64,
    pub kappa2: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Dido {
        area_fraction: f64,
    },
    Feasibility,
    Mintime {
        #[serde(default = "one")]
        from: f64,
        #[serde(default)]
        to: f64,
    },
    Flow {
        #[serde(default = "one")]
        from: f64,
    },
    Slice {
        #[serde(default)]
        angle: f64,
        b1: f64,
        #[serde(default = "frames")]
        frames: usize,
    },
    Simulate {
        strategy: Strategy,
        #[serde(default)]
        leg: Option<f64>,
    },
    Freearc {
        rho: f64,
    },
    Corner {
        beta: f64,
        c: f64,
        #[serde(default)]
        x_dagger: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn frames() -> usize {
    200
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Triangle,
    Wedge,
    Disc,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default)]
    pub admissibility: bool,
    #[serde(default)]
    pub junctions: bool,
    #[serde(default)]
    pub max_principle: bool,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub jsonl: bool,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default)]
    pub svg: bool,
    /// Write every n-th frame as SVG.
    #[serde(default = "svg_every")]
    pub svg_every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, jsonl: true, csv: true, svg: false, svg_every: svg_every() }
    }
}

fn yes() -> bool {
    true
}

fn svg_every() -> usize {
    100
}

impl Scenario {
    /// Parses by extension (`.toml`, else JSON); diagnostics carry the
    /// line/column or field that failed.
    pub fn load(path: &Path) -> Result<Scenario, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let toml = path.extension().is_some_and(|e| e == "toml");
        let s = if toml { Self::from_toml(&text) } else { Self::from_json(&text) };
        s.map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_json(text: &str) -> Result<Scenario, String> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
        s.check()?;
        Ok(s)
    }

    pub fn from_toml(text: &str) -> Result<Scenario, String> {
        let s: Scenario = toml::from_str(text).map_err(|e| e.to_string())?;
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), String> {
        if self.schema != SCHEMA {
            return Err(format!("schema: unsupported version {} (expected {SCHEMA})", self.schema));
        }
        if !(self.effort > 0.0 && self.effort.is_finite()) {
            return Err(format!("effort: must be positive, got {}", self.effort));
        }
        if let Some(w) = self.weights {
            if !(w.kappa1 >= 0.0 && w.kappa2 >= 0.0 && w.kappa1 + w.kappa2 > 0.0) {
                return Err("weights: need kappa1, kappa2 >= 0 with a positive sum".into());
            }
        }
        if self.checks.max_principle && self.weights.is_none() {
            return Err("weights: required by checks.max_principle".into());
        }
        let needs_domain = !matches!(self.task, Task::Simulate { .. } | Task::Freearc { .. } | Task::Corner { .. });
        if needs_domain && self.domain.is_none() {
            return Err("domain: required by this task".into());
        }
        if self.output.svg_every == 0 {
            return Err("output.svg_every: must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t = r#"
            schema = 1
            name = "tri"
            effort = 1.0
            [domain]
            type = "triangle"
            params = {}
            [task]
            kind = "simulate"
            strategy = "triangle"
        "#;
        let j = r#"{"schema": 1, "name": "tri", "effort": 1.0,
            "domain": {"type": "triangle", "params": {}},
            "task": {"kind": "simulate", "strategy": "triangle"}}"#;
        assert_eq!(Scenario::from_toml(t).unwrap(), Scenario::from_json(j).unwrap());
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let e = Scenario::from_json(r#"{"schema": 2, "name": "x", "effort": 1, "task": {"kind": "feasibility"}}"#);
        assert!(e.unwrap_err().contains("schema"));
        let e = Scenario::from_json("{\"schema\": 1,\n \"name\": \"x\", \"effort\": 1, \"task\": {\"kind\": \"fly\"}}");
        assert!(e.unwrap_err().contains("line 2"));
        let e = Scenario::from_json(r#"{"schema": 1, "name": "x", "effort": 1, "task": {"kind": "feasibility"}}"#);
        assert!(e.unwrap_err().contains("domain"));
    }
}
