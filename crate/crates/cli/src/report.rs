//! The JSON run report.

use std::collections::BTreeMap;

use anyhow::Context;
use cocycle_lab::cocycle::LyapunovReport;
use cocycle_lab::diagnostics::{PerturbationRecord, Verdict};
use cocycle_lab::holonomy::FiberBunchingCertificate;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::scenario::Scenario;
use crate::schema;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "cocycle-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Negative,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative | Outcome::Inconclusive => 2,
        }
    }

    pub fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Positive => Outcome::Success,
            Verdict::Negative => Outcome::Negative,
            Verdict::Inconclusive => Outcome::Inconclusive,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Success
        } else {
            Outcome::Negative
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioEcho {
    pub name: String,
    pub path: String,
    /// SHA-256 of the tool version and the canonical scenario document.
    pub hash: String,
    pub echo: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub scenario: ScenarioEcho,
    pub seed: u64,
    pub seeds: BTreeMap<String, u64>,
    pub overrides: Vec<String>,
    pub started_at: String,
    pub wall_clock_seconds: f64,
    pub outcome: Outcome,
    pub certificates: Vec<Value>,
    pub verdicts: Vec<Value>,
    pub lyapunov: Vec<Value>,
    pub perturbations: Vec<PerturbationRecord>,
    pub outputs: Vec<String>,
    pub log: Vec<String>,
}

/// Hash of the tool version and the scenario document with sorted keys.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let canonical = serde_json::to_string(&serde_json::to_value(&scenario.document).unwrap_or(Value::Null))
        .unwrap_or_default();
    let mut h = Sha256::new();
    h.update(TOOL_VERSION.as_bytes());
    h.update(b"\n");
    h.update(canonical.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn labelled<T: Serialize>(label: &str, value: &T) -> Value {
    let mut v = serde_json::to_value(value).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut v {
        m.insert("label".into(), Value::String(label.into()));
    }
    v
}

impl Report {
    pub fn new(command: &str, scenario: &Scenario, path: &str, overrides: &[String], started_at: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo {
                name: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
            },
            command: command.into(),
            scenario: ScenarioEcho {
                name: scenario.name.clone(),
                path: path.into(),
                hash: scenario_hash(scenario),
                echo: serde_json::to_value(&scenario.document).unwrap_or(Value::Null),
            },
            seed: scenario.seed,
            seeds: BTreeMap::new(),
            overrides: overrides.to_vec(),
            started_at,
            wall_clock_seconds: 0.0,
            outcome: Outcome::Inconclusive,
            certificates: Vec::new(),
            verdicts: Vec::new(),
            lyapunov: Vec::new(),
            perturbations: Vec::new(),
            outputs: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn certificate(&mut self, label: &str, c: &FiberBunchingCertificate) {
        self.certificates.push(labelled(label, c));
    }

    pub fn lyapunov(&mut self, label: &str, r: &LyapunovReport) {
        self.lyapunov.push(labelled(label, r));
    }

    pub fn verdict<T: Serialize>(&mut self, label: &str, test: &str, verdict: Verdict, detail: &T) {
        self.verdicts.push(json!({
            "label": label,
            "test": test,
            "verdict": verdict,
            "detail": serde_json::to_value(detail).unwrap_or(Value::Null),
        }));
    }

    pub fn to_json(&self) -> anyhow::Result<Value> {
        serde_json::to_value(self).context("cannot serialize report")
    }

    /// Serialize and check against the published schema.
    pub fn validated_json(&self) -> anyhow::Result<String> {
        let v = self.to_json()?;
        let errors = schema::validate(&v, &schema::report_schema());
        if !errors.is_empty() {
            anyhow::bail!("report violates its schema:\n  {}", errors.join("\n  "));
        }
        serde_json::to_string_pretty(&v).context("cannot serialize report")
    }
}
