use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use slowent_core::stacking::LemmaCheck;
use slowent_core::Verdict;

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

/// How a check's value is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
    /// `|value − bound| ≤ sigmas·σ`.
    #[serde(rename = "within")]
    Within,
    /// Reported without a bound.
    #[serde(rename = "info")]
    Info,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::AtMost => "<=",
            Relation::Greater => ">",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
            Relation::Within => "within",
            Relation::Info => "info",
        }
    }
}

/// One numeric result with the bound it was tested against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: Option<f64>,
    /// Monte Carlo standard error and the number of them allowed, if the
    /// comparison has slack.
    pub sigma: Option<f64>,
    pub sigmas: Option<f64>,
    /// Absolute rounding slack allowed on the comparison.
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    /// Unasserted checks are reported but do not affect the exit code.
    pub asserted: bool,
}

impl Check {
    pub fn compare(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        Self::compare_within(name, value, relation, bound, 0.0)
    }

    /// As [`Check::compare`], with the bound relaxed by `tolerance` in the
    /// passing direction.
    pub fn compare_within(name: impl Into<String>, value: f64, relation: Relation, bound: f64, tolerance: f64) -> Self {
        let t = tolerance;
        let ok = match relation {
            Relation::Less => value < bound + t,
            Relation::AtMost => value <= bound + t,
            Relation::Greater => value > bound - t,
            Relation::AtLeast => value >= bound - t,
            Relation::Equal => (value - bound).abs() <= t,
            Relation::Within | Relation::Info => true,
        };
        Self {
            name: name.into(),
            value,
            relation,
            bound: Some(bound),
            sigma: None,
            sigmas: None,
            tolerance: (t > 0.0).then_some(t),
            verdict: Verdict::from_bool(ok),
            asserted: true,
        }
    }

    /// Value with no bound; always passes and is never asserted.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: Relation::Info,
            bound: None,
            sigma: None,
            sigmas: None,
            tolerance: None,
            verdict: Verdict::Pass,
            asserted: false,
        }
    }

    pub fn asserted_if(mut self, asserted: bool) -> Self {
        self.asserted = asserted && self.relation != Relation::Info;
        self
    }

    /// Asserted checks that failed count against the run.
    pub fn blocks_run(&self) -> bool {
        self.asserted && !self.verdict.passed()
    }

    pub fn from_lemma(c: &LemmaCheck, prefix: &str) -> Self {
        Self {
            name: format!("{prefix}{}", c.name),
            value: c.estimate,
            relation: if c.two_sided {
                Relation::Within
            } else {
                Relation::AtMost
            },
            bound: Some(c.bound),
            sigma: Some(c.sigma),
            sigmas: Some(c.sigmas),
            tolerance: None,
            verdict: c.verdict,
            asserted: c.asserted,
        }
    }
}

/// A file written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv<R: Serialize>(file_name: &str, rows: &[R]) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Self {
            file_name: file_name.into(),
            bytes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub version: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Intermediate numbers, keyed by name.
    pub details: BTreeMap<String, Value>,
    /// Pass iff every asserted check passes.
    pub verdict: Verdict,
    /// Only field that differs between identical runs.
    pub wall_clock_ms: u64,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, Serialize)]
struct CheckRow<'a> {
    name: &'a str,
    value: f64,
    relation: &'static str,
    bound: Option<f64>,
    sigma: Option<f64>,
    sigmas: Option<f64>,
    tolerance: Option<f64>,
    verdict: &'static str,
    asserted: bool,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            experiment: config.experiment,
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            checks: Vec::new(),
            details: BTreeMap::new(),
            verdict: Verdict::Pass,
            wall_clock_ms: 0,
            artifacts: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail values serialize");
        self.details.insert(key.into(), v);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Recomputes the overall verdict from the asserted checks.
    pub fn finish(&mut self) {
        self.verdict = Verdict::from_bool(!self.checks.iter().any(Check::blocks_run));
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.blocks_run())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn checks_csv(&self) -> Result<Artifact, CliError> {
        let rows: Vec<CheckRow> = self
            .checks
            .iter()
            .map(|c| CheckRow {
                name: &c.name,
                value: c.value,
                relation: c.relation.symbol(),
                bound: c.bound,
                sigma: c.sigma,
                sigmas: c.sigmas,
                tolerance: c.tolerance,
                verdict: if c.verdict.passed() { "pass" } else { "fail" },
                asserted: c.asserted,
            })
            .collect();
        Artifact::csv("checks.csv", &rows)
    }

    /// Writes `report.json`, `checks.csv` and the artifacts into `dir`;
    /// returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        let mut put = |name: &str, bytes: &[u8]| -> Result<(), CliError> {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
            Ok(())
        };
        put("report.json", self.to_json().as_bytes())?;
        put("checks.csv", &self.checks_csv()?.bytes)?;
        for a in &self.artifacts {
            put(&a.file_name, &a.bytes)?;
        }
        Ok(written)
    }
}
