use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use slowent_core::models::{AlphaSpec, GeneratorSpec, ProcessGenerator};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Complexity,
    Cover,
    Dbar,
    Vwb,
    DominanceGap,
    LemmaSuite,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Complexity,
        Experiment::Cover,
        Experiment::Dbar,
        Experiment::Vwb,
        Experiment::DominanceGap,
        Experiment::LemmaSuite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Complexity => "complexity",
            Experiment::Cover => "cover",
            Experiment::Dbar => "dbar",
            Experiment::Vwb => "vwb",
            Experiment::DominanceGap => "dominance_gap",
            Experiment::LemmaSuite => "lemma_suite",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

/// Fiber law used for stacked names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawChoice {
    /// Independent uniform `M`-words.
    Uniform,
    /// Identity cocycle restarted per block: names constant on blocks.
    Constant,
    /// Random dyadic cocycle restarted per block.
    Cocycle,
    /// Every block repeats the first (dependent by construction).
    Copied,
}

/// Configuration file contents. Every field is optional; missing fields take
/// per-experiment defaults (see [`ExperimentConfig::resolve`]).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub generator: Option<GeneratorSpec>,
    pub reference: Option<GeneratorSpec>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    #[serde(rename = "M")]
    pub block_len: Option<usize>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "N")]
    pub future: Option<usize>,
    pub k: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub steps: Option<usize>,
    pub orbit_len: Option<usize>,
    pub max_n: Option<usize>,
    pub code_half_width: Option<usize>,
    pub resolution: Option<u32>,
    pub block_law: Option<LawChoice>,
    pub independence_block_len: Option<usize>,
    pub independence_rows: Option<usize>,
    pub sparse_instances: Option<usize>,
    pub sparse_max_cells: Option<usize>,
    pub sandwich_instances: Option<usize>,
    pub export_samples: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Fully resolved configuration; echoed verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub generator: GeneratorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<GeneratorSpec>,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "M")]
    pub block_len: usize,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub future: usize,
    pub k: Vec<usize>,
    pub samples: usize,
    pub steps: usize,
    pub orbit_len: usize,
    pub max_n: usize,
    pub code_half_width: usize,
    pub resolution: u32,
    pub block_law: LawChoice,
    pub independence_block_len: usize,
    pub independence_rows: usize,
    pub sparse_instances: usize,
    pub sparse_max_cells: usize,
    pub sandwich_instances: usize,
    pub export_samples: bool,
}

pub fn golden() -> GeneratorSpec {
    GeneratorSpec::Sturmian {
        alpha: AlphaSpec::Named("golden".into()),
        phase: None,
    }
}

fn fair_coin() -> GeneratorSpec {
    GeneratorSpec::Bernoulli { p: 0.5 }
}

/// Coordinate of the product `Bernoulli(½) × golden Sturmian`.
pub fn coin_by_sturmian(take_left: bool) -> GeneratorSpec {
    GeneratorSpec::Product {
        left: Box::new(fair_coin()),
        right: Box::new(golden()),
        combiner: if take_left { [0, 0, 1, 1] } else { [0, 1, 0, 1] },
    }
}

impl ExperimentConfig {
    /// Fills defaults for `experiment`; `seed` overrides the file's seed.
    pub fn resolve(experiment: Experiment, file: ConfigFile, seed: Option<u64>) -> Result<Self, CliError> {
        if let Some(named) = file.experiment {
            if named != experiment {
                return Err(CliError::Config(format!(
                    "config is for {named}, command line asks for {experiment}"
                )));
            }
        }
        use Experiment::*;
        let m = file.m.unwrap_or(40);
        let block_len = file.block_len.unwrap_or(10);
        let n = file.n.unwrap_or(match experiment {
            Cover => 64,
            Dbar => 8,
            DominanceGap | LemmaSuite => m * block_len,
            _ => 64,
        });
        let (generator, reference) = match experiment {
            Vwb => (
                file.generator.unwrap_or_else(|| coin_by_sturmian(true)),
                Some(file.reference.unwrap_or_else(|| coin_by_sturmian(false))),
            ),
            Dbar => (
                file.generator.unwrap_or_else(golden),
                Some(file.reference.unwrap_or_else(fair_coin)),
            ),
            _ => (file.generator.unwrap_or_else(golden), file.reference),
        };
        let max_n = file.max_n.unwrap_or(64);
        let cfg = Self {
            experiment,
            seed: seed.or(file.seed).unwrap_or(0),
            generator,
            reference,
            n,
            m,
            block_len,
            epsilon: file.epsilon.unwrap_or(if experiment == Vwb { 0.05 } else { 0.01 }),
            delta: file.delta.unwrap_or(0.01),
            future: file.future.unwrap_or(6),
            k: file.k.unwrap_or_else(|| vec![4, 8, 12]),
            samples: file.samples.unwrap_or(match experiment {
                Dbar => 100_000,
                LemmaSuite => 100_000,
                _ => 5_000,
            }),
            steps: file.steps.unwrap_or(10_000_000),
            orbit_len: file.orbit_len.unwrap_or(1_000_000),
            max_n,
            code_half_width: file.code_half_width.unwrap_or(2),
            resolution: file.resolution.unwrap_or(slowent_core::stacking::DEFAULT_RESOLUTION),
            block_law: file.block_law.unwrap_or(LawChoice::Uniform),
            independence_block_len: file.independence_block_len.unwrap_or(6),
            independence_rows: file.independence_rows.unwrap_or(100_000),
            sparse_instances: file.sparse_instances.unwrap_or(10_000),
            sparse_max_cells: file.sparse_max_cells.unwrap_or(16),
            sandwich_instances: file.sandwich_instances.unwrap_or(200),
            export_samples: file.export_samples.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for `experiment` with no config file.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::resolve(experiment, ConfigFile::default(), None).expect("defaults are valid")
    }

    pub fn process(&self) -> Result<ProcessGenerator, CliError> {
        Ok(ProcessGenerator::try_from(&self.generator)?)
    }

    pub fn reference_process(&self) -> Result<ProcessGenerator, CliError> {
        let spec = self
            .reference
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{} needs a reference generator", self.experiment)))?;
        Ok(ProcessGenerator::try_from(spec)?)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} must lie in (0, 1)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} must lie in (0, 1)", self.delta));
        }
        if self.n == 0 || self.m == 0 || self.block_len == 0 || self.future == 0 || self.max_n == 0 {
            return bad("window parameters must be positive".into());
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return bad("k must list positive values".into());
        }
        match self.experiment {
            Experiment::Complexity if 4 * self.max_n > self.steps => {
                bad(format!("max_n {} does not fit a {}-step orbit", self.max_n, self.steps))
            }
            Experiment::Cover | Experiment::Dbar if self.n + 2 * self.code_half_width + 1 > self.orbit_len => {
                bad(format!("n {} does not fit a {}-step orbit", self.n, self.orbit_len))
            }
            Experiment::DominanceGap | Experiment::LemmaSuite if self.n != self.m * self.block_len => {
                bad(format!("n = {} must equal m·M = {}", self.n, self.m * self.block_len))
            }
            Experiment::DominanceGap if 2 * self.n > self.orbit_len => bad(format!(
                "2n = {} does not fit a {}-step orbit",
                2 * self.n,
                self.orbit_len
            )),
            Experiment::Vwb => {
                let widest = self.k.iter().map(|&k| 2 * k + self.future + 1).max().unwrap_or(0);
                if 10 * widest > self.steps {
                    return bad(format!("windows of width {widest} need at least {} steps", 10 * widest));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_experiment() {
        let d = ExperimentConfig::defaults(Experiment::DominanceGap);
        assert_eq!((d.n, d.m, d.block_len, d.samples), (400, 40, 10, 5_000));
        assert_eq!((d.epsilon, d.delta), (0.01, 0.01));
        let v = ExperimentConfig::defaults(Experiment::Vwb);
        assert_eq!(v.epsilon, 0.05);
        assert_eq!(v.k, vec![4, 8, 12]);
        assert!(v.reference.is_some());
    }

    #[test]
    fn file_overrides_and_seed_flag() {
        let f = ConfigFile::parse(r#"{"seed": 3, "n": 128, "generator": {"kind": "bernoulli", "p": 0.3}}"#).unwrap();
        let c = ExperimentConfig::resolve(Experiment::Cover, f.clone(), None).unwrap();
        assert_eq!((c.seed, c.n), (3, 128));
        assert_eq!(c.generator, GeneratorSpec::Bernoulli { p: 0.3 });
        assert_eq!(
            ExperimentConfig::resolve(Experiment::Cover, f, Some(9)).unwrap().seed,
            9
        );
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ConfigFile::parse(r#"{"unknown": 1}"#).is_err());
        let f = ConfigFile::parse(r#"{"epsilon": 1.5}"#).unwrap();
        assert!(ExperimentConfig::resolve(Experiment::Cover, f, None).is_err());
        let f = ConfigFile::parse(r#"{"experiment": "vwb"}"#).unwrap();
        assert!(ExperimentConfig::resolve(Experiment::Cover, f, None).is_err());
        let f = ConfigFile::parse(r#"{"n": 100}"#).unwrap();
        assert!(ExperimentConfig::resolve(Experiment::DominanceGap, f, None).is_err());
    }
}
