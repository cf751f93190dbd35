//! Seeded symbolic process generators.

mod complexity;
mod sturmian;
mod substitution;
mod window_code;

pub use complexity::{
    block_complexity, block_complexity_profile, distinct_windows, window_classes, BlockComplexity, Exactness,
    WindowCounter, STURMIAN_SYNC_FACTOR,
};
pub use sturmian::{SturmianRotation, MIN_DENOMINATOR};
pub use substitution::Substitution;
pub use window_code::{window_code_partition, WindowCode, MAX_WINDOW};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_for};
use crate::words::BinaryWord;

/// Lane used to derive an unset Sturmian phase from the seed.
const PHASE_LANE: u64 = 0x5048_4153;

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessGenerator {
    /// i.i.d. symbols with `P(1) = p`.
    Bernoulli {
        p: f64,
    },
    Sturmian(SturmianRotation),
    Substitution(Substitution),
    Periodic {
        pattern: BinaryWord,
    },
    /// Pointwise combination of two independent sub-orbits; `combiner[(l << 1) | r]`.
    Product {
        left: Box<ProcessGenerator>,
        right: Box<ProcessGenerator>,
        combiner: [bool; 4],
    },
}

impl ProcessGenerator {
    pub fn bernoulli(p: f64) -> Result<Self> {
        let g = Self::Bernoulli { p };
        g.validate()?;
        Ok(g)
    }

    pub fn periodic(pattern: BinaryWord) -> Result<Self> {
        let g = Self::Periodic { pattern };
        g.validate()?;
        Ok(g)
    }

    pub fn golden() -> Self {
        Self::Sturmian(SturmianRotation::golden())
    }

    pub fn product(left: ProcessGenerator, right: ProcessGenerator, combiner: [bool; 4]) -> Result<Self> {
        let g = Self::Product {
            left: Box::new(left),
            right: Box::new(right),
            combiner,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::InvalidGenerator(format!(
                        "Bernoulli parameter {p} must lie strictly inside (0, 1)"
                    )));
                }
            }
            Self::Sturmian(r) => r.validate()?,
            Self::Substitution(s) => s.validate()?,
            Self::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidGenerator("empty periodic pattern".into()));
                }
            }
            Self::Product { left, right, .. } => {
                left.validate()?;
                right.validate()?;
            }
        }
        Ok(())
    }

    /// Whether the generated subshift has zero topological entropy.
    pub fn is_zero_entropy(&self) -> bool {
        match self {
            Self::Bernoulli { .. } => false,
            Self::Sturmian(_) | Self::Substitution(_) | Self::Periodic { .. } => true,
            Self::Product { left, right, .. } => left.is_zero_entropy() && right.is_zero_entropy(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Sturmian(_) => "sturmian",
            Self::Substitution(_) => "substitution",
            Self::Periodic { .. } => "periodic",
            Self::Product { .. } => "product",
        }
    }

    pub fn to_spec(&self) -> GeneratorSpec {
        match self {
            Self::Bernoulli { p } => GeneratorSpec::Bernoulli { p: *p },
            Self::Sturmian(r) => GeneratorSpec::Sturmian {
                alpha: AlphaSpec::Fraction {
                    numerator: r.numerator,
                    denominator: r.denominator,
                },
                phase: r.phase.map(|ph| ph as f64 / r.denominator as f64),
            },
            Self::Substitution(s) => GeneratorSpec::Substitution {
                zero: s.rule(false).to_string(),
                one: s.rule(true).to_string(),
            },
            Self::Periodic { pattern } => GeneratorSpec::Periodic {
                pattern: pattern.to_string(),
            },
            Self::Product { left, right, combiner } => GeneratorSpec::Product {
                left: Box::new(left.to_spec()),
                right: Box::new(right.to_spec()),
                combiner: combiner.map(u8::from),
            },
        }
    }
}

/// Serializable generator description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Bernoulli {
        p: f64,
    },
    Sturmian {
        alpha: AlphaSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
    },
    Substitution {
        zero: String,
        one: String,
    },
    Periodic {
        pattern: String,
    },
    Product {
        left: Box<GeneratorSpec>,
        right: Box<GeneratorSpec>,
        /// Output symbol for each `(left, right)` pair, indexed `(l << 1) | r`.
        #[serde(default = "xor_table")]
        combiner: [u8; 4],
    },
}

fn xor_table() -> [u8; 4] {
    [0, 1, 1, 0]
}

/// Rotation number: `"golden"`, `"silver"`, a float, or an explicit fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Named(String),
    Value(f64),
    Fraction { numerator: u64, denominator: u64 },
}

impl TryFrom<&GeneratorSpec> for ProcessGenerator {
    type Error = Error;

    fn try_from(spec: &GeneratorSpec) -> Result<Self> {
        let word = |s: &str| s.parse::<BinaryWord>();
        let g = match spec {
            GeneratorSpec::Bernoulli { p } => Self::Bernoulli { p: *p },
            GeneratorSpec::Sturmian { alpha, phase } => {
                let rotation = match alpha {
                    AlphaSpec::Named(name) => match name.as_str() {
                        "golden" => SturmianRotation::golden(),
                        "silver" => SturmianRotation::silver(),
                        other => return Err(Error::InvalidGenerator(format!("unknown rotation number {other:?}"))),
                    },
                    AlphaSpec::Value(x) => SturmianRotation::from_f64(*x)?,
                    AlphaSpec::Fraction { numerator, denominator } => {
                        let mut r = SturmianRotation::rational(*numerator, *denominator)?;
                        r.irrational = *denominator >= MIN_DENOMINATOR;
                        r
                    }
                };
                Self::Sturmian(rotation.with_phase(*phase)?)
            }
            GeneratorSpec::Substitution { zero, one } => {
                Self::Substitution(Substitution::new(word(zero)?, word(one)?)?)
            }
            GeneratorSpec::Periodic { pattern } => Self::Periodic {
                pattern: word(pattern)?,
            },
            GeneratorSpec::Product { left, right, combiner } => {
                if combiner.iter().any(|&c| c > 1) {
                    return Err(Error::InvalidGenerator("combiner entries must be 0 or 1".into()));
                }
                Self::Product {
                    left: Box::new(Self::try_from(left.as_ref())?),
                    right: Box::new(Self::try_from(right.as_ref())?),
                    combiner: combiner.map(|c| c == 1),
                }
            }
        };
        g.validate()?;
        Ok(g)
    }
}

/// Where an orbit came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorId {
    pub spec: Option<GeneratorSpec>,
    pub seed: u64,
}

/// Symbol coding of a finite orbit segment `x, Tx, T²x, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub symbols: BinaryWord,
    pub generator_id: GeneratorId,
}

impl Orbit {
    /// Orbit with no generator provenance (e.g. read from a file).
    pub fn from_symbols(symbols: BinaryWord) -> Self {
        Self {
            symbols,
            generator_id: GeneratorId { spec: None, seed: 0 },
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Deterministic in `(g, length, seed)`.
pub fn sample_orbit(g: &ProcessGenerator, length: usize, seed: u64) -> Result<Orbit> {
    if length == 0 {
        return Err(Error::Precondition("orbit length must be positive".into()));
    }
    g.validate()?;
    Ok(Orbit {
        symbols: generate(g, length, seed),
        generator_id: GeneratorId {
            spec: Some(g.to_spec()),
            seed,
        },
    })
}

fn generate(g: &ProcessGenerator, length: usize, seed: u64) -> BinaryWord {
    match g {
        ProcessGenerator::Bernoulli { p } => {
            let mut rng = rng_for(seed, 0);
            let mut w = BinaryWord::with_capacity(length);
            if *p == 0.5 {
                let mut left = length;
                while left > 0 {
                    let take = left.min(64);
                    w.push_bits(rng.next_u64(), take);
                    left -= take;
                }
            } else {
                for _ in 0..length {
                    w.push(rng.gen::<f64>() < *p);
                }
            }
            w
        }
        ProcessGenerator::Sturmian(r) => {
            let phase = r.phase.unwrap_or_else(|| derive_seed(seed, PHASE_LANE) % r.denominator);
            let mut w = BinaryWord::with_capacity(length);
            r.emit(phase, length, |b| w.push(b));
            w
        }
        ProcessGenerator::Substitution(s) => s.expand(length),
        ProcessGenerator::Periodic { pattern } => {
            let mut w = BinaryWord::with_capacity(length);
            while w.len() + pattern.len() <= length {
                w.extend_from(pattern);
            }
            let rest = length - w.len();
            if rest > 0 {
                w.extend_from(&pattern.slice(0, rest));
            }
            w
        }
        ProcessGenerator::Product { left, right, combiner } => {
            let l = generate(left, length, derive_seed(seed, 0));
            let r = generate(right, length, derive_seed(seed, 1));
            BinaryWord::from_bits(
                l.iter()
                    .zip(r.iter())
                    .map(|(a, b)| combiner[((a as usize) << 1) | b as usize]),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_tiles() {
        let g = ProcessGenerator::periodic("01".parse().unwrap()).unwrap();
        assert_eq!(sample_orbit(&g, 6, 99).unwrap().symbols.to_string(), "010101");
        let g = ProcessGenerator::periodic("011".parse().unwrap()).unwrap();
        assert_eq!(sample_orbit(&g, 7, 0).unwrap().symbols.to_string(), "0110110");
    }

    #[test]
    fn golden_prefix() {
        // ω_i = 1 iff {iα} ∈ [1−α, 1), α = 0.618…: 0, .618, .236, .854, .472, .090
        let o = sample_orbit(&ProcessGenerator::golden(), 6, 0).unwrap();
        assert_eq!(o.symbols.to_string(), "010110");
    }

    #[test]
    fn bernoulli_rejects_degenerate_p() {
        assert!(ProcessGenerator::bernoulli(0.0).is_err());
        assert!(ProcessGenerator::bernoulli(1.0).is_err());
        assert!(sample_orbit(&ProcessGenerator::Bernoulli { p: 1.5 }, 10, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let gens = [
            ProcessGenerator::Bernoulli { p: 0.5 },
            ProcessGenerator::Bernoulli { p: 0.3 },
            ProcessGenerator::Sturmian(SturmianRotation::golden().with_phase(None).unwrap()),
            ProcessGenerator::product(
                ProcessGenerator::Bernoulli { p: 0.5 },
                ProcessGenerator::golden(),
                [false, true, true, false],
            )
            .unwrap(),
        ];
        for g in &gens {
            let a = sample_orbit(g, 10_000, 42).unwrap();
            let b = sample_orbit(g, 10_000, 42).unwrap();
            assert_eq!(a, b);
            let c = sample_orbit(g, 10_000, 43).unwrap();
            assert_ne!(a.symbols, c.symbols, "{}", g.kind_name());
        }
    }

    #[test]
    fn product_uses_lane_seeds() {
        let left = ProcessGenerator::Bernoulli { p: 0.5 };
        let right = ProcessGenerator::Bernoulli { p: 0.5 };
        let g = ProcessGenerator::product(left.clone(), right, [false, false, true, true]).unwrap();
        // combiner keeps the left symbol
        let prod = sample_orbit(&g, 1000, 9).unwrap();
        let l = sample_orbit(&left, 1000, derive_seed(9, 0)).unwrap();
        assert_eq!(prod.symbols, l.symbols);
    }

    #[test]
    fn spec_roundtrip_through_json() {
        let gens = [
            ProcessGenerator::golden(),
            ProcessGenerator::Bernoulli { p: 0.25 },
            ProcessGenerator::Substitution(Substitution::thue_morse()),
            ProcessGenerator::periodic("0010".parse().unwrap()).unwrap(),
        ];
        for g in &gens {
            let json = serde_json::to_string(&g.to_spec()).unwrap();
            let spec: GeneratorSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(&ProcessGenerator::try_from(&spec).unwrap(), g);
        }
        let spec: GeneratorSpec = serde_json::from_str(r#"{"kind":"sturmian","alpha":"golden"}"#).unwrap();
        let unset = SturmianRotation::golden().with_phase(None).unwrap();
        assert_eq!(
            ProcessGenerator::try_from(&spec).unwrap(),
            ProcessGenerator::Sturmian(unset)
        );
    }
}
