//! Experiment configs: one JSON document plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use gradnorm::fixtures;
use gradnorm::norms::{DiagNorm, DiagNormRecord};
use gradnorm::okounkov::{corner_deleted_p2, OkSemigroup, OrderKind};
use gradnorm::rat::{parse_rat, serde_rat_opt, Rat};
use gradnorm::section_ring::GradedNormSpec;
use serde::Deserialize;
use serde_json::Value;

/// A problem with the config, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Vol,
    Asymptotics,
    TheoremB,
    TheoremC,
    Okounkov,
    Chebyshev,
    Equidistribution,
    Fujita,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        serde_json::from_value(Value::String(name.into()))
            .or_else(|_| err(format!("unknown command `{name}`")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Vol => "vol",
            Command::Asymptotics => "asymptotics",
            Command::TheoremB => "theorem-b",
            Command::TheoremC => "theorem-c",
            Command::Okounkov => "okounkov",
            Command::Chebyshev => "chebyshev",
            Command::Equidistribution => "equidistribution",
            Command::Fujita => "fujita",
        }
    }
}

/// Pairs of norms for `spectrum` and `vol`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairsInput {
    /// Seeded pairs with a known joint spectrum, disguised by random changes of basis.
    Scrambled {
        d: usize,
        count: usize,
    },
    Explicit {
        pairs: Vec<[DiagNormRecord; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SemigroupInput {
    FullSimplex { d: usize },
    CornerDeletedP2,
}

impl SemigroupInput {
    pub fn build(&self, level: u32) -> OkSemigroup {
        match self {
            SemigroupInput::FullSimplex { d } => OkSemigroup::full_simplex(*d, level),
            SemigroupInput::CornerDeletedP2 => corner_deleted_p2(level),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub seed: u64,
    #[serde(default = "default_ramification")]
    pub ramification: u32,
    #[serde(default)]
    pub a: Option<Value>,
    #[serde(default)]
    pub b: Option<Value>,
    #[serde(default)]
    pub pairs: Option<PairsInput>,
    #[serde(default)]
    pub semigroup: Option<SemigroupInput>,
    #[serde(default)]
    pub degrees: Option<Vec<u32>>,
    #[serde(default)]
    pub ks: Option<Vec<u32>>,
    #[serde(default)]
    pub level: Option<u32>,
    #[serde(default)]
    pub grid: Option<u32>,
    #[serde(default)]
    pub order: Option<OrderKind>,
    #[serde(default, with = "serde_rat_opt")]
    pub tol: Option<Rat>,
    /// Random sections per degree pair in the submultiplicativity audit.
    #[serde(default)]
    pub samples: Option<usize>,
}

fn default_ramification() -> u32 {
    1
}

/// Set `path` (dot-separated) in a JSON object. The value is read as JSON
/// when it parses, and as a string otherwise, so `--set tol=1/10` works.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let Some((path, raw)) = assignment.split_once('=') else {
        return err(format!(
            "override `{assignment}` is not of the form key=value"
        ));
    };
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if key.is_empty() {
            return err(format!("override `{assignment}` has an empty key"));
        }
        let Value::Object(map) = cur else {
            return err(format!(
                "override `{path}`: `{}` is not an object",
                keys[..i].join(".")
            ));
        };
        if i + 1 == keys.len() {
            map.insert(key.to_string(), value);
            return Ok(());
        }
        cur = map
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one key")
}

/// Two norms and, for constructed pairs, their known relative spectrum.
pub type NormPair = (DiagNorm, DiagNorm, Option<Vec<Rat>>);

pub struct LoadedConfig {
    /// The effective document after overrides; hashed into the manifest.
    pub doc: Value,
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

pub fn load(path: &Path, overrides: &[String]) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .or_else(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text)
        .or_else(|e| err(format!("{} is not valid JSON: {e}", path.display())))?;
    if !doc.is_object() {
        return err("the config must be a JSON object");
    }
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let config: ExperimentConfig =
        serde_json::from_value(doc.clone()).or_else(|e| err(format!("config: {e}")))?;
    Ok(LoadedConfig {
        doc,
        config,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    })
}

impl LoadedConfig {
    pub fn required<'a, T>(&self, field: &str, value: &'a Option<T>) -> Result<&'a T, ConfigError> {
        value
            .as_ref()
            .ok_or_else(|| ConfigError(format!("config: missing field `{field}`")))
    }

    /// Resolve the graded norm spec in field `a` or `b`: inline, `{"file": …}`, or `{"fixture": …}`.
    pub fn spec(&self, field: &str) -> Result<GradedNormSpec, ConfigError> {
        let value = match field {
            "a" => &self.config.a,
            _ => &self.config.b,
        };
        let value = self.required(field, value)?;
        let fail = |e: String| ConfigError(format!("config: field `{field}`: {e}"));
        if let Some(file) = value.get("file").and_then(Value::as_str) {
            let path = self.base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| fail(format!("cannot read {}: {e}", path.display())))?;
            return GradedNormSpec::from_json(&text).map_err(|e| fail(e.to_string()));
        }
        if let Some(name) = value.get("fixture").and_then(Value::as_str) {
            return fixture(name, value).map_err(fail);
        }
        GradedNormSpec::from_json(&value.to_string()).map_err(|e| fail(e.to_string()))
    }

    pub fn pairs(&self) -> Result<Vec<NormPair>, ConfigError> {
        let input = self.required("pairs", &self.config.pairs)?;
        match input {
            PairsInput::Scrambled { d, count } => {
                if *d == 0 || *count == 0 {
                    return err("config: field `pairs`: d and count must be positive");
                }
                if self.config.ramification == 0 {
                    return err("config: field `ramification` must be positive");
                }
                let mut rng = crate::audit_rng(self.config.seed, 0);
                Ok((0..*count)
                    .map(|_| {
                        let (a, b, s) = gradnorm::random::scrambled_pair(
                            &mut rng,
                            *d,
                            self.config.ramification,
                        );
                        (a, b, Some(s.lambdas().to_vec()))
                    })
                    .collect())
            }
            PairsInput::Explicit { pairs } => pairs
                .iter()
                .enumerate()
                .map(|(i, [a, b])| {
                    let parse = |r: &DiagNormRecord| {
                        DiagNorm::from_record(r).map_err(|e| {
                            ConfigError(format!("config: field `pairs`, pair {i}: {e}"))
                        })
                    };
                    Ok((parse(a)?, parse(b)?, None))
                })
                .collect(),
        }
    }
}

fn fixture(name: &str, value: &Value) -> Result<GradedNormSpec, String> {
    let weights = || -> Result<Vec<Rat>, String> {
        value
            .get("weights")
            .and_then(Value::as_array)
            .ok_or("fixture needs `weights`")?
            .iter()
            .map(|w| {
                let text = match w {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                parse_rat(&text).map_err(|e| e.to_string())
            })
            .collect()
    };
    match name {
        "floor_g_p1" => Ok(fixtures::floor_g_p1()),
        "identity_weights_p1" => Ok(fixtures::identity_weights_p1()),
        "trivial" => {
            let n = value
                .get("n")
                .and_then(Value::as_u64)
                .ok_or("fixture `trivial` needs `n`")?;
            Ok(GradedNormSpec::trivial(n as usize))
        }
        "degree_one_p1" => match weights()?.as_slice() {
            [a0, a1] => Ok(fixtures::degree_one_p1(a0.clone(), a1.clone())),
            _ => Err("fixture `degree_one_p1` needs two weights".into()),
        },
        other => Err(format!("unknown fixture `{other}`")),
    }
}
