//! JSON configuration for automatic and manual runs.
//!
//! One document covers both modes. A config holding an `equations` array is
//! a manual system; anything else is an automatic run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tsforge_core::sim::{ManualAnomaly, ManualSystem};
use tsforge_core::{parse_expression, GenerationParams, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
    #[error("{field}: {source}")]
    Expression { field: String, source: ParseError },
}

impl ConfigError {
    fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures reading the file, as opposed to invalid content.
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Io { .. })
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// A validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum Config {
    Automatic(GenerationParams),
    Manual(ManualSystem),
}

impl Config {
    pub fn seed(&self) -> u64 {
        match self {
            Config::Automatic(p) => p.seed,
            Config::Manual(m) => m.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Config::Automatic(p) => p.seed = seed,
            Config::Manual(m) => m.seed = seed,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Automatic,
    Manual,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnomaly {
    var: usize,
    start: usize,
    end: usize,
    equation: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    src: usize,
    dst: usize,
    propagates: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    d: Option<usize>,
    num_communities: Option<usize>,
    max_indegree: Option<usize>,
    link_communities: Option<bool>,
    nb_links: Option<usize>,
    train_length: Option<usize>,
    test_length: Option<usize>,
    contamination_ratio: Option<f64>,
    num_anomalies: Option<usize>,
    max_lag: Option<usize>,
    n_const: Option<usize>,
    propagation_prob: Option<f64>,
    noise_sigma: Option<f64>,
    enable_window_agg: Option<bool>,
    seed: Option<u64>,
    equations: Option<Vec<String>>,
    anomalies: Option<Vec<RawAnomaly>>,
    propagation: Option<Vec<RawOverride>>,
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Validates a configuration document.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text)?;
    let manual = match raw.mode {
        Some(Mode::Manual) => true,
        Some(Mode::Automatic) => false,
        None => raw.equations.is_some(),
    };
    if manual {
        manual_system(raw).map(Config::Manual)
    } else {
        automatic_params(raw).map(Config::Automatic)
    }
}

fn automatic_params(raw: RawConfig) -> Result<GenerationParams, ConfigError> {
    for (name, present) in [
        ("equations", raw.equations.is_some()),
        ("anomalies", raw.anomalies.is_some()),
        ("propagation", raw.propagation.is_some()),
    ] {
        if present {
            return Err(ConfigError::field(name, "only allowed in manual mode"));
        }
    }
    let defaults = GenerationParams::default();
    let p = GenerationParams {
        d: raw.d.unwrap_or(defaults.d),
        num_communities: raw.num_communities.unwrap_or(defaults.num_communities),
        max_indegree: raw.max_indegree.unwrap_or(defaults.max_indegree),
        link_communities: raw.link_communities.unwrap_or(defaults.link_communities),
        nb_links: raw.nb_links.unwrap_or(defaults.nb_links),
        train_length: raw.train_length.unwrap_or(defaults.train_length),
        test_length: raw.test_length.unwrap_or(defaults.test_length),
        contamination_ratio: raw
            .contamination_ratio
            .unwrap_or(defaults.contamination_ratio),
        num_anomalies: raw.num_anomalies.or(defaults.num_anomalies),
        max_lag: raw.max_lag.unwrap_or(defaults.max_lag),
        n_const: raw.n_const.unwrap_or(defaults.n_const),
        propagation_prob: raw.propagation_prob.unwrap_or(defaults.propagation_prob),
        noise_sigma: raw.noise_sigma.unwrap_or(defaults.noise_sigma),
        enable_window_agg: raw.enable_window_agg.unwrap_or(defaults.enable_window_agg),
        seed: raw.seed.unwrap_or(defaults.seed),
    };
    p.validate()
        .map_err(|e| ConfigError::field(e.field, e.reason))?;
    Ok(p)
}

fn manual_system(raw: RawConfig) -> Result<ManualSystem, ConfigError> {
    for (name, present) in [
        ("num_communities", raw.num_communities.is_some()),
        ("max_indegree", raw.max_indegree.is_some()),
        ("link_communities", raw.link_communities.is_some()),
        ("nb_links", raw.nb_links.is_some()),
        ("contamination_ratio", raw.contamination_ratio.is_some()),
        ("num_anomalies", raw.num_anomalies.is_some()),
        ("max_lag", raw.max_lag.is_some()),
        ("n_const", raw.n_const.is_some()),
        ("enable_window_agg", raw.enable_window_agg.is_some()),
    ] {
        if present {
            return Err(ConfigError::field(name, "only allowed in automatic mode"));
        }
    }
    let sources = raw
        .equations
        .ok_or_else(|| ConfigError::field("equations", "required in manual mode"))?;
    let d = sources.len();
    if d == 0 {
        return Err(ConfigError::field("equations", "at least one equation is required"));
    }
    if let Some(declared) = raw.d {
        if declared != d {
            return Err(ConfigError::field(
                "d",
                format!("declares {declared} variables but {d} equations are given"),
            ));
        }
    }
    let equations = sources
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_expression(s, d).map_err(|source| ConfigError::Expression {
                field: format!("equations[{i}] (x{i})"),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let defaults = GenerationParams::default();
    let train_length = raw.train_length.unwrap_or(defaults.train_length);
    let test_length = raw.test_length.unwrap_or(defaults.test_length);
    let end = train_length + test_length;
    let mut anomalies = Vec::new();
    for (i, a) in raw.anomalies.unwrap_or_default().into_iter().enumerate() {
        let field = |name: &str| format!("anomalies[{i}].{name}");
        if a.var >= d {
            return Err(ConfigError::field(
                field("var"),
                format!("x{} does not exist (d = {d})", a.var),
            ));
        }
        if a.start < train_length || a.end > end || a.start >= a.end {
            return Err(ConfigError::field(
                field("start"),
                format!(
                    "window [{}, {}) must be nonempty and inside the test segment [{train_length}, {end})",
                    a.start, a.end
                ),
            ));
        }
        let equation = parse_expression(&a.equation, d).map_err(|source| {
            ConfigError::Expression {
                field: field("equation"),
                source,
            }
        })?;
        anomalies.push(ManualAnomaly {
            var: a.var,
            t_start: a.start,
            t_end: a.end,
            equation,
        });
    }

    let system = ManualSystem {
        equations,
        anomalies,
        train_length,
        test_length,
        propagation_prob: raw.propagation_prob.unwrap_or(defaults.propagation_prob),
        propagation: raw
            .propagation
            .unwrap_or_default()
            .into_iter()
            .map(|o| (o.src, o.dst, o.propagates))
            .collect(),
        noise_sigma: raw.noise_sigma.unwrap_or(defaults.noise_sigma),
        seed: raw.seed.unwrap_or(defaults.seed),
    };
    system
        .resolve_graph()
        .map_err(|e| ConfigError::field("manual system", e.to_string()))?;
    Ok(system)
}
