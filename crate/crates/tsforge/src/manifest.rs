//! The `metadata.json` document written next to every dataset.

use serde::{Deserialize, Serialize};
use tsforge_core::sim::{ManualAnomaly, ManualSystem, Recipe};
use tsforge_core::{parse_expression, GenerationParams, GenerationResult, ParseError};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub generator: Generator,
    pub mode: String,
    pub seed: u64,
    pub d: usize,
    pub train_length: usize,
    pub test_length: usize,
    pub warmup: usize,
    pub params: Params,
    pub constants: Constants,
    pub communities: Vec<Vec<usize>>,
    pub nodes: Vec<Node>,
    pub edges: Vec<EdgeEntry>,
    pub equations: Vec<String>,
    pub anomalies: Vec<AnomalyEntry>,
    pub label_counts: [usize; 4],
    pub files: Files,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub version: String,
}

/// Generation parameters. Automatic-only fields are absent for manual runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub num_communities: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_indegree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub link_communities: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nb_links: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contamination_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub num_anomalies: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_lag: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_const: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enable_window_agg: Option<bool>,
    pub propagation_prob: f64,
    pub noise_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub clamp_bound: f64,
    pub guard_epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: usize,
    pub community: usize,
    pub exogenous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub src: usize,
    pub dst: usize,
    pub propagates: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnomalyEntry {
    pub var: usize,
    pub t_start: usize,
    pub t_end: usize,
    pub strategy: String,
    pub mutated_equation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Files {
    pub train: String,
    pub test: String,
    pub labels_rich: String,
    pub labels_binary: String,
}

impl Params {
    fn from_recipe(recipe: &Recipe, noise_sigma: f64) -> Self {
        match recipe {
            Recipe::Automatic(p) => Params {
                num_communities: Some(p.num_communities),
                max_indegree: Some(p.max_indegree),
                link_communities: Some(p.link_communities),
                nb_links: Some(p.nb_links),
                contamination_ratio: Some(p.contamination_ratio),
                num_anomalies: p.num_anomalies,
                max_lag: Some(p.max_lag),
                n_const: Some(p.n_const),
                enable_window_agg: Some(p.enable_window_agg),
                propagation_prob: p.propagation_prob,
                noise_sigma: p.noise_sigma,
            },
            Recipe::Manual { propagation_prob } => Params {
                num_communities: None,
                max_indegree: None,
                link_communities: None,
                nb_links: None,
                contamination_ratio: None,
                num_anomalies: None,
                max_lag: None,
                n_const: None,
                enable_window_agg: None,
                propagation_prob: *propagation_prob,
                noise_sigma,
            },
        }
    }
}

impl Manifest {
    pub fn from_result(r: &GenerationResult) -> Self {
        let g = &r.graph;
        let mut label_counts = [0usize; 4];
        for row in 0..r.labels.rows() {
            for l in r.labels.row(row) {
                label_counts[l.code() as usize] += 1;
            }
        }
        let constants = r.constants();
        Manifest {
            schema_version: SCHEMA_VERSION,
            generator: Generator {
                name: String::from("tsforge"),
                version: String::from(env!("CARGO_PKG_VERSION")),
            },
            mode: String::from(match r.recipe {
                Recipe::Automatic(_) => "automatic",
                Recipe::Manual { .. } => "manual",
            }),
            seed: r.seed,
            d: r.d(),
            train_length: r.train_length,
            test_length: r.test_length,
            warmup: r.warmup,
            params: Params::from_recipe(&r.recipe, r.noise_sigma),
            constants: Constants {
                clamp_bound: constants.clamp_bound,
                guard_epsilon: constants.guard_epsilon,
            },
            communities: g.communities().to_vec(),
            nodes: (0..r.d())
                .map(|v| Node {
                    id: v,
                    community: g.community_of(v).unwrap_or(0),
                    exogenous: g.is_exogenous(v),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    src: e.src,
                    dst: e.dst,
                    propagates: e.propagates,
                })
                .collect(),
            equations: r.equations.iter().map(ToString::to_string).collect(),
            anomalies: r
                .anomalies
                .iter()
                .map(|a| AnomalyEntry {
                    var: a.window.var,
                    t_start: a.window.t_start,
                    t_end: a.window.t_end,
                    strategy: a.strategy.to_string(),
                    mutated_equation: a.mutated.to_string(),
                })
                .collect(),
            label_counts,
            files: Files {
                train: String::from(crate::writer::TRAIN_FILE),
                test: String::from(crate::writer::TEST_FILE),
                labels_rich: String::from(crate::writer::LABELS_RICH_FILE),
                labels_binary: String::from(crate::writer::LABELS_BINARY_FILE),
            },
        }
    }

    /// Automatic parameters echoed by an automatic-mode manifest.
    pub fn generation_params(&self) -> Option<GenerationParams> {
        let p = &self.params;
        Some(GenerationParams {
            d: self.d,
            num_communities: p.num_communities?,
            max_indegree: p.max_indegree?,
            link_communities: p.link_communities?,
            nb_links: p.nb_links?,
            train_length: self.train_length,
            test_length: self.test_length,
            contamination_ratio: p.contamination_ratio?,
            num_anomalies: p.num_anomalies,
            max_lag: p.max_lag?,
            n_const: p.n_const?,
            propagation_prob: p.propagation_prob,
            noise_sigma: p.noise_sigma,
            enable_window_agg: p.enable_window_agg?,
            seed: self.seed,
        })
    }

    /// A manual system that reproduces the recorded run: the recorded
    /// equations, the mutated equations on their windows and every
    /// propagation flag pinned.
    pub fn to_manual_system(&self) -> Result<ManualSystem, ParseError> {
        let d = self.d;
        let equations = self
            .equations
            .iter()
            .map(|s| parse_expression(s, d))
            .collect::<Result<Vec<_>, _>>()?;
        let anomalies = self
            .anomalies
            .iter()
            .map(|a| {
                Ok(ManualAnomaly {
                    var: a.var,
                    t_start: a.t_start,
                    t_end: a.t_end,
                    equation: parse_expression(&a.mutated_equation, d)?,
                })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        Ok(ManualSystem {
            equations,
            anomalies,
            train_length: self.train_length,
            test_length: self.test_length,
            propagation_prob: self.params.propagation_prob,
            propagation: self
                .edges
                .iter()
                .map(|e| (e.src, e.dst, e.propagates))
                .collect(),
            noise_sigma: self.params.noise_sigma,
            seed: self.seed,
        })
    }
}
