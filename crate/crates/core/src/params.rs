//! User-facing generation parameters.

use alloc::string::String;

/// Parameters of an automatic generation run.
///
/// | field | default |
/// |---|---|
/// | `d` | 5 |
/// | `num_communities` | 1 |
/// | `max_indegree` | 2 |
/// | `link_communities` | false |
/// | `nb_links` | 0 |
/// | `train_length` | 1000 |
/// | `test_length` | 1000 |
/// | `contamination_ratio` | 0.05 |
/// | `num_anomalies` | `max(1, N / 50)` with `N` the anomalous point budget |
/// | `max_lag` | 5 |
/// | `n_const` | 2 |
/// | `propagation_prob` | 0.5 |
/// | `noise_sigma` | 0 |
/// | `enable_window_agg` | false |
/// | `seed` | 0 |
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationParams {
    pub d: usize,
    pub num_communities: usize,
    pub max_indegree: usize,
    pub link_communities: bool,
    pub nb_links: usize,
    pub train_length: usize,
    pub test_length: usize,
    pub contamination_ratio: f64,
    pub num_anomalies: Option<usize>,
    pub max_lag: usize,
    pub n_const: usize,
    pub propagation_prob: f64,
    /// Noise standard deviation as a fraction of each column's train std.
    pub noise_sigma: f64,
    pub enable_window_agg: bool,
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            d: 5,
            num_communities: 1,
            max_indegree: 2,
            link_communities: false,
            nb_links: 0,
            train_length: 1000,
            test_length: 1000,
            contamination_ratio: 0.05,
            num_anomalies: None,
            max_lag: 5,
            n_const: 2,
            propagation_prob: 0.5,
            noise_sigma: 0.0,
            enable_window_agg: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: String,
}

impl ParamError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ParamError {
            field,
            reason: reason.into(),
        }
    }
}

impl GenerationParams {
    /// Number of label-1 points the test segment must carry.
    pub fn anomalous_points(&self) -> usize {
        libm::round(self.contamination_ratio * self.test_length as f64) as usize
    }

    /// Range checks that do not depend on random draws.
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.d == 0 {
            return Err(ParamError::new("d", "must be at least 1"));
        }
        if self.num_communities == 0 || self.num_communities > self.d {
            return Err(ParamError::new(
                "num_communities",
                alloc::format!("must be in [1, d = {}]", self.d),
            ));
        }
        if self.max_indegree == 0 {
            return Err(ParamError::new("max_indegree", "must be at least 1"));
        }
        if self.link_communities && self.nb_links > 0 && self.num_communities < 2 {
            return Err(ParamError::new(
                "nb_links",
                "bridge links need at least two communities",
            ));
        }
        if self.test_length == 0 {
            return Err(ParamError::new("test_length", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.contamination_ratio) {
            return Err(ParamError::new("contamination_ratio", "must be in [0, 1)"));
        }
        if self.num_anomalies == Some(0) && self.anomalous_points() > 0 {
            return Err(ParamError::new(
                "num_anomalies",
                "must be at least 1 when the contamination ratio is positive",
            ));
        }
        if let Some(k) = self.num_anomalies {
            if k > self.anomalous_points() && self.anomalous_points() > 0 {
                return Err(ParamError::new(
                    "num_anomalies",
                    "exceeds the number of anomalous points",
                ));
            }
        }
        if self.max_lag == 0 {
            return Err(ParamError::new("max_lag", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.propagation_prob) {
            return Err(ParamError::new("propagation_prob", "must be in [0, 1]"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(ParamError::new("noise_sigma", "must be a finite value >= 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(GenerationParams::default().validate().is_ok());
    }

    #[test]
    fn budget_rounds() {
        let p = GenerationParams {
            test_length: 2000,
            contamination_ratio: 0.05,
            ..Default::default()
        };
        assert_eq!(p.anomalous_points(), 100);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = |p: GenerationParams| p.validate().unwrap_err().field;
        let base = GenerationParams::default();
        assert_eq!(
            bad(GenerationParams { contamination_ratio: 1.5, ..base.clone() }),
            "contamination_ratio"
        );
        assert_eq!(bad(GenerationParams { d: 0, ..base.clone() }), "d");
        assert_eq!(
            bad(GenerationParams { num_communities: 6, ..base.clone() }),
            "num_communities"
        );
        assert_eq!(bad(GenerationParams { max_lag: 0, ..base.clone() }), "max_lag");
        assert_eq!(
            bad(GenerationParams {
                link_communities: true,
                nb_links: 2,
                ..base.clone()
            }),
            "nb_links"
        );
        assert_eq!(
            bad(GenerationParams { noise_sigma: -1.0, ..base }),
            "noise_sigma"
        );
    }
}
