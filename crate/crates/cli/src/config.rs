use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shimura::genus::ThresholdConstants;
use shimura::hyper::curve::QuadratureOptions;
use shimura::hyper::Normalization;

/// Everything a run depends on. Missing fields take their defaults and the
/// full struct is echoed into every output record.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: (i64, i64),
    pub heights: BTreeMap<String, i64>,
    pub primes: Vec<u64>,
    pub constants: ThresholdConstants,
    /// Forces one normalization in the volume harnesses; both otherwise.
    pub normalization: Option<Normalization>,
    pub quadrature: QuadratureOptions,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let heights = [
            ("classes", 6),
            ("congruence", 60),
            ("cm", 12),
            ("hecke", 4),
            ("repulsion", 12),
            ("nori", 1),
            ("units", 4),
        ];
        RunConfig {
            algebra: (-1, 3),
            heights: heights.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            primes: vec![5, 7, 11, 13],
            constants: ThresholdConstants::default(),
            normalization: None,
            quadrature: QuadratureOptions::default(),
            seed: 20240601,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        // a partial heights map only overrides the keys it names
        let mut heights = RunConfig::default().heights;
        heights.append(&mut cfg.heights);
        cfg.heights = heights;
        Ok(cfg)
    }

    pub fn height(&self, name: &str) -> i64 {
        self.heights[name]
    }

    pub fn normalizations(&self) -> Vec<Normalization> {
        match self.normalization {
            Some(n) => vec![n],
            None => Normalization::ALL.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"heights": {"cm": 8}, "seed": 3}"#).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!((cfg.height("cm"), cfg.height("congruence"), cfg.seed), (8, 60, 3));
        std::fs::write(&path, r#"{"sede": 3}"#).unwrap();
        assert!(RunConfig::load(&path).is_err());
    }
}
