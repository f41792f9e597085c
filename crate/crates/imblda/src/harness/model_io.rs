//! Fitted-rule persistence. Weights are stored sparsely (support indices
//! plus the weights on them); serde_json emits shortest round-trip float
//! representations, so save/load is lossless to full f64 precision.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::{LinearRule, RuleKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SavedModel {
    pub p: usize,
    /// 0-based feature indices carrying nonzero weights.
    pub support: Vec<usize>,
    /// Weights aligned with `support`.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub hyperparameters: serde_json::Map<String, serde_json::Value>,
}

impl SavedModel {
    pub fn from_rule(
        rule: &LinearRule,
        seed: Option<u64>,
        hyperparameters: serde_json::Map<String, serde_json::Value>,
    ) -> Self {
        let support = rule.support();
        let weights = support
            .indices()
            .iter()
            .map(|&j| rule.weights()[j])
            .collect();
        Self {
            p: rule.p(),
            support: support.indices().to_vec(),
            weights,
            intercept: rule.intercept(),
            provenance: rule.kind().name().to_string(),
            seed,
            hyperparameters,
        }
    }

    pub fn to_rule(&self) -> Result<LinearRule> {
        if self.support.len() != self.weights.len() {
            return Err(Error::Validation {
                field: "weights".into(),
                message: "support and weights lengths differ".into(),
            });
        }
        let kind = RuleKind::parse(&self.provenance).ok_or_else(|| Error::Validation {
            field: "provenance".into(),
            message: format!("unknown rule kind `{}`", self.provenance),
        })?;
        let mut w = vec![0.0; self.p];
        for (&j, &v) in self.support.iter().zip(&self.weights) {
            if j >= self.p {
                return Err(Error::Validation {
                    field: "support".into(),
                    message: format!("index {j} out of range for p = {}", self.p),
                });
            }
            w[j] = v;
        }
        Ok(LinearRule::new(w, self.intercept, kind))
    }
}

pub fn save_model(path: &Path, model: &SavedModel) -> Result<()> {
    let json = serde_json::to_string_pretty(model).expect("model serialization cannot fail");
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<SavedModel> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        row: Some(e.line()),
        column: Some(e.column().to_string()),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let weights = vec![0.0, 0.1 + 0.2, -1.0 / 3.0, 0.0, f64::MIN_POSITIVE];
        let rule = LinearRule::new(weights, 0.30000000000000004, RuleKind::Hr);
        let mut hyper = serde_json::Map::new();
        hyper.insert("tau".into(), serde_json::json!(1.25));
        let saved = SavedModel::from_rule(&rule, Some(7), hyper);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &saved).unwrap();
        let loaded = load_model(&path).unwrap();
        let back = loaded.to_rule().unwrap();

        assert_eq!(back.weights(), rule.weights());
        assert!(back.intercept() == rule.intercept());
        assert_eq!(back.kind(), rule.kind());
        assert_eq!(loaded.seed, Some(7));
    }
}
