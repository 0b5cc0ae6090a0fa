//! Synthetic frames with prescribed per-group flip counts.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::AuditFrame;

/// Built-in `paper-example` scenario: the reference report's group sizes and flip counts.
pub const PAPER_EXAMPLE: &str = include_str!("../../data/scenarios/paper-example.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueLabels {
    /// No `y_true` column.
    #[default]
    None,
    /// `y_true` equals the corrected labels.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub size: usize,
    /// Instances predicted favorable (before correction).
    pub positive_predictions: usize,
    pub favorable_flips: usize,
    pub unfavorable_flips: usize,
}

impl GroupSpec {
    fn validate(&self, id: u8) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(format!("group{id}: {msg}")));
        if self.size == 0 {
            return bad("size must be at least 1".into());
        }
        if self.positive_predictions > self.size {
            return bad(format!(
                "positive_predictions {} exceeds size {}",
                self.positive_predictions, self.size
            ));
        }
        if self.unfavorable_flips > self.positive_predictions {
            return bad(format!(
                "unfavorable_flips {} exceeds positive_predictions {} (a harmful flip needs a predicted 1)",
                self.unfavorable_flips, self.positive_predictions
            ));
        }
        let negatives = self.size - self.positive_predictions;
        if self.favorable_flips > negatives {
            return bad(format!(
                "favorable_flips {} exceeds negative predictions {} (a beneficial flip needs a predicted 0)",
                self.favorable_flips, negatives
            ));
        }
        Ok(())
    }

    /// `(predicted, corrected)` pairs in a fixed order.
    fn rows(&self) -> impl Iterator<Item = (u8, u8)> {
        let keep_pos = self.positive_predictions - self.unfavorable_flips;
        let keep_neg = self.size - self.positive_predictions - self.favorable_flips;
        std::iter::repeat_n((1, 0), self.unfavorable_flips)
            .chain(std::iter::repeat_n((0, 1), self.favorable_flips))
            .chain(std::iter::repeat_n((1, 1), keep_pos))
            .chain(std::iter::repeat_n((0, 0), keep_neg))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub seed: u64,
    #[serde(default)]
    pub true_labels: TrueLabels,
    pub group0: GroupSpec,
    pub group1: GroupSpec,
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Built-in scenario by name, or a scenario file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match name_or_path {
            "paper-example" => Self::paper_example(),
            path => Self::load(Path::new(path)),
        }
    }

    pub fn paper_example() -> Result<Self> {
        Self::parse(PAPER_EXAMPLE)
    }

    pub fn validate(&self) -> Result<()> {
        self.group0.validate(0)?;
        self.group1.validate(1)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

/// Build the frame: rows of both groups, shuffled by the spec's seed.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<AuditFrame> {
    spec.validate()?;
    let mut rows: Vec<(u8, u8, u8)> = spec
        .group0
        .rows()
        .map(|(p, c)| (p, c, 0))
        .chain(spec.group1.rows().map(|(p, c)| (p, c, 1)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rows.shuffle(&mut rng);

    let predicted = rows.iter().map(|r| r.0).collect();
    let corrected: Vec<u8> = rows.iter().map(|r| r.1).collect();
    let group = rows.iter().map(|r| r.2).collect();
    let y_true = match spec.true_labels {
        TrueLabels::None => None,
        TrueLabels::Corrected => Some(corrected.clone()),
    };
    AuditFrame::new(predicted, corrected, group, y_true)
}
