//! Acceptable / Moderate / Disproportionate bands for metric values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Annotation, MetricValue};

/// Thresholds shipped with the crate.
pub const DEFAULT_THRESHOLDS: &str = include_str!("../data/thresholds.toml");

/// Absorbs representation error at band edges, so that e.g. DI = 1.1 sits on
/// the acceptable edge even though `1.1 - 1.0` is slightly above 0.1.
const EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "FR")]
    Fr,
    #[serde(rename = "DFR")]
    Dfr,
    #[serde(rename = "HFP")]
    Hfp,
    #[serde(rename = "FRD")]
    Frd,
    #[serde(rename = "HFPD")]
    Hfpd,
    #[serde(rename = "DI")]
    Di,
    #[serde(rename = "HDI")]
    Hdi,
    #[serde(rename = "FD")]
    Fd,
    #[serde(rename = "HFD")]
    Hfd,
    #[serde(rename = "RFD")]
    Rfd,
    #[serde(rename = "RHFD")]
    Rhfd,
}

impl Metric {
    pub const ALL: [Metric; 11] = [
        Metric::Fr,
        Metric::Dfr,
        Metric::Hfp,
        Metric::Frd,
        Metric::Hfpd,
        Metric::Di,
        Metric::Hdi,
        Metric::Fd,
        Metric::Hfd,
        Metric::Rfd,
        Metric::Rhfd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Fr => "FR",
            Metric::Dfr => "DFR",
            Metric::Hfp => "HFP",
            Metric::Frd => "FRD",
            Metric::Hfpd => "HFPD",
            Metric::Di => "DI",
            Metric::Hdi => "HDI",
            Metric::Fd => "FD",
            Metric::Hfd => "HFD",
            Metric::Rfd => "RFD",
            Metric::Rhfd => "RHFD",
        }
    }

    /// Alternative name some reports use for the same metric.
    pub fn alias(self) -> Option<&'static str> {
        match self {
            Metric::Hfpd => Some("HFRD"),
            Metric::Rfd => Some("NFD"),
            Metric::Rhfd => Some("NHFD"),
            _ => None,
        }
    }

    fn index(self) -> usize {
        Metric::ALL.iter().position(|&m| m == self).unwrap()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == upper || m.alias() == Some(upper.as_str()))
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    Acceptable,
    Moderate,
    Disproportionate,
}

impl Band {
    pub fn color_name(self) -> &'static str {
        match self {
            Band::Acceptable => "green",
            Band::Moderate => "yellow",
            Band::Disproportionate => "red",
        }
    }

    /// Fill color used in charts.
    pub fn fill(self) -> &'static str {
        match self {
            Band::Acceptable => "#2e9e44",
            Band::Moderate => "#f2c200",
            Band::Disproportionate => "#d62728",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Acceptable => "Acceptable",
            Band::Moderate => "Moderate",
            Band::Disproportionate => "Disproportionate",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    pub ideal: f64,
    pub acceptable: f64,
    pub moderate: f64,
}

impl Threshold {
    pub fn new(ideal: f64, acceptable: f64, moderate: f64) -> Self {
        Self {
            ideal,
            acceptable,
            moderate,
        }
    }

    fn validate(&self, metric: &str) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidThreshold {
            metric: metric.to_string(),
            reason: reason.to_string(),
        };
        if !(self.ideal.is_finite() && self.acceptable.is_finite() && self.moderate.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        if self.acceptable <= 0.0 {
            return Err(invalid("acceptable delta must be positive"));
        }
        if self.acceptable >= self.moderate {
            return Err(invalid("acceptable delta must be below the moderate delta"));
        }
        Ok(())
    }

    /// Infinity is always disproportionate. A both-zero degeneracy means the
    /// groups are equal, so it is acceptable whatever number stands in for it.
    pub fn classify(&self, value: &MetricValue) -> Band {
        if value.annotation() == Annotation::BothValuesAreZero {
            return Band::Acceptable;
        }
        let Some(v) = value.value() else {
            return Band::Disproportionate;
        };
        let d = (v - self.ideal).abs();
        if d <= self.acceptable + EDGE_TOLERANCE {
            Band::Acceptable
        } else if d <= self.moderate + EDGE_TOLERANCE {
            Band::Moderate
        } else {
            Band::Disproportionate
        }
    }
}

/// One [`Threshold`] for every [`Metric`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    entries: [Threshold; 11],
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let mut entries = [Threshold::new(0.0, 0.1, 0.3); 11];
        for m in [Metric::Dfr, Metric::Di, Metric::Hdi] {
            entries[m.index()].ideal = 1.0;
        }
        for m in [Metric::Frd, Metric::Hfpd] {
            entries[m.index()] = Threshold::new(0.0, 0.05, 0.15);
        }
        Self { entries }
    }
}

impl ThresholdConfig {
    pub fn get(&self, metric: Metric) -> Threshold {
        self.entries[metric.index()]
    }

    pub fn set(&mut self, metric: Metric, threshold: Threshold) -> Result<()> {
        threshold.validate(metric.name())?;
        self.entries[metric.index()] = threshold;
        Ok(())
    }

    pub fn classify(&self, metric: Metric, value: &MetricValue) -> Band {
        self.get(metric).classify(value)
    }

    /// Classify by metric name; unknown names are a configuration error.
    pub fn classify_named(&self, metric: &str, value: &MetricValue) -> Result<Band> {
        Ok(self.classify(metric.parse()?, value))
    }

    /// Parse a threshold file. Metrics the file does not mention keep their
    /// default entry.
    pub fn parse(text: &str) -> Result<Self> {
        let table: BTreeMap<String, Threshold> = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut config = Self::default();
        for (name, threshold) in table {
            let metric: Metric = name.parse()?;
            config.set(metric, threshold)?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Render in the same one-line-per-metric form as the shipped file.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for m in Metric::ALL {
            let t = self.get(m);
            out.push_str(&format!(
                "{:<4} = {{ ideal = {:?}, acceptable = {:?}, moderate = {:?} }}\n",
                m.name(),
                t.ideal,
                t.acceptable,
                t.moderate
            ));
        }
        out
    }
}
