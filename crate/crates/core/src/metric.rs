//! Extended-real metric values that remember how they were obtained.
//!
//! Several flip metrics are ratios whose denominators can vanish. Rather than
//! leaking NaN, every metric is a [`MetricValue`]: either a finite number or
//! positive infinity, always paired with an [`Annotation`] that records which
//! degenerate-case convention (if any) produced it.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Short analysis attached to every metric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Annotation {
    #[serde(rename = "Regular calculation")]
    RegularCalculation,
    #[serde(rename = "No flips")]
    NoFlips,
    #[serde(rename = "Only harmful flips")]
    OnlyHarmfulFlips,
    #[serde(rename = "Only beneficial flips")]
    OnlyBeneficialFlips,
    #[serde(rename = "No harmful flips")]
    NoHarmfulFlips,
    #[serde(rename = "One value is zero")]
    OneValueIsZero,
    #[serde(rename = "Both values are zero")]
    BothValuesAreZero,
}

impl Annotation {
    pub fn as_str(self) -> &'static str {
        match self {
            Annotation::RegularCalculation => "Regular calculation",
            Annotation::NoFlips => "No flips",
            Annotation::OnlyHarmfulFlips => "Only harmful flips",
            Annotation::OnlyBeneficialFlips => "Only beneficial flips",
            Annotation::NoHarmfulFlips => "No harmful flips",
            Annotation::OneValueIsZero => "One value is zero",
            Annotation::BothValuesAreZero => "Both values are zero",
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueKind {
    Finite(f64),
    PositiveInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    kind: ValueKind,
    annotation: Annotation,
}

impl MetricValue {
    /// Panics if `value` is not finite; use [`MetricValue::infinite`] for ∞.
    pub fn finite(value: f64, annotation: Annotation) -> Self {
        assert!(value.is_finite(), "finite metric value expected, got {value}");
        Self {
            kind: ValueKind::Finite(value),
            annotation,
        }
    }

    pub fn infinite(annotation: Annotation) -> Self {
        Self {
            kind: ValueKind::PositiveInfinity,
            annotation,
        }
    }

    pub fn regular(value: f64) -> Self {
        Self::finite(value, Annotation::RegularCalculation)
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn annotation(&self) -> Annotation {
        self.annotation
    }

    /// The finite value, or `None` for +∞.
    pub fn value(&self) -> Option<f64> {
        match self.kind {
            ValueKind::Finite(v) => Some(v),
            ValueKind::PositiveInfinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, ValueKind::PositiveInfinity)
    }

    /// Numeric view with +∞ mapped to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    /// Display string: `∞` for infinities, otherwise see [`format_rate`].
    pub fn display(&self) -> String {
        match self.kind {
            ValueKind::Finite(v) => format_rate(v),
            ValueKind::PositiveInfinity => "∞".to_string(),
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Report-style rounding of a rate.
///
/// Whole numbers keep one decimal (`1.0`, `0.0`), values of at least 0.1 get
/// two decimals and smaller values three, so that `0.0729` shows as `0.073`
/// and `0.1318` as `0.13`.
pub fn format_rate(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{value:.1}")
    } else if value.abs() >= 0.1 {
        format!("{value:.2}")
    } else {
        format!("{value:.3}")
    }
}

/// Wire form of a metric value in structured reports.
///
/// `display` is derived on output and ignored on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct MetricValueRepr {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    pub annotation: Annotation,
}

impl From<MetricValue> for MetricValueRepr {
    fn from(m: MetricValue) -> Self {
        match m.kind {
            ValueKind::Finite(v) => Self {
                kind: "finite".into(),
                value: Some(v),
                display: Some(m.display()),
                annotation: m.annotation,
            },
            ValueKind::PositiveInfinity => Self {
                kind: "inf".into(),
                value: None,
                display: Some(m.display()),
                annotation: m.annotation,
            },
        }
    }
}

impl TryFrom<MetricValueRepr> for MetricValue {
    type Error = String;

    fn try_from(r: MetricValueRepr) -> Result<Self, Self::Error> {
        match r.kind.as_str() {
            "finite" => match r.value {
                Some(v) if v.is_finite() => Ok(MetricValue::finite(v, r.annotation)),
                _ => Err("finite metric requires a finite `value`".into()),
            },
            "inf" => Ok(MetricValue::infinite(r.annotation)),
            other => Err(format!("unknown metric kind {other:?}")),
        }
    }
}

impl Serialize for MetricValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MetricValueRepr::from(*self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MetricValueRepr::deserialize(d)?;
        MetricValue::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_matches_report_precision() {
        assert_eq!(format_rate(174.0 / 1320.0), "0.13");
        assert_eq!(format_rate(38.0 / 521.0), "0.073");
        assert_eq!(format_rate(136.0 / 799.0), "0.17");
        assert_eq!(format_rate(1.0), "1.0");
        assert_eq!(format_rate(0.0), "0.0");
        assert_eq!(format_rate(0.4), "0.40");
        assert_eq!(format_rate(2.3336), "2.33");
    }

    #[test]
    fn infinity_displays_as_glyph() {
        let m = MetricValue::infinite(Annotation::OneValueIsZero);
        assert_eq!(m.display(), "∞");
        assert_eq!(m.as_f64(), f64::INFINITY);
        assert_eq!(m.value(), None);
    }

    #[test]
    #[should_panic]
    fn finite_rejects_nan() {
        let _ = MetricValue::finite(f64::NAN, Annotation::RegularCalculation);
    }

    #[test]
    fn wire_form() {
        let inf = serde_json::to_value(MetricValue::infinite(Annotation::OneValueIsZero)).unwrap();
        assert_eq!(inf["kind"], "inf");
        assert_eq!(inf["annotation"], "One value is zero");
        assert!(inf.get("value").is_none());

        let fin = serde_json::to_value(MetricValue::regular(0.25)).unwrap();
        assert_eq!(fin["kind"], "finite");
        assert_eq!(fin["value"], 0.25);
        assert_eq!(fin["display"], "0.25");

        let bad: Result<MetricValue, _> = serde_json::from_str(r#"{"kind":"finite","annotation":"No flips"}"#);
        assert!(bad.is_err());
    }
}
