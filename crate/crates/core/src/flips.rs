//! Per-instance flip classification and the overall flip metrics:
//! flip rate (FR), directional flip ratio (DFR) and harmful flip
//! proportion (HFP).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::AuditFrame;
use crate::metric::{Annotation, MetricValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flip {
    NoFlip,
    /// 0 → 1: the instance gains the favorable outcome.
    Favorable,
    /// 1 → 0: the instance loses the favorable outcome.
    Unfavorable,
}

impl Flip {
    pub fn of(predicted: u8, corrected: u8) -> Self {
        match (predicted, corrected) {
            (0, 1) => Flip::Favorable,
            (1, 0) => Flip::Unfavorable,
            _ => Flip::NoFlip,
        }
    }

    pub fn is_flip(self) -> bool {
        self != Flip::NoFlip
    }
}

pub fn classify_flips(frame: &AuditFrame) -> Vec<Flip> {
    frame
        .y_predicted()
        .iter()
        .zip(frame.y_corrected())
        .map(|(&p, &c)| Flip::of(p, c))
        .collect()
}

/// FR = flips / n.
pub fn flip_rate(n_flips: usize, n: usize) -> Result<MetricValue> {
    if n == 0 {
        return Err(Error::EmptySelection);
    }
    debug_assert!(n_flips <= n);
    let rate = n_flips as f64 / n as f64;
    let annotation = if n_flips == 0 {
        Annotation::NoFlips
    } else {
        Annotation::RegularCalculation
    };
    Ok(MetricValue::finite(rate, annotation))
}

/// DFR = favorable / unfavorable, with ∞ when only favorable flips occur,
/// 0 when only unfavorable ones do and 1 when there are none.
pub fn directional_flip_ratio(n_favorable: usize, n_unfavorable: usize) -> MetricValue {
    match (n_favorable, n_unfavorable) {
        (0, 0) => MetricValue::finite(1.0, Annotation::NoFlips),
        (_, 0) => MetricValue::infinite(Annotation::OnlyBeneficialFlips),
        (0, _) => MetricValue::finite(0.0, Annotation::OnlyHarmfulFlips),
        (fav, unfav) => MetricValue::regular(fav as f64 / unfav as f64),
    }
}

/// HFP = unfavorable / flips; 0 (annotated "No flips") when nothing flipped.
///
/// Panics if `n_unfavorable > n_flips`.
pub fn harmful_flip_proportion(n_unfavorable: usize, n_flips: usize) -> MetricValue {
    assert!(
        n_unfavorable <= n_flips,
        "unfavorable flips ({n_unfavorable}) exceed total flips ({n_flips})"
    );
    if n_flips == 0 {
        return MetricValue::finite(0.0, Annotation::NoFlips);
    }
    let annotation = if n_unfavorable == n_flips {
        Annotation::OnlyHarmfulFlips
    } else if n_unfavorable == 0 {
        Annotation::NoHarmfulFlips
    } else {
        Annotation::RegularCalculation
    };
    MetricValue::finite(n_unfavorable as f64 / n_flips as f64, annotation)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipSummary {
    pub instances: usize,
    pub n_flips: usize,
    pub n_favorable: usize,
    pub n_unfavorable: usize,
    pub flip_rate: MetricValue,
    pub dfr: MetricValue,
    pub hfp: MetricValue,
}

impl FlipSummary {
    pub fn from_counts(instances: usize, n_favorable: usize, n_unfavorable: usize) -> Result<Self> {
        let n_flips = n_favorable + n_unfavorable;
        Ok(Self {
            instances,
            n_flips,
            n_favorable,
            n_unfavorable,
            flip_rate: flip_rate(n_flips, instances)?,
            dfr: directional_flip_ratio(n_favorable, n_unfavorable),
            hfp: harmful_flip_proportion(n_unfavorable, n_flips),
        })
    }

    /// FR as a plain number; always finite.
    pub fn rate(&self) -> f64 {
        self.flip_rate.as_f64()
    }

    /// HFP as a plain number; always finite.
    pub fn harmful_proportion(&self) -> f64 {
        self.hfp.as_f64()
    }
}

/// Summarize the flips of the whole frame, or only of the instances
/// selected by `mask`.
pub fn summarize_flips(frame: &AuditFrame, mask: Option<&[bool]>) -> Result<FlipSummary> {
    if let Some(m) = mask {
        if m.len() != frame.len() {
            return Err(Error::MaskLength {
                expected: frame.len(),
                found: m.len(),
            });
        }
    }
    let selected = |i: usize| mask.is_none_or(|m| m[i]);

    let (mut instances, mut fav, mut unfav) = (0usize, 0usize, 0usize);
    for (i, (&p, &c)) in frame.y_predicted().iter().zip(frame.y_corrected()).enumerate() {
        if !selected(i) {
            continue;
        }
        instances += 1;
        match Flip::of(p, c) {
            Flip::Favorable => fav += 1,
            Flip::Unfavorable => unfav += 1,
            Flip::NoFlip => {}
        }
    }
    if instances == 0 {
        return Err(Error::EmptySelection);
    }
    FlipSummary::from_counts(instances, fav, unfav)
}
