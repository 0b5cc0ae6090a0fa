//! Statistical parity and equalized odds, used as the fairness gates before
//! and after debiasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Column;

/// Closed interval a fairness gap must fall into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairInterval {
    pub lower: f64,
    pub upper: f64,
}

impl Default for FairInterval {
    fn default() -> Self {
        Self {
            lower: -0.1,
            upper: 0.1,
        }
    }
}

impl FairInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower <= upper) {
            return Err(Error::Config(format!(
                "fair interval [{lower}, {upper}] is not a finite closed interval"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct GroupRates {
    n: usize,
    positives: usize,
}

impl GroupRates {
    fn rate(&self) -> f64 {
        self.positives as f64 / self.n as f64
    }
}

fn check_aligned(column: Column, values: &[u8], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::LengthMismatch {
            column,
            expected,
            found: values.len(),
        });
    }
    Ok(())
}

/// Fraction of favorable labels among `n` instances, the quantity compared
/// across groups by statistical parity.
pub fn positive_rate(positives: usize, n: usize) -> f64 {
    positives as f64 / n as f64
}

/// P(label = 1 | S = 0) − P(label = 1 | S = 1).
///
/// Negative values mean the unprivileged group receives the favorable
/// outcome less often.
pub fn statistical_parity_difference(labels: &[u8], group: &[u8]) -> Result<f64> {
    check_aligned(Column::Group, group, labels.len())?;
    let mut by_group = [GroupRates::default(); 2];
    for (&y, &s) in labels.iter().zip(group) {
        let g = &mut by_group[usize::from(s)];
        g.n += 1;
        g.positives += usize::from(y);
    }
    for (id, g) in by_group.iter().enumerate() {
        if g.n == 0 {
            return Err(Error::GroupHasNoInstances { group: id as u8 });
        }
    }
    Ok(positive_rate(by_group[0].positives, by_group[0].n) - positive_rate(by_group[1].positives, by_group[1].n))
}

/// Equalized odds gap with a note about any rate that could not be compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualizedOdds {
    pub difference: f64,
    pub tpr_gap: Option<f64>,
    pub fpr_gap: Option<f64>,
    pub warning: Option<String>,
}

/// max(|TPR₀ − TPR₁|, |FPR₀ − FPR₁|).
///
/// A rate is undefined for a group with no true positives (TPR) or no true
/// negatives (FPR); that gap is skipped and `warning` says so. If both gaps
/// are undefined the difference is 0.
pub fn equalized_odds_difference(y_true: &[u8], labels: &[u8], group: &[u8]) -> Result<EqualizedOdds> {
    check_aligned(Column::Predicted, labels, y_true.len())?;
    check_aligned(Column::Group, group, y_true.len())?;
    // [group][true label] -> (count, predicted positive)
    let mut cells = [[GroupRates::default(); 2]; 2];
    let mut sizes = [0usize; 2];
    for ((&t, &y), &s) in y_true.iter().zip(labels).zip(group) {
        let c = &mut cells[usize::from(s)][usize::from(t)];
        c.n += 1;
        c.positives += usize::from(y);
        sizes[usize::from(s)] += 1;
    }
    for (id, &n) in sizes.iter().enumerate() {
        if n == 0 {
            return Err(Error::GroupHasNoInstances { group: id as u8 });
        }
    }

    let gap = |label: usize| -> Option<f64> {
        let (a, b) = (cells[0][label], cells[1][label]);
        (a.n > 0 && b.n > 0).then(|| (a.rate() - b.rate()).abs())
    };
    let tpr_gap = gap(1);
    let fpr_gap = gap(0);

    let mut skipped = Vec::new();
    if tpr_gap.is_none() {
        skipped.push("TPR (a group has no true positives)");
    }
    if fpr_gap.is_none() {
        skipped.push("FPR (a group has no true negatives)");
    }
    let warning = (!skipped.is_empty()).then(|| format!("skipped undefined {}", skipped.join(" and ")));
    let difference = tpr_gap.unwrap_or(0.0).max(fpr_gap.unwrap_or(0.0));
    Ok(EqualizedOdds {
        difference,
        tpr_gap,
        fpr_gap,
        warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessResult {
    pub sp_difference: f64,
    pub eo_difference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eo_warning: Option<String>,
    pub fair_interval: FairInterval,
    pub sp_pass: bool,
    pub eo_pass: Option<bool>,
}

impl FairnessResult {
    /// Both gates pass; EO counts as passing when it was not evaluated.
    pub fn passes(&self) -> bool {
        self.sp_pass && self.eo_pass.unwrap_or(true)
    }
}

/// Evaluate the SP gate, and the EO gate when true labels are available.
pub fn evaluate_fairness(
    labels: &[u8],
    group: &[u8],
    y_true: Option<&[u8]>,
    interval: FairInterval,
) -> Result<FairnessResult> {
    let sp = statistical_parity_difference(labels, group)?;
    let eo = y_true
        .map(|t| equalized_odds_difference(t, labels, group))
        .transpose()?;
    Ok(FairnessResult {
        sp_difference: sp,
        eo_difference: eo.as_ref().map(|e| e.difference),
        eo_warning: eo.as_ref().and_then(|e| e.warning.clone()),
        fair_interval: interval,
        sp_pass: interval.contains(sp),
        // the EO gap is nonnegative, so only the upper bound matters
        eo_pass: eo.map(|e| e.difference <= interval.upper),
    })
}

/// Like [`evaluate_fairness`] but fails when true labels are missing.
pub fn evaluate_fairness_strict(
    labels: &[u8],
    group: &[u8],
    y_true: Option<&[u8]>,
    interval: FairInterval,
) -> Result<FairnessResult> {
    let t = y_true.ok_or(Error::MissingTrueLabels)?;
    evaluate_fairness(labels, group, Some(t), interval)
}
