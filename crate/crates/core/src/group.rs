//! Group-based flip proportionality metrics.
//!
//! Each pairwise metric comes in two flavors: one over group flip rates
//! (FRD, DI, FD, RFD) and one over group harmful flip proportions
//! (HFPD, HDI, HFD, RHFD). The same function serves both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flips::{summarize_flips, FlipSummary};
use crate::frame::{AuditFrame, Group};
use crate::metric::{Annotation, MetricValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFlipSummary {
    pub group: u8,
    pub size: usize,
    pub summary: FlipSummary,
}

impl GroupFlipSummary {
    pub fn group(&self) -> Group {
        Group::from_id(self.group).expect("group id is 0 or 1")
    }
}

fn group_summary(frame: &AuditFrame, g: Group) -> Result<GroupFlipSummary> {
    let mask = frame.group_mask(g);
    let summary = summarize_flips(frame, Some(&mask)).map_err(|e| match e {
        Error::EmptySelection => Error::GroupHasNoInstances { group: g.id() },
        other => other,
    })?;
    Ok(GroupFlipSummary {
        group: g.id(),
        size: summary.instances,
        summary,
    })
}

/// Returns `(privileged, unprivileged)`.
pub fn split_by_group(frame: &AuditFrame) -> Result<(GroupFlipSummary, GroupFlipSummary)> {
    let privileged = group_summary(frame, Group::Privileged)?;
    let unprivileged = group_summary(frame, Group::Unprivileged)?;
    Ok((privileged, unprivileged))
}

/// |a − b|. Serves FRD and HFPD.
pub fn rate_difference(rate_priv: f64, rate_unpriv: f64) -> MetricValue {
    MetricValue::regular((rate_priv - rate_unpriv).abs())
}

/// max / min. Serves DI and HDI.
pub fn disparity_index(rate_a: f64, rate_b: f64) -> MetricValue {
    let (lo, hi) = if rate_a <= rate_b {
        (rate_a, rate_b)
    } else {
        (rate_b, rate_a)
    };
    if hi == 0.0 {
        MetricValue::finite(1.0, Annotation::BothValuesAreZero)
    } else if lo == 0.0 {
        MetricValue::infinite(Annotation::OneValueIsZero)
    } else {
        MetricValue::regular(hi / lo)
    }
}

/// |a / FR − b / FR| against the overall flip rate. Serves FD and HFD.
///
/// When exactly one group value is zero the result is ∞, and when both are
/// zero it is 1. Both are conventions, not what the raw quotient gives.
///
/// Panics if a group value is positive while `overall_fr` is zero, which
/// cannot happen for rates taken from the same frame.
pub fn flip_disparity(rate_priv: f64, rate_unpriv: f64, overall_fr: f64) -> MetricValue {
    match (rate_priv == 0.0, rate_unpriv == 0.0) {
        (true, true) => MetricValue::finite(1.0, Annotation::BothValuesAreZero),
        (true, false) | (false, true) => MetricValue::infinite(Annotation::OneValueIsZero),
        (false, false) => {
            assert!(
                overall_fr > 0.0,
                "overall flip rate is zero while group values are positive"
            );
            MetricValue::regular((rate_priv / overall_fr - rate_unpriv / overall_fr).abs())
        }
    }
}

/// diff / (a + b), or 0 when both rates are zero. Serves RFD and RHFD.
pub fn relative_disparity(diff: f64, rate_priv: f64, rate_unpriv: f64) -> MetricValue {
    let sum = rate_priv + rate_unpriv;
    if sum == 0.0 {
        MetricValue::finite(0.0, Annotation::NoFlips)
    } else {
        MetricValue::regular(diff / sum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityMetrics {
    pub frd: MetricValue,
    pub di: MetricValue,
    pub fd: MetricValue,
    pub rfd: MetricValue,
    pub hfpd: MetricValue,
    pub hdi: MetricValue,
    pub hfd: MetricValue,
    pub rhfd: MetricValue,
}

impl ProportionalityMetrics {
    pub fn from_summaries(privileged: &FlipSummary, unprivileged: &FlipSummary, overall: &FlipSummary) -> Self {
        let overall_fr = overall.rate();
        let (fr_p, fr_u) = (privileged.rate(), unprivileged.rate());
        let (hfp_p, hfp_u) = (privileged.harmful_proportion(), unprivileged.harmful_proportion());

        let frd = rate_difference(fr_p, fr_u);
        let hfpd = rate_difference(hfp_p, hfp_u);
        Self {
            di: disparity_index(fr_p, fr_u),
            fd: flip_disparity(fr_p, fr_u, overall_fr),
            rfd: relative_disparity(frd.as_f64(), fr_p, fr_u),
            hdi: disparity_index(hfp_p, hfp_u),
            hfd: flip_disparity(hfp_p, hfp_u, overall_fr),
            rhfd: relative_disparity(hfpd.as_f64(), hfp_p, hfp_u),
            frd,
            hfpd,
        }
    }

    /// Flip-rate family in report order: FRD, DI, FD, RFD.
    pub fn flip_rate_family(&self) -> [MetricValue; 4] {
        [self.frd, self.di, self.fd, self.rfd]
    }

    /// Harmful family in report order: HFPD, HDI, HFD, RHFD.
    pub fn harmful_family(&self) -> [MetricValue; 4] {
        [self.hfpd, self.hdi, self.hfd, self.rhfd]
    }
}

pub fn compute_proportionality(frame: &AuditFrame) -> Result<ProportionalityMetrics> {
    let (privileged, unprivileged) = split_by_group(frame)?;
    let overall = summarize_flips(frame, None)?;
    Ok(ProportionalityMetrics::from_summaries(
        &privileged.summary,
        &unprivileged.summary,
        &overall,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ValueKind;

    const FR0: f64 = 136.0 / 799.0;
    const FR1: f64 = 38.0 / 521.0;
    const FR: f64 = 174.0 / 1320.0;

    fn close(m: MetricValue, expected: f64, tol: f64) {
        let v = m.value().expect("finite");
        assert!((v - expected).abs() <= tol, "{v} vs {expected}");
    }

    #[test]
    fn rate_difference_cases() {
        close(rate_difference(FR0, FR1), 0.097, 5e-4);
        close(rate_difference(1.0, 0.0), 1.0, 0.0);
        close(rate_difference(0.2, 0.2), 0.0, 0.0);
    }

    #[test]
    fn disparity_index_cases() {
        close(disparity_index(FR0, FR1), 2.33, 5e-3);
        let hdi = disparity_index(1.0, 0.0);
        assert!(hdi.is_infinite());
        assert_eq!(hdi.annotation(), Annotation::OneValueIsZero);
        let eq = disparity_index(0.2, 0.2);
        assert_eq!(eq.kind(), ValueKind::Finite(1.0));
        assert_eq!(eq.annotation(), Annotation::RegularCalculation);
        let zero = disparity_index(0.0, 0.0);
        assert_eq!(zero.kind(), ValueKind::Finite(1.0));
        assert_eq!(zero.annotation(), Annotation::BothValuesAreZero);
    }

    #[test]
    fn flip_disparity_cases() {
        close(flip_disparity(FR0, FR1, FR), 0.74, 5e-3);
        let hfd = flip_disparity(1.0, 0.0, FR);
        assert!(hfd.is_infinite());
        assert_eq!(hfd.annotation(), Annotation::OneValueIsZero);
        close(flip_disparity(0.3, 0.3, 0.3), 0.0, 0.0);
        let zero = flip_disparity(0.0, 0.0, 0.0);
        assert_eq!(zero.kind(), ValueKind::Finite(1.0));
        assert_eq!(zero.annotation(), Annotation::BothValuesAreZero);
    }

    #[test]
    fn relative_disparity_cases() {
        close(relative_disparity(FR0 - FR1, FR0, FR1), 0.40, 5e-3);
        let r = relative_disparity(1.0, 1.0, 0.0);
        assert_eq!(r.kind(), ValueKind::Finite(1.0));
        assert_eq!(r.annotation(), Annotation::RegularCalculation);
        let z = relative_disparity(0.0, 0.0, 0.0);
        assert_eq!(z.kind(), ValueKind::Finite(0.0));
        assert_eq!(z.annotation(), Annotation::NoFlips);
    }

    #[test]
    fn split_requires_both_groups() {
        let f = AuditFrame::new(vec![1, 0], vec![0, 0], vec![1, 1], None).unwrap();
        assert!(matches!(
            split_by_group(&f),
            Err(Error::GroupHasNoInstances { group: 0 })
        ));
        let f = AuditFrame::new(vec![1, 0], vec![0, 0], vec![0, 1], None).unwrap();
        let (p, u) = split_by_group(&f).unwrap();
        assert_eq!((p.group(), u.group()), (Group::Privileged, Group::Unprivileged));
        assert_eq!(p.size + u.size, 2);
    }

    #[test]
    fn symmetric_identical_flips() {
        // one harmful and one beneficial flip in each group of four
        let f = AuditFrame::new(
            vec![1, 0, 1, 0, 1, 0, 1, 0],
            vec![0, 1, 1, 0, 0, 1, 1, 0],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            None,
        )
        .unwrap();
        let m = compute_proportionality(&f).unwrap();
        for v in [m.frd, m.hfpd, m.fd, m.hfd, m.rfd, m.rhfd] {
            assert_eq!(v.kind(), ValueKind::Finite(0.0));
        }
        for v in [m.di, m.hdi] {
            assert_eq!(v.kind(), ValueKind::Finite(1.0));
        }
    }
}
