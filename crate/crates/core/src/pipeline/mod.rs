//! The audit loop: fairness gate on the predictions, debias, fairness gate
//! on the corrected labels, proportionality report, decision.

mod debias;
mod scenario;

pub use debias::{sp_equalizing_debiaser, Debiaser, PassThrough, SpEqualizer};
pub use scenario::{generate_scenario, GroupSpec, ScenarioSpec, TrueLabels, PAPER_EXAMPLE};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fairness::{evaluate_fairness, evaluate_fairness_strict, FairInterval, FairnessResult};
use crate::frame::AuditFrame;
use crate::report::{build_report, FairnessSection, ProportionalityReport, Verdict};
use crate::thresholds::ThresholdConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    FairAndProportionate,
    FairButDisproportionate,
    StillUnfair,
    NoDebiasNeeded,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub thresholds: ThresholdConfig,
    pub fair_interval: FairInterval,
    /// Fail instead of silently skipping the EO gate when `y_true` is absent.
    pub require_eo: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub pre_fairness: FairnessResult,
    /// `None` when the predictions already passed and nothing was debiased.
    pub post_fairness: Option<FairnessResult>,
    pub corrected: Option<Vec<u8>>,
    pub report: Option<ProportionalityReport>,
    pub decision: Decision,
}

impl PipelineOutcome {
    pub fn flip_count(&self) -> usize {
        self.report.as_ref().map_or(0, |r| r.overall.total_flips)
    }
}

fn gate(labels: &[u8], frame: &AuditFrame, config: &PipelineConfig) -> Result<FairnessResult> {
    if config.require_eo {
        evaluate_fairness_strict(labels, frame.group(), frame.y_true(), config.fair_interval)
    } else {
        evaluate_fairness(labels, frame.group(), frame.y_true(), config.fair_interval)
    }
}

/// Run the loop once. Only `frame`'s predictions, groups and true labels are
/// read; the corrected labels come from `debiaser`.
pub fn run_audit_pipeline(
    frame: &AuditFrame,
    debiaser: &dyn Debiaser,
    config: &PipelineConfig,
) -> Result<PipelineOutcome> {
    let pre = gate(frame.y_predicted(), frame, config)?;
    if pre.passes() {
        return Ok(PipelineOutcome {
            pre_fairness: pre,
            post_fairness: None,
            corrected: None,
            report: None,
            decision: Decision::NoDebiasNeeded,
        });
    }

    let corrected = debiaser
        .debias(frame)
        .and_then(|labels| frame.with_corrected(labels))
        .map_err(|e| Error::DebiasFailed {
            pre_fairness: Box::new(pre.clone()),
            source: Box::new(e),
        })?;
    let post = gate(corrected.y_corrected(), &corrected, config)?;
    let report = build_report(
        &corrected,
        &config.thresholds,
        Some(FairnessSection {
            pre: Some(pre.clone()),
            post: Some(post.clone()),
        }),
    )?;

    let decision = if !post.passes() {
        Decision::StillUnfair
    } else if report.verdict == Verdict::Proportionate {
        Decision::FairAndProportionate
    } else {
        Decision::FairButDisproportionate
    };
    Ok(PipelineOutcome {
        pre_fairness: pre,
        post_fairness: Some(post),
        corrected: Some(corrected.y_corrected().to_vec()),
        report: Some(report),
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Failing;

    impl Debiaser for Failing {
        fn debias(&self, _: &AuditFrame) -> Result<Vec<u8>> {
            Err(Error::InvalidEpsilon(-1.0))
        }
    }

    #[test]
    fn fair_input_exits_early() {
        let f = AuditFrame::from_predictions(vec![1, 0, 1, 0], vec![0, 0, 1, 1], None).unwrap();
        let out = run_audit_pipeline(&f, &SpEqualizer::new(0.1, 1), &PipelineConfig::default()).unwrap();
        assert_eq!(out.decision, Decision::NoDebiasNeeded);
        assert!(out.corrected.is_none());
        assert_eq!(out.flip_count(), 0);
    }

    #[test]
    fn debiaser_failure_keeps_pre_gate() {
        let f = AuditFrame::from_predictions(vec![1, 1, 0, 0], vec![0, 0, 1, 1], None).unwrap();
        match run_audit_pipeline(&f, &Failing, &PipelineConfig::default()) {
            Err(Error::DebiasFailed { pre_fairness, .. }) => {
                assert_eq!(pre_fairness.sp_difference, 1.0);
                assert!(!pre_fairness.sp_pass);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn require_eo_needs_true_labels() {
        let f = AuditFrame::from_predictions(vec![1, 0], vec![0, 1], None).unwrap();
        let config = PipelineConfig {
            require_eo: true,
            ..Default::default()
        };
        assert!(matches!(
            run_audit_pipeline(&f, &PassThrough, &config),
            Err(Error::MissingTrueLabels)
        ));
    }

    #[test]
    fn budget_exhausted_is_still_unfair() {
        let f = AuditFrame::from_predictions(
            vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
            None,
        )
        .unwrap();
        let d = SpEqualizer::new(0.1, 3).with_budget(1);
        let out = run_audit_pipeline(&f, &d, &PipelineConfig::default()).unwrap();
        assert_eq!(out.decision, Decision::StillUnfair);
        assert_eq!(out.flip_count(), 1);
    }
}
