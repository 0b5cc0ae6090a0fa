//! Audit of post-processing debiasing through the label flips it makes.
//!
//! A frame holds predicted labels, corrected labels and a binary protected
//! attribute. Every position where the two labels differ is a flip: 0 → 1 is
//! favorable, 1 → 0 harmful. The crate counts flips overall and per group,
//! derives rate and proportionality metrics with explicit conventions for
//! zero denominators, bands each metric against configurable thresholds and
//! renders the result as text, JSON or an SVG chart. A reference debiaser and
//! a fairness-gated pipeline tie it together.
//!
//! ```
//! use flipaudit::{build_report, AuditFrame, ThresholdConfig, Verdict};
//!
//! let frame = AuditFrame::new(
//!     vec![1, 0, 1, 0],
//!     vec![1, 0, 1, 0],
//!     vec![0, 0, 1, 1],
//!     None,
//! )?;
//! let report = build_report(&frame, &ThresholdConfig::default(), None)?;
//! assert_eq!(report.verdict, Verdict::Proportionate);
//! # Ok::<(), flipaudit::Error>(())
//! ```

pub mod chart;
pub mod error;
pub mod fairness;
pub mod flips;
pub mod frame;
pub mod group;
pub mod io;
pub mod metric;
pub mod pipeline;
pub mod report;
pub mod thresholds;

pub use chart::{emit_chart, render_chart};
pub use error::{Error, Result};
pub use fairness::{
    equalized_odds_difference, evaluate_fairness, evaluate_fairness_strict, statistical_parity_difference,
    FairInterval, FairnessResult,
};
pub use flips::{classify_flips, summarize_flips, Flip, FlipSummary};
pub use frame::{AuditFrame, Column, Group};
pub use group::{compute_proportionality, split_by_group, GroupFlipSummary, ProportionalityMetrics};
pub use io::{ingest, ingest_reader, write_csv, ColumnMapping, InputFormat};
pub use metric::{Annotation, MetricValue, ValueKind};
pub use pipeline::{
    generate_scenario, run_audit_pipeline, sp_equalizing_debiaser, Debiaser, Decision, PassThrough, PipelineConfig,
    PipelineOutcome, ScenarioSpec, SpEqualizer,
};
pub use report::{
    build_report, parse_structured, render_structured, render_text, BandedMetric, ProportionalityReport, Verdict,
};
pub use thresholds::{Band, Metric, Threshold, ThresholdConfig};
