//! Proportionality report: every flip metric with its band, laid out as
//! dataset information, overall metrics, flips by groups, directional flip
//! ratios, flip proportionality and harmful flip proportionality.
//!
//! The structured form (JSON) is the interchange format between `audit` and
//! `plot`; it keeps full-precision values next to their display strings and
//! encodes infinities as `"kind": "inf"`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fairness::FairnessResult;
use crate::flips::{summarize_flips, FlipSummary};
use crate::frame::AuditFrame;
use crate::group::{split_by_group, GroupFlipSummary, ProportionalityMetrics};
use crate::metric::{MetricValue, MetricValueRepr};
use crate::thresholds::{Band, Metric, ThresholdConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// A metric value together with its threshold band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BandedRepr", into = "BandedRepr")]
pub struct BandedMetric {
    pub value: MetricValue,
    pub band: Band,
}

impl BandedMetric {
    fn classify(metric: Metric, value: MetricValue, config: &ThresholdConfig) -> Self {
        Self {
            value,
            band: config.classify(metric, &value),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BandedRepr {
    #[serde(flatten)]
    value: MetricValueRepr,
    band: Band,
}

impl From<BandedMetric> for BandedRepr {
    fn from(b: BandedMetric) -> Self {
        Self {
            value: b.value.into(),
            band: b.band,
        }
    }
}

impl TryFrom<BandedRepr> for BandedMetric {
    type Error = String;

    fn try_from(r: BandedRepr) -> Result<Self, Self::Error> {
        Ok(Self {
            value: r.value.try_into()?,
            band: r.band,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Proportionate,
    ReviewRequired,
    Disproportionate,
}

impl Verdict {
    pub fn from_band(band: Band) -> Self {
        match band {
            Band::Acceptable => Verdict::Proportionate,
            Band::Moderate => Verdict::ReviewRequired,
            Band::Disproportionate => Verdict::Disproportionate,
        }
    }

    /// Worst band wins; no bands at all is proportionate.
    pub fn from_bands(bands: impl IntoIterator<Item = Band>) -> Self {
        Self::from_band(bands.into_iter().max().unwrap_or(Band::Acceptable))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Proportionate => "Proportionate",
            Verdict::ReviewRequired => "ReviewRequired",
            Verdict::Disproportionate => "Disproportionate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub total_samples: usize,
    pub group_0_samples: usize,
    pub group_1_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallSection {
    pub total_flips: usize,
    pub favorable_flips: usize,
    pub harmful_flips: usize,
    pub flip_rate: BandedMetric,
    pub hfp: BandedMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSection {
    pub group: u8,
    pub samples: usize,
    pub flips: usize,
    pub favorable_flips: usize,
    pub harmful_flips: usize,
    pub flip_rate: BandedMetric,
    pub hfp: BandedMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalSection {
    pub dfr: BandedMetric,
    pub group_0_dfr: BandedMetric,
    pub group_1_dfr: BandedMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipProportionality {
    pub frd: BandedMetric,
    pub di: BandedMetric,
    pub fd: BandedMetric,
    pub rfd: BandedMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmfulProportionality {
    pub hfpd: BandedMetric,
    pub hdi: BandedMetric,
    pub hfd: BandedMetric,
    pub rhfd: BandedMetric,
}

/// Fairness gate results on the predicted (`pre`) and corrected (`post`)
/// labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessSection {
    pub pre: Option<FairnessResult>,
    pub post: Option<FairnessResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityReport {
    pub schema_version: u32,
    pub dataset: DatasetInfo,
    pub overall: OverallSection,
    /// Group 0 (unprivileged) first, then group 1 (privileged).
    pub groups: [GroupSection; 2],
    pub directional: DirectionalSection,
    pub flip_proportionality: FlipProportionality,
    pub harmful_proportionality: HarmfulProportionality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fairness: Option<FairnessSection>,
    pub verdict: Verdict,
}

fn group_section(g: &GroupFlipSummary, config: &ThresholdConfig) -> GroupSection {
    let s = &g.summary;
    GroupSection {
        group: g.group,
        samples: g.size,
        flips: s.n_flips,
        favorable_flips: s.n_favorable,
        harmful_flips: s.n_unfavorable,
        flip_rate: BandedMetric::classify(Metric::Fr, s.flip_rate, config),
        hfp: BandedMetric::classify(Metric::Hfp, s.hfp, config),
    }
}

pub fn build_report(
    frame: &AuditFrame,
    config: &ThresholdConfig,
    fairness: Option<FairnessSection>,
) -> Result<ProportionalityReport> {
    let overall: FlipSummary = summarize_flips(frame, None)?;
    let (privileged, unprivileged) = split_by_group(frame)?;
    let metrics = ProportionalityMetrics::from_summaries(&privileged.summary, &unprivileged.summary, &overall);
    let banded = |m: Metric, v: MetricValue| BandedMetric::classify(m, v, config);

    let flip_proportionality = FlipProportionality {
        frd: banded(Metric::Frd, metrics.frd),
        di: banded(Metric::Di, metrics.di),
        fd: banded(Metric::Fd, metrics.fd),
        rfd: banded(Metric::Rfd, metrics.rfd),
    };
    let harmful_proportionality = HarmfulProportionality {
        hfpd: banded(Metric::Hfpd, metrics.hfpd),
        hdi: banded(Metric::Hdi, metrics.hdi),
        hfd: banded(Metric::Hfd, metrics.hfd),
        rhfd: banded(Metric::Rhfd, metrics.rhfd),
    };
    let mut report = ProportionalityReport {
        schema_version: SCHEMA_VERSION,
        dataset: DatasetInfo {
            total_samples: frame.len(),
            group_0_samples: unprivileged.size,
            group_1_samples: privileged.size,
        },
        overall: OverallSection {
            total_flips: overall.n_flips,
            favorable_flips: overall.n_favorable,
            harmful_flips: overall.n_unfavorable,
            flip_rate: banded(Metric::Fr, overall.flip_rate),
            hfp: banded(Metric::Hfp, overall.hfp),
        },
        groups: [group_section(&unprivileged, config), group_section(&privileged, config)],
        directional: DirectionalSection {
            dfr: banded(Metric::Dfr, overall.dfr),
            group_0_dfr: banded(Metric::Dfr, unprivileged.summary.dfr),
            group_1_dfr: banded(Metric::Dfr, privileged.summary.dfr),
        },
        flip_proportionality,
        harmful_proportionality,
        fairness,
        verdict: Verdict::Proportionate,
    };
    report.verdict = Verdict::from_bands(report.proportionality_metrics().map(|(_, b)| b.band));
    Ok(report)
}

impl ProportionalityReport {
    /// The eight pairwise metrics, flip-rate family first.
    pub fn proportionality_metrics(&self) -> [(Metric, BandedMetric); 8] {
        let f = &self.flip_proportionality;
        let h = &self.harmful_proportionality;
        [
            (Metric::Frd, f.frd),
            (Metric::Di, f.di),
            (Metric::Fd, f.fd),
            (Metric::Rfd, f.rfd),
            (Metric::Hfpd, h.hfpd),
            (Metric::Hdi, h.hdi),
            (Metric::Hfd, h.hfd),
            (Metric::Rhfd, h.rhfd),
        ]
    }

    /// Every banded metric with a display label, in report order.
    pub fn all_metrics(&self) -> Vec<(String, Metric, BandedMetric)> {
        let mut out = vec![
            ("FR".to_string(), Metric::Fr, self.overall.flip_rate),
            ("HFP".to_string(), Metric::Hfp, self.overall.hfp),
        ];
        for g in &self.groups {
            out.push((format!("Group {} FR", g.group), Metric::Fr, g.flip_rate));
            out.push((format!("Group {} HFP", g.group), Metric::Hfp, g.hfp));
        }
        let d = &self.directional;
        out.push(("DFR".to_string(), Metric::Dfr, d.dfr));
        out.push(("Group 0 DFR".to_string(), Metric::Dfr, d.group_0_dfr));
        out.push(("Group 1 DFR".to_string(), Metric::Dfr, d.group_1_dfr));
        for (m, b) in self.proportionality_metrics() {
            out.push((m.name().to_string(), m, b));
        }
        out
    }
}

pub const SECTION_TITLES: [&str; 6] = [
    "Dataset information",
    "Overall Metrics",
    "Flips by Groups",
    "Directional flip ratio",
    "Flip Proportionality Metrics",
    "Harmful Flip Proportionality Metrics",
];

struct TextTable {
    out: String,
}

impl TextTable {
    fn section(&mut self, title: &str) {
        let _ = writeln!(self.out, "\n{title}\n{}", "-".repeat(title.len()));
    }

    fn count(&mut self, label: &str, n: usize) {
        let _ = writeln!(self.out, "  {label:<24}{n:>8}");
    }

    fn metric(&mut self, label: &str, m: &BandedMetric) {
        let _ = writeln!(
            self.out,
            "  {label:<24}{:>8}  {:<24}{}",
            m.value.display(),
            m.value.annotation().as_str(),
            m.band
        );
    }

    fn line(&mut self, text: &str) {
        let _ = writeln!(self.out, "  {text}");
    }
}

fn describe_fairness(t: &mut TextTable, stage: &str, r: &FairnessResult) {
    let pass = |p: bool| if p { "pass" } else { "fail" };
    t.line(&format!(
        "{stage:<10} SP difference {:>7.3} ({})",
        r.sp_difference,
        pass(r.sp_pass)
    ));
    if let (Some(eo), Some(p)) = (r.eo_difference, r.eo_pass) {
        t.line(&format!("{stage:<10} EO difference {eo:>7.3} ({})", pass(p)));
    }
    if let Some(w) = &r.eo_warning {
        t.line(&format!("{stage:<10} note: {w}"));
    }
}

/// Plain-text rendering: one row per metric with value, short analysis and
/// band.
pub fn render_text(report: &ProportionalityReport) -> String {
    let mut t = TextTable { out: String::new() };
    let _ = writeln!(t.out, "Flip proportionality report");
    let _ = writeln!(t.out, "  {:<24}{:>8}  {:<24}Band", "Metric", "Result", "Short Analysis");

    t.section(SECTION_TITLES[0]);
    t.count("Total samples", report.dataset.total_samples);
    t.count("Group 0 samples", report.dataset.group_0_samples);
    t.count("Group 1 samples", report.dataset.group_1_samples);

    t.section(SECTION_TITLES[1]);
    t.count("Total flips", report.overall.total_flips);
    t.metric("FR", &report.overall.flip_rate);
    t.count("Harmful flips", report.overall.harmful_flips);
    t.metric("HFP", &report.overall.hfp);

    t.section(SECTION_TITLES[2]);
    for g in &report.groups {
        let id = g.group;
        t.count(&format!("Group {id} Flips"), g.flips);
        t.metric(&format!("Group {id} FR"), &g.flip_rate);
        t.count(&format!("Group {id} Harmful flips"), g.harmful_flips);
        t.metric(&format!("Group {id} HFP"), &g.hfp);
    }

    t.section(SECTION_TITLES[3]);
    t.metric("DFR", &report.directional.dfr);
    t.metric("Group 0 DFR", &report.directional.group_0_dfr);
    t.metric("Group 1 DFR", &report.directional.group_1_dfr);

    let rows = report.proportionality_metrics();
    t.section(SECTION_TITLES[4]);
    for (m, b) in &rows[..4] {
        t.metric(m.name(), b);
    }
    t.section(SECTION_TITLES[5]);
    for (m, b) in &rows[4..] {
        t.metric(m.name(), b);
    }

    if let Some(f) = &report.fairness {
        t.section("Fairness gates");
        if let Some(pre) = &f.pre {
            describe_fairness(&mut t, "predicted", pre);
        }
        if let Some(post) = &f.post {
            describe_fairness(&mut t, "corrected", post);
        }
    }

    let _ = writeln!(t.out, "\nVerdict: {}", report.verdict.as_str());
    let _ = writeln!(
        t.out,
        "Aliases: HFPD = HFRD, RFD = NFD, RHFD = NHFD. Group 0 is unprivileged (S = 0), group 1 privileged (S = 1)."
    );
    t.out
}

/// Pretty-printed JSON with a trailing newline. Field order is fixed by the
/// type definitions, so the output is byte-stable for a given report.
pub fn render_structured(report: &ProportionalityReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_structured(text: &str) -> Result<ProportionalityReport> {
    let report: ProportionalityReport =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("structured report: {e}")))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::Malformed(format!(
            "unsupported report schema version {}",
            report.schema_version
        )));
    }
    Ok(report)
}
