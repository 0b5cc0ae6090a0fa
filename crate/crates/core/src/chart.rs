//! SVG rendering of a report as three stacked horizontal-bar panels.
//!
//! Panel 1 shows overall FR and HFP as percentages, panel 2 the same per
//! group, panel 3 the eight proportionality metrics on their own scale. Bars
//! are filled by band. Infinite values are drawn at a per-panel cap and
//! labelled with "∞".

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::report::{BandedMetric, ProportionalityReport};

const WIDTH: f64 = 720.0;
const LABEL_WIDTH: f64 = 150.0;
const BAR_AREA: f64 = 470.0;
const BAR_HEIGHT: f64 = 18.0;
const ROW_GAP: f64 = 8.0;
const PANEL_TITLE: f64 = 28.0;
const PANEL_GAP: f64 = 24.0;
const MARGIN: f64 = 16.0;
/// Lower bound on the infinity cap.
pub const MIN_INF_CAP: f64 = 3.0;
/// Infinity cap as a multiple of the panel's largest finite value.
pub const INF_CAP_FACTOR: f64 = 5.0;

pub const PANEL_TITLES: [&str; 3] = [
    "Overall flips (%)",
    "Flips by group (%)",
    "Group-based flip proportionality",
];

struct Bar {
    label: String,
    metric: BandedMetric,
    /// 100 for percentage panels, 1 otherwise.
    scale: f64,
}

/// Display length for an infinite bar in a panel whose largest finite value
/// is `max_finite`.
pub fn infinity_cap(max_finite: f64) -> f64 {
    (INF_CAP_FACTOR * max_finite).max(MIN_INF_CAP)
}

fn panels(report: &ProportionalityReport) -> [Vec<Bar>; 3] {
    let pct = |label: &str, metric: BandedMetric| Bar {
        label: label.to_string(),
        metric,
        scale: 100.0,
    };
    let overall = vec![pct("FR", report.overall.flip_rate), pct("HFP", report.overall.hfp)];
    let groups = report
        .groups
        .iter()
        .flat_map(|g| {
            [
                pct(&format!("Group {} FR", g.group), g.flip_rate),
                pct(&format!("Group {} HFP", g.group), g.hfp),
            ]
        })
        .collect();
    let proportionality = report
        .proportionality_metrics()
        .into_iter()
        .map(|(m, metric)| Bar {
            label: m.name().to_string(),
            metric,
            scale: 1.0,
        })
        .collect();
    [overall, groups, proportionality]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel_height(rows: usize) -> f64 {
    PANEL_TITLE + rows as f64 * (BAR_HEIGHT + ROW_GAP)
}

fn render_panel(out: &mut String, index: usize, bars: &[Bar], top: f64) {
    let max_finite = bars
        .iter()
        .filter_map(|b| b.metric.value.value().map(|v| v * b.scale))
        .fold(0.0_f64, f64::max);
    let cap = infinity_cap(max_finite);
    let axis_max = if bars.iter().any(|b| b.metric.value.is_infinite()) {
        cap
    } else if max_finite > 0.0 {
        max_finite
    } else {
        1.0
    };

    let _ = writeln!(
        out,
        r#"  <g class="panel" id="panel-{}" transform="translate({MARGIN},{top})">"#,
        index + 1
    );
    let _ = writeln!(
        out,
        r#"    <text class="panel-title" x="0" y="18" font-weight="bold">{}</text>"#,
        escape(PANEL_TITLES[index])
    );
    for (row, bar) in bars.iter().enumerate() {
        let y = PANEL_TITLE + row as f64 * (BAR_HEIGHT + ROW_GAP);
        let v = &bar.metric.value;
        let (length, text) = match v.value() {
            Some(x) if bar.scale == 100.0 => (x * 100.0, format!("{:.1}%", x * 100.0)),
            Some(x) => (x, v.display()),
            None => (cap, "∞".to_string()),
        };
        let w = (length / axis_max * BAR_AREA).clamp(0.0, BAR_AREA);
        let band = bar.metric.band;
        let _ = writeln!(
            out,
            r#"    <g class="bar" data-metric="{label}" data-band="{band}" data-infinite="{inf}">"#,
            label = escape(&bar.label),
            band = band.as_str(),
            inf = v.is_infinite(),
        );
        let _ = writeln!(
            out,
            r#"      <text x="{x:.1}" y="{ty:.1}" text-anchor="end">{label}</text>"#,
            x = LABEL_WIDTH - 8.0,
            ty = y + BAR_HEIGHT * 0.75,
            label = escape(&bar.label),
        );
        let _ = writeln!(
            out,
            r#"      <rect x="{LABEL_WIDTH:.1}" y="{y:.1}" width="{w:.2}" height="{BAR_HEIGHT:.1}" fill="{fill}"/>"#,
            fill = band.fill(),
        );
        let _ = writeln!(
            out,
            r#"      <text class="value" x="{x:.1}" y="{ty:.1}">{text}</text>"#,
            x = LABEL_WIDTH + w + 6.0,
            ty = y + BAR_HEIGHT * 0.75,
            text = escape(&text),
        );
        let _ = writeln!(out, "    </g>");
    }
    let _ = writeln!(out, "  </g>");
}

/// The full SVG document. Output depends only on the report.
pub fn render_chart(report: &ProportionalityReport) -> String {
    let panels = panels(report);
    let height = MARGIN * 2.0
        + panels.iter().map(|p| panel_height(p.len())).sum::<f64>()
        + PANEL_GAP * (panels.len() - 1) as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let mut top = MARGIN;
    for (i, bars) in panels.iter().enumerate() {
        render_panel(&mut out, i, bars, top);
        top += panel_height(bars.len()) + PANEL_GAP;
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit_chart(report: &ProportionalityReport, out_path: &Path) -> Result<()> {
    std::fs::write(out_path, render_chart(report)).map_err(|source| Error::Write {
        path: out_path.to_path_buf(),
        source,
    })
}
