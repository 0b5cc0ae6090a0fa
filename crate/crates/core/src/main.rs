use std::io::{IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use flipaudit::fairness::evaluate_fairness;
use flipaudit::io::{InputFormat, DEFAULT_CORR_COL, DEFAULT_GROUP_COL, DEFAULT_PRED_COL};
use flipaudit::pipeline::Decision;
use flipaudit::report::FairnessSection;
use flipaudit::{
    build_report, generate_scenario, ingest, ingest_reader, parse_structured, render_chart, render_structured,
    render_text, run_audit_pipeline, write_csv, AuditFrame, ColumnMapping, Debiaser, FairInterval, PassThrough,
    PipelineConfig, ScenarioSpec, SpEqualizer, ThresholdConfig, Verdict,
};

#[derive(Parser)]
#[command(
    name = "flipaudit",
    version,
    about = "Audit label flips made by post-processing debiasing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the flip proportionality report for predicted and corrected labels.
    Audit(AuditArgs),
    /// Render a structured report as an SVG chart.
    Plot(PlotArgs),
    /// Generate a synthetic CSV from a scenario.
    Synth(SynthArgs),
    /// Flip the fewest predictions needed to bring the parity gap within epsilon.
    Debias(DebiasArgs),
    /// Fairness gate, debias, fairness gate, proportionality report.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Data file (CSV with header, or a JSON record array for `.json`); `-` or absent reads CSV from stdin.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Built-in scenario name (`paper-example`) or scenario file, used instead of --input.
    #[arg(long, conflicts_with = "input")]
    scenario: Option<String>,
    #[arg(long, default_value = DEFAULT_PRED_COL)]
    pred_col: String,
    /// Corrected-label column [default: y_corrected where required].
    #[arg(long)]
    corr_col: Option<String>,
    #[arg(long, default_value = DEFAULT_GROUP_COL)]
    group_col: String,
    /// Ground-truth column; enables the equalized odds gate.
    #[arg(long)]
    true_col: Option<String>,
    /// Raw value meaning the favorable outcome.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    favorable: u8,
    /// Raw value meaning privileged group membership.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    privileged: u8,
}

#[derive(Args)]
struct ReportArgs {
    /// Threshold overrides (TOML, one inline table per metric).
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// Structured report; stdin when absent.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// SVG output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in scenario name (`paper-example`) or scenario file.
    #[arg(long)]
    scenario: String,
    /// Override the scenario's shuffle seed.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DebiasArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Largest allowed |SP difference| after correction.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper bound on the number of flips.
    #[arg(long)]
    max_flips: Option<usize>,
    /// CSV output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DebiaserKind {
    /// Built-in statistical parity equalizer.
    Sp,
    /// Use the corrected-label column as the debiaser's output.
    Passthrough,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    report: ReportArgs,
    #[arg(long, value_enum, default_value_t = DebiaserKind::Sp)]
    debiaser: DebiaserKind,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_flips: Option<usize>,
    /// Fail when no true labels are available for the equalized odds gate.
    #[arg(long)]
    require_eo: bool,
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Proportionate => 0,
        Verdict::ReviewRequired => 2,
        Verdict::Disproportionate => 3,
    }
}

fn decision_code(d: Decision, verdict: Option<Verdict>) -> u8 {
    match (d, verdict) {
        (Decision::NoDebiasNeeded | Decision::FairAndProportionate, _) => 0,
        (Decision::StillUnfair, _) => 3,
        (Decision::FairButDisproportionate, Some(v)) => verdict_code(v),
        (Decision::FairButDisproportionate, None) => 3,
    }
}

fn write_output(path: Option<&Path>, content: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, content).map_err(|source| {
            flipaudit::Error::Write {
                path: p.to_path_buf(),
                source,
            }
            .into()
        }),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(content)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_frame(args: &InputArgs, corrected_default: bool) -> anyhow::Result<AuditFrame> {
    if let Some(s) = &args.scenario {
        return Ok(generate_scenario(&ScenarioSpec::resolve(s)?)?);
    }
    let corrected = args
        .corr_col
        .clone()
        .or_else(|| corrected_default.then(|| DEFAULT_CORR_COL.to_string()));
    let mapping = ColumnMapping {
        predicted: args.pred_col.clone(),
        corrected,
        group: args.group_col.clone(),
        y_true: args.true_col.clone(),
        favorable: args.favorable,
        privileged: args.privileged,
    };
    let (frame, source) = match &args.input {
        Some(p) if p != Path::new("-") => (ingest(p, &mapping)?, p.display().to_string()),
        _ => {
            let stdin = std::io::stdin();
            if stdin.is_terminal() {
                bail!("no --input given and stdin is a terminal");
            }
            (
                ingest_reader(stdin.lock(), InputFormat::Csv, &mapping)?,
                "stdin".to_string(),
            )
        }
    };
    eprintln!("read {} rows from {source}", frame.len());
    Ok(frame)
}

fn load_thresholds(path: Option<&Path>) -> anyhow::Result<ThresholdConfig> {
    Ok(match path {
        Some(p) => ThresholdConfig::load(p)?,
        None => ThresholdConfig::default(),
    })
}

fn audit(args: AuditArgs) -> anyhow::Result<u8> {
    let frame = load_frame(&args.input, true)?;
    let thresholds = load_thresholds(args.report.thresholds.as_deref())?;
    let interval = FairInterval::default();
    let fairness = FairnessSection {
        pre: Some(evaluate_fairness(
            frame.y_predicted(),
            frame.group(),
            frame.y_true(),
            interval,
        )?),
        post: Some(evaluate_fairness(
            frame.y_corrected(),
            frame.group(),
            frame.y_true(),
            interval,
        )?),
    };
    let report = build_report(&frame, &thresholds, Some(fairness))?;
    let text = match args.report.format {
        Format::Text => render_text(&report),
        Format::Structured => render_structured(&report),
    };
    write_output(args.report.output.as_deref(), text.as_bytes())?;
    Ok(verdict_code(report.verdict))
}

fn plot(args: PlotArgs) -> anyhow::Result<u8> {
    let text = match &args.input {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p).map_err(|source| flipaudit::Error::Read {
            path: p.clone(),
            source,
        })?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .context("reading report from stdin")?;
            s
        }
    };
    let report = parse_structured(&text)?;
    write_output(args.output.as_deref(), render_chart(&report).as_bytes())?;
    Ok(0)
}

fn synth(args: SynthArgs) -> anyhow::Result<u8> {
    let mut spec = ScenarioSpec::resolve(&args.scenario)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let frame = generate_scenario(&spec)?;
    let mut buf = Vec::new();
    write_csv(&frame, &mut buf)?;
    write_output(args.output.as_deref(), &buf)?;
    Ok(0)
}

fn equalizer(epsilon: f64, seed: u64, max_flips: Option<usize>) -> SpEqualizer {
    let d = SpEqualizer::new(epsilon, seed);
    match max_flips {
        Some(b) => d.with_budget(b),
        None => d,
    }
}

fn debias(args: DebiasArgs) -> anyhow::Result<u8> {
    let frame = load_frame(&args.input, false)?;
    let labels = equalizer(args.epsilon, args.seed, args.max_flips).debias(&frame)?;
    let corrected = frame.with_corrected(labels)?;
    let flips = corrected
        .y_predicted()
        .iter()
        .zip(corrected.y_corrected())
        .filter(|(p, c)| p != c)
        .count();
    let interval = FairInterval::default();
    let before = evaluate_fairness(frame.y_predicted(), frame.group(), None, interval)?;
    let after = evaluate_fairness(corrected.y_corrected(), frame.group(), None, interval)?;
    eprintln!(
        "flipped {flips} labels; SP difference {:.4} -> {:.4}",
        before.sp_difference, after.sp_difference
    );
    let mut buf = Vec::new();
    write_csv(&corrected, &mut buf)?;
    write_output(args.output.as_deref(), &buf)?;
    Ok(0)
}

fn pipeline(args: PipelineArgs) -> anyhow::Result<u8> {
    let passthrough = matches!(args.debiaser, DebiaserKind::Passthrough);
    let frame = load_frame(&args.input, passthrough)?;
    let config = PipelineConfig {
        thresholds: load_thresholds(args.report.thresholds.as_deref())?,
        fair_interval: FairInterval::default(),
        require_eo: args.require_eo,
    };
    let eq = equalizer(args.epsilon, args.seed, args.max_flips);
    let debiaser: &dyn Debiaser = if passthrough { &PassThrough } else { &eq };
    let outcome = run_audit_pipeline(&frame, debiaser, &config)?;
    let verdict = outcome.report.as_ref().map(|r| r.verdict);

    let text = match args.report.format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&json!({
                "decision": outcome.decision,
                "pre_fairness": outcome.pre_fairness,
                "post_fairness": outcome.post_fairness,
                "flips": outcome.flip_count(),
                "report": outcome.report,
            }))?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("Decision: {:?}\n", outcome.decision);
            match &outcome.report {
                Some(r) => s.push_str(&render_text(r)),
                None => s.push_str(&format!(
                    "Predictions already pass the fairness gate (SP difference {:.3}); nothing was debiased.\n",
                    outcome.pre_fairness.sp_difference
                )),
            }
            s
        }
    };
    write_output(args.report.output.as_deref(), text.as_bytes())?;
    Ok(decision_code(outcome.decision, verdict))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Audit(a) => audit(a),
        Command::Plot(a) => plot(a),
        Command::Synth(a) => synth(a),
        Command::Debias(a) => debias(a),
        Command::Pipeline(a) => pipeline(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            match e.downcast_ref::<flipaudit::Error>() {
                Some(fe) => eprintln!("error[{}]: {e:#}", fe.code()),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}
