use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use thermal_vitals::eval::{
    bland_altman_svg, build_report, EvaluationInput, EvaluationReport, GroundTruthSeries,
};
use thermal_vitals::PipelineConfig;

use super::estimate::EstimateDoc;
use super::{read_text, write_file, write_json};
use crate::config::ConfigArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Estimate JSON files from `estimate`.
    #[arg(required = true)]
    pub estimates: Vec<PathBuf>,
    /// Ground-truth CSV; give one for all estimates or one per estimate file.
    #[arg(long, required = true)]
    pub truth: Vec<PathBuf>,
    /// Report JSON; Bland-Altman CSV and SVG files are written next to it.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    config: &'a PipelineConfig,
    #[serde(flatten)]
    report: &'a EvaluationReport,
}

fn plot_path(out: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.{tag}.{ext}"))
}

pub fn run(args: &EvaluateArgs, cfg: &ConfigArgs) -> CliResult<()> {
    let config = cfg.resolve()?;
    if args.truth.len() != 1 && args.truth.len() != args.estimates.len() {
        return Err(CliError::Usage(format!(
            "{} truth files for {} estimate files; give one, or one per estimate file",
            args.truth.len(),
            args.estimates.len()
        )));
    }
    let truths = args
        .truth
        .iter()
        .map(GroundTruthSeries::read)
        .collect::<Result<Vec<_>, _>>()?;
    let docs = args
        .estimates
        .iter()
        .map(|p| {
            serde_json::from_str::<EstimateDoc>(&read_text(p)?)
                .map_err(|e| CliError::Data(format!("invalid estimate file {}: {e}", p.display())))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let inputs: Vec<EvaluationInput<'_>> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| EvaluationInput {
            series: &d.series,
            truth: &truths[if truths.len() == 1 { 0 } else { i }],
        })
        .collect();
    let report = build_report(&inputs, config.segment_seed)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    write_json(
        &args.out,
        &ReportDoc {
            config: &config,
            report: &report,
        },
    )?;
    for row in &report.rows {
        for m in &row.methods {
            let Some(ba) = &m.bland_altman else { continue };
            let tag = format!("{}_{}_m{}", row.vital.tag(), row.roi, m.method.number());
            let mut csv = Vec::new();
            ba.write_csv(&mut csv)?;
            write_file(&plot_path(&args.out, &tag, "csv"), &csv)?;
            let title = format!("{} {} method {}", row.vital, row.roi, m.method.number());
            write_file(
                &plot_path(&args.out, &tag, "svg"),
                bland_altman_svg(ba, &title).as_bytes(),
            )?;
        }
    }

    println!(
        "{:<6} {:<10} {:>10} {:>10} {:>10}",
        "vital", "roi", "recordings", "mape_m1", "mape_m2"
    );
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}%"));
    for row in &report.rows {
        println!(
            "{:<6} {:<10} {:>10} {:>10} {:>10}",
            row.vital.tag(),
            row.roi,
            row.recordings,
            pct(row.mape_method1),
            pct(row.mape_method2)
        );
    }
    Ok(())
}
