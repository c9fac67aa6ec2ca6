use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use thermal_vitals::dsp::nyquist_check;
use thermal_vitals::estimator::stream_estimates;
use thermal_vitals::eval::EstimateSeries;
use thermal_vitals::ingest::{read_sequence, Fps, FrameSequence};
use thermal_vitals::tracker::{extract_pixel_series, RoiBox, Track};
use thermal_vitals::{Method, PipelineConfig, VitalKind};

use super::{source_name, write_json};
use crate::config::ConfigArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Track CSV from `track`.
    #[arg(long, required_unless_present = "roi")]
    pub track: Option<PathBuf>,
    /// Fixed box x,y,w,h, used when no track is given.
    #[arg(long, conflicts_with = "track")]
    pub roi: Option<RoiBox>,
    /// "hr" or "rr".
    #[arg(long)]
    pub vital: VitalKind,
    /// 1 (ROI mean) or 2 (pixel vote).
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// Window length in seconds; defaults to the vital's segment length.
    #[arg(long)]
    pub window: Option<f64>,
    /// ROI name in reports; defaults to the label of the synthetic region
    /// whose starting box matches, or "roi".
    #[arg(long)]
    pub roi_label: Option<String>,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<u8>()
        .map_err(|_| format!("expected 1 or 2, got {s:?}"))
        .and_then(|n| Method::from_number(n).map_err(|e| e.to_string()))
}

/// Output of `estimate`: the effective config plus one series of estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateDoc {
    pub config: PipelineConfig,
    pub fps: Fps,
    #[serde(flatten)]
    pub series: EstimateSeries,
}

fn default_label(seq: &FrameSequence, start: RoiBox) -> String {
    seq.metadata()
        .and_then(|m| m.regions.iter().find(|r| r.roi == start))
        .map_or_else(|| "roi".to_string(), |r| r.label.clone())
}

pub fn run(args: &EstimateArgs, cfg: &ConfigArgs) -> CliResult<()> {
    let config = cfg.resolve()?;
    let seq = read_sequence(&args.input)?;
    let fps = config.effective_fps(seq.fps());
    // reject an unusable band before touching the pixels
    nyquist_check(config.bands.band(args.vital), fps.hz()).into_result()?;

    let track = match (&args.track, args.roi) {
        (Some(path), _) => {
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
            Track::read_csv(file)?
        }
        (None, Some(roi)) => Track::stationary(roi, seq.len()),
        (None, None) => unreachable!("clap requires --track or --roi"),
    };
    if track.len() != seq.len() {
        return Err(CliError::Data(format!(
            "track has {} rows, sequence has {} frames",
            track.len(),
            seq.len()
        )));
    }
    let start = *track
        .boxes()
        .first()
        .ok_or_else(|| CliError::Data("empty sequence".into()))?;
    let pixels = extract_pixel_series(&seq, &track, config.border_mode)?;
    let window_s = args
        .window
        .unwrap_or_else(|| config.bands.segment_s(args.vital));
    let estimates = stream_estimates(
        &pixels,
        Some(&track),
        fps,
        args.vital,
        args.method,
        &config.bands,
        &config.estimator,
        Some(window_s),
    )?;
    let n = estimates.len();
    let doc = EstimateDoc {
        fps,
        series: EstimateSeries {
            source: source_name(&args.input),
            roi: args
                .roi_label
                .clone()
                .unwrap_or_else(|| default_label(&seq, start)),
            kind: args.vital,
            method: args.method,
            duration_s: fps.time_of(seq.len()),
            window_s,
            estimates,
        },
        config,
    };
    write_json(&args.out, &doc)?;
    let mean = doc
        .series
        .estimates
        .iter()
        .map(|e| e.rate_per_min)
        .sum::<f64>()
        / n.max(1) as f64;
    println!(
        "{n} {} estimates (method {}), mean {mean:.2} {}",
        args.vital,
        args.method.number(),
        args.vital.unit()
    );
    Ok(())
}
