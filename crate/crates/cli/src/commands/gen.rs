use std::path::PathBuf;

use clap::Args;
use thermal_vitals::eval::GroundTruthSeries;
use thermal_vitals::ingest::{generate_synthetic, write_sequence, SyntheticSpec};

use super::{read_text, write_file};
use crate::config::ConfigArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Synthetic spec, JSON or TOML (chosen by extension).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the embedded rates as a ground-truth CSV sampled every second.
    #[arg(long)]
    pub truth_csv: Option<PathBuf>,
}

fn parse_spec(path: &std::path::Path, text: &str) -> CliResult<SyntheticSpec> {
    let toml_ext = path.extension().is_some_and(|e| e == "toml");
    let parsed = if toml_ext {
        toml::from_str(text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Usage(format!("invalid spec {}: {e}", path.display())))
}

pub fn run(args: &GenArgs, cfg: &ConfigArgs) -> CliResult<()> {
    let mut spec = parse_spec(&args.spec, &read_text(&args.spec)?)?;
    if let Some(fps) = cfg.fps {
        spec.fps = fps;
    }
    let seq = generate_synthetic(&spec)?;
    write_sequence(&seq, &args.out)?;

    let meta = seq.metadata().cloned().unwrap_or_default();
    let hr = meta.true_hr_hz.map(|f| f * 60.0);
    let rr = meta.true_rr_hz.map(|f| f * 60.0);
    println!(
        "wrote {}: {}x{}, {} frames at {} fps ({:.2} s)",
        args.out.display(),
        seq.width(),
        seq.height(),
        seq.len(),
        seq.fps(),
        seq.duration_s()
    );
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
    println!("true hr_bpm {} rr_rpm {}", fmt(hr), fmt(rr));

    if let Some(path) = &args.truth_csv {
        let truth = GroundTruthSeries::constant(seq.duration_s(), 1.0, hr, rr)?;
        let mut buf = Vec::new();
        truth.write_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(())
}
