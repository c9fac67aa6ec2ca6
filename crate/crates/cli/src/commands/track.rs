use std::path::PathBuf;

use clap::Args;
use thermal_vitals::ingest::read_sequence;
use thermal_vitals::tracker::{track_sequence, RoiBox};

use super::write_file;
use crate::config::ConfigArgs;
use crate::error::CliResult;

#[derive(Debug, Args)]
pub struct TrackArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Initial box in frame 0 as x,y,w,h.
    #[arg(long)]
    pub roi: RoiBox,
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn run(args: &TrackArgs, cfg: &ConfigArgs) -> CliResult<()> {
    let config = cfg.resolve()?;
    let seq = read_sequence(&args.input)?;
    let track = track_sequence(&seq, args.roi, config.kcf)?;
    let mut buf = Vec::new();
    track.write_csv(&mut buf)?;
    write_file(&args.out, &buf)?;
    println!(
        "tracked {} frames; low-confidence fraction {:.4}",
        track.len(),
        track.low_confidence_fraction()
    );
    Ok(())
}
