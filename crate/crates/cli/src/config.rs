use std::path::{Path, PathBuf};

use clap::Args;
use thermal_vitals::ingest::Fps;
use thermal_vitals::tracker::BorderMode;
use thermal_vitals::PipelineConfig;

use crate::error::{CliError, CliResult};

/// Flags shared by every pipeline command. Each one overrides the matching
/// config-file value.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file mirroring the pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Frame rate override, "15" or "30000/1001".
    #[arg(long, global = true)]
    pub fps: Option<Fps>,
    /// Evaluation segment seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Pixels outside the frame: "clamp" to the edge or "strict" error.
    #[arg(long, global = true, value_parser = parse_border)]
    pub border_mode: Option<BorderMode>,
    /// Peak prominence below which an estimate is flagged.
    #[arg(long, global = true)]
    pub prominence_threshold: Option<f64>,
    /// Zero-pad each window to a power of two at least this many times longer.
    #[arg(long, global = true)]
    pub padding_factor: Option<usize>,
    /// Seconds between successive estimate windows.
    #[arg(long, global = true)]
    pub hop: Option<f64>,
    /// Tracker PSR below which a frame is flagged.
    #[arg(long, global = true)]
    pub psr_threshold: Option<f64>,
}

fn parse_border(s: &str) -> Result<BorderMode, String> {
    match s {
        "clamp" => Ok(BorderMode::Clamp),
        "strict" => Ok(BorderMode::Strict),
        _ => Err(format!("expected clamp or strict, got {s:?}")),
    }
}

pub fn load_config(path: &Path) -> CliResult<PipelineConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

impl ConfigArgs {
    /// File values (or defaults) with flags applied on top.
    pub fn resolve(&self) -> CliResult<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => load_config(p)?,
            None => PipelineConfig::default(),
        };
        if self.fps.is_some() {
            c.fps = self.fps;
        }
        if let Some(s) = self.seed {
            c.segment_seed = s;
        }
        if let Some(b) = self.border_mode {
            c.border_mode = b;
        }
        if let Some(p) = self.prominence_threshold {
            c.estimator.prominence_threshold = p;
        }
        if let Some(p) = self.padding_factor {
            c.estimator.padding_factor = p;
        }
        if let Some(h) = self.hop {
            c.estimator.hop_s = h;
        }
        if let Some(t) = self.psr_threshold {
            c.kcf.psr_threshold = t;
        }
        c.validate(None)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "segment_seed = 4\n[estimator]\nhop_s = 2.0\n").unwrap();
        let args = ConfigArgs {
            config: Some(p),
            seed: Some(9),
            ..Default::default()
        };
        let c = args.resolve().unwrap();
        assert_eq!(c.segment_seed, 9);
        assert_eq!(c.estimator.hop_s, 2.0);
    }

    #[test]
    fn toml_roundtrip() {
        let c = PipelineConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<PipelineConfig>(&text).unwrap(), c);
    }
}
