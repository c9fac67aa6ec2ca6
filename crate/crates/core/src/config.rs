//! Effective pipeline settings, as read from a config file and echoed into
//! every output.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimator::{BandConfig, EstimatorConfig};
use crate::ingest::Fps;
use crate::tracker::{BorderMode, KcfParams};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Overrides the frame rate stored in the sequence header.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fps: Option<Fps>,
    pub bands: BandConfig,
    pub estimator: EstimatorConfig,
    pub kcf: KcfParams,
    pub border_mode: BorderMode,
    pub segment_seed: u64,
}

impl PipelineConfig {
    /// Frame rate to use for a sequence recorded at `recorded`.
    pub fn effective_fps(&self, recorded: Fps) -> Fps {
        self.fps.unwrap_or(recorded)
    }

    /// Checks every embedded section. With `fs`, both bands are also held to
    /// the Nyquist limit.
    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        self.bands.validate(fs)?;
        self.estimator.validate()?;
        self.kcf.validate()
    }
}
