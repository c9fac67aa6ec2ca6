use super::{
    BandConfig, EstimateWarning, Estimator, EstimatorConfig, Method, VitalEstimate, VitalKind,
};
use crate::error::{Error, Result};
use crate::ingest::Fps;
use crate::tracker::{PixelSeries, Track};

/// Window and hop lengths in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPlan {
    pub window: usize,
    pub hop: usize,
}

impl WindowPlan {
    pub fn new(window_s: f64, hop_s: f64, fps: Fps) -> Result<Self> {
        let window = fps.frames_in(window_s);
        let hop = fps.frames_in(hop_s).max(1);
        if window == 0 {
            return Err(Error::Argument(format!(
                "window of {window_s} s holds no frames at {fps} fps"
            )));
        }
        Ok(WindowPlan { window, hop })
    }

    /// Start indices of every full window in a series of `len` samples.
    pub fn starts(&self, len: usize) -> impl Iterator<Item = usize> {
        let last = len.checked_sub(self.window);
        let hop = self.hop;
        (0..)
            .map(move |i| i * hop)
            .take_while(move |&s| last.is_some_and(|l| s <= l))
    }
}

/// Slides a window over extracted pixel series and estimates once per hop.
///
/// The window defaults to the evaluation segment length of `kind`.
#[allow(clippy::too_many_arguments)]
pub fn stream_estimates(
    pixels: &PixelSeries,
    track: Option<&Track>,
    fps: Fps,
    kind: VitalKind,
    method: Method,
    bands: &BandConfig,
    config: &EstimatorConfig,
    window_s: Option<f64>,
) -> Result<Vec<VitalEstimate>> {
    let window_s = window_s.unwrap_or_else(|| bands.segment_s(kind));
    let plan = WindowPlan::new(window_s, config.hop_s, fps)?;
    if pixels.len() < plan.window {
        return Err(Error::Length {
            required: plan.window,
            actual: pixels.len(),
        });
    }
    let estimator = Estimator::new(kind, bands.band(kind), fps.hz(), plan.window, config)?;
    let clamped = pixels.clamped_frames();
    let mut out = Vec::new();
    for start in plan.starts(pixels.len()) {
        let end = start + plan.window;
        let mut est = match method {
            Method::RoiMean => estimator.method1(&pixels.mean()[start..end])?,
            Method::PixelVote => {
                let cells: Vec<&[f64]> = pixels.iter_cells().map(|c| &c[start..end]).collect();
                estimator.method2(&cells)?
            }
        };
        est.window_start_s = fps.time_of(start);
        if track.is_some_and(|t| t.has_low_confidence_in(start..end)) {
            est.warnings.push(EstimateWarning::LowTrackingConfidence);
        }
        if clamped.iter().any(|f| (start..end).contains(f)) {
            est.warnings.push(EstimateWarning::BorderClamped);
        }
        out.push(est);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_starts() {
        let p = WindowPlan::new(20.0, 1.0, Fps::DEFAULT).unwrap();
        assert_eq!(p.window, 300);
        assert_eq!(p.hop, 15);
        let s: Vec<_> = p.starts(900).collect();
        assert_eq!(s.len(), 41);
        assert_eq!(*s.last().unwrap(), 600);
        assert_eq!(p.starts(299).count(), 0);
        assert_eq!(p.starts(300).count(), 1);
    }
}
