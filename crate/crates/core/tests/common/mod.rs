#![allow(dead_code)]

use thermal_vitals::ingest::{Fps, Motion, RegionSpec, SyntheticSpec, Waveform};
use thermal_vitals::tracker::RoiBox;
use thermal_vitals::VitalKind;

pub fn region(
    label: &str,
    vital: Option<VitalKind>,
    roi: RoiBox,
    f: f64,
    amplitude: f64,
) -> RegionSpec {
    RegionSpec {
        label: label.into(),
        vital,
        roi,
        frequency_hz: f,
        amplitude,
        contrast: 150.0,
        waveform: Waveform::Sinusoid,
        phase_rad: None,
        motion: Motion::Static,
    }
}

pub fn scene(
    width: u32,
    height: u32,
    secs: f64,
    regions: Vec<RegionSpec>,
    sigma: f64,
    seed: u64,
) -> SyntheticSpec {
    SyntheticSpec {
        duration_s: secs,
        fps: Fps::DEFAULT,
        width,
        height,
        background: 1000.0,
        regions,
        noise_sigma: sigma,
        drift_per_s: 0.0,
        seed,
    }
}
