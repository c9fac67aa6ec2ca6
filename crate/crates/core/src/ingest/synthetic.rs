use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::frame::{Fps, FrameSequence, RegionTruth, SequenceMetadata, ThermalFrame};
use crate::error::{Error, Result};
use crate::estimator::VitalKind;
use crate::tracker::RoiBox;

/// Description of a synthetic thermal recording with known vital-sign
/// modulations. Deserializable from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub duration_s: f64,
    #[serde(default)]
    pub fps: Fps,
    pub width: u32,
    pub height: u32,
    /// Background level in sensor counts.
    pub background: f64,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    /// Standard deviation of i.i.d. Gaussian pixel noise, counts.
    #[serde(default)]
    pub noise_sigma: f64,
    /// Linear drift applied to the whole frame, counts per second.
    #[serde(default)]
    pub drift_per_s: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vital: Option<VitalKind>,
    /// Placement at t = 0.
    pub roi: RoiBox,
    pub frequency_hz: f64,
    /// Peak modulation amplitude, counts.
    pub amplitude: f64,
    /// Static offset of the region above the background, counts. Gives the
    /// tracker something to lock on to.
    #[serde(default)]
    pub contrast: f64,
    #[serde(default)]
    pub waveform: Waveform,
    /// Modulation phase in radians; drawn from the seeded RNG when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
    #[serde(default)]
    pub motion: Motion,
}

fn default_label() -> String {
    "region".into()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    #[default]
    Sinusoid,
}

/// Region trajectory relative to its t = 0 placement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    #[default]
    Static,
    /// Pixels per frame.
    ConstantVelocity { vx: f64, vy: f64 },
    /// `amplitude * sin(2π f t)` along each axis.
    Sway {
        amplitude_x: f64,
        amplitude_y: f64,
        frequency_hz: f64,
    },
}

impl Motion {
    /// Continuous displacement in pixels at `frame`.
    pub fn offset(&self, frame: usize, fps: Fps) -> (f64, f64) {
        match *self {
            Motion::Static => (0.0, 0.0),
            Motion::ConstantVelocity { vx, vy } => (vx * frame as f64, vy * frame as f64),
            Motion::Sway {
                amplitude_x,
                amplitude_y,
                frequency_hz,
            } => {
                let s = (TAU * frequency_hz * fps.time_of(frame)).sin();
                (amplitude_x * s, amplitude_y * s)
            }
        }
    }
}

impl fmt::Display for Motion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Motion::Static => write!(f, "static"),
            Motion::ConstantVelocity { vx, vy } => {
                write!(f, "constant_velocity(vx={vx}, vy={vy} px/frame)")
            }
            Motion::Sway {
                amplitude_x,
                amplitude_y,
                frequency_hz,
            } => write!(
                f,
                "sway(ax={amplitude_x}, ay={amplitude_y} px, {frequency_hz} Hz)"
            ),
        }
    }
}

impl RegionSpec {
    /// Top-left corner at `frame` after nearest-pixel placement.
    pub fn position_at(&self, frame: usize, fps: Fps) -> (i32, i32) {
        let (dx, dy) = self.motion.offset(frame, fps);
        (
            self.roi.x + dx.round() as i32,
            self.roi.y + dy.round() as i32,
        )
    }

    /// Exact (unrounded) box center at `frame`.
    pub fn center_at(&self, frame: usize, fps: Fps) -> (f64, f64) {
        let (dx, dy) = self.motion.offset(frame, fps);
        let (cx, cy) = self.roi.center();
        (cx + dx, cy + dy)
    }
}

impl SyntheticSpec {
    pub fn frame_count(&self) -> usize {
        self.fps.frames_in(self.duration_s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!("frame dims {}x{}", self.width, self.height));
        }
        if !(self.duration_s >= 0.0) || !self.duration_s.is_finite() {
            return bad(format!("duration {} s", self.duration_s));
        }
        if !(self.noise_sigma >= 0.0) {
            return bad(format!("noise sigma {}", self.noise_sigma));
        }
        let nyquist = self.fps.hz() / 2.0;
        let drift_total = self.drift_per_s * self.duration_s;
        for r in &self.regions {
            if !(r.frequency_hz >= 0.0) || r.frequency_hz >= nyquist {
                return bad(format!(
                    "region {:?}: modulation {} Hz violates Nyquist (must be below fps/2 = {nyquist} Hz)",
                    r.label, r.frequency_hz
                ));
            }
            if !(r.amplitude >= 0.0) {
                return bad(format!("region {:?}: amplitude {}", r.label, r.amplitude));
            }
            if r.roi.w == 0 || r.roi.h == 0 {
                return bad(format!("region {:?}: empty box", r.label));
            }
            let hi = self.background + r.contrast + r.amplitude + drift_total.max(0.0);
            let lo = self.background + r.contrast - r.amplitude + drift_total.min(0.0);
            if lo < 0.0 || hi > u16::MAX as f64 {
                return bad(format!(
                    "region {:?}: levels span [{lo}, {hi}], outside the 16-bit range",
                    r.label
                ));
            }
        }
        let lo = self.background + drift_total.min(0.0);
        let hi = self.background + drift_total.max(0.0);
        if lo < 0.0 || hi > u16::MAX as f64 {
            return bad(format!("background spans [{lo}, {hi}]"));
        }
        Ok(())
    }
}

/// Renders a synthetic sequence. A pure function of `spec`, seed included.
///
/// Pixel `(x, y, t)` inside region `r` is
/// `background + drift·t + contrast + amplitude·sin(2π f t + phase) + noise`,
/// rounded and clamped to `[0, 65535]`. Later regions overwrite earlier ones
/// where they overlap.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<FrameSequence> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let phases: Vec<f64> = spec
        .regions
        .iter()
        .map(|r| r.phase_rad.unwrap_or_else(|| rng.gen::<f64>() * TAU))
        .collect();
    let noise = (spec.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.noise_sigma).expect("sigma checked"));

    let (w, h) = (spec.width as usize, spec.height as usize);
    let n = spec.frame_count();
    let mut level = vec![0.0f64; w * h];
    let mut frames = Vec::with_capacity(n);
    for t in 0..n {
        let secs = spec.fps.time_of(t);
        level.fill(spec.background + spec.drift_per_s * secs);
        for (r, &phase) in spec.regions.iter().zip(&phases) {
            let value = spec.background
                + spec.drift_per_s * secs
                + r.contrast
                + r.amplitude * (TAU * r.frequency_hz * secs + phase).sin();
            let (x0, y0) = r.position_at(t, spec.fps);
            let span = |a: i32, len: u32, lim: usize| {
                a.clamp(0, lim as i32) as usize..(a + len as i32).clamp(0, lim as i32) as usize
            };
            let xs = span(x0, r.roi.w, w);
            let ys = span(y0, r.roi.h, h);
            for y in ys {
                level[y * w + xs.start..y * w + xs.end].fill(value);
            }
        }
        let data = level
            .iter()
            .map(|&v| {
                let v = match &noise {
                    Some(d) => v + d.sample(&mut rng),
                    None => v,
                };
                v.round().clamp(0.0, u16::MAX as f64) as u16
            })
            .collect();
        frames.push(ThermalFrame::new(spec.width, spec.height, t as u64, data)?);
    }

    let first_of = |kind| {
        spec.regions
            .iter()
            .find(|r| r.vital == Some(kind))
            .map(|r| r.frequency_hz)
    };
    let motion = (!spec.regions.is_empty()).then(|| {
        spec.regions
            .iter()
            .map(|r| format!("{}: {}", r.label, r.motion))
            .collect::<Vec<_>>()
            .join("; ")
    });
    let metadata = SequenceMetadata {
        true_hr_hz: first_of(VitalKind::HeartRate),
        true_rr_hz: first_of(VitalKind::RespirationRate),
        motion,
        regions: spec
            .regions
            .iter()
            .zip(&phases)
            .map(|(r, &phase_rad)| RegionTruth {
                label: r.label.clone(),
                vital: r.vital,
                roi: r.roi,
                frequency_hz: r.frequency_hz,
                phase_rad,
                motion: r.motion.to_string(),
            })
            .collect(),
    };
    Ok(
        FrameSequence::new(spec.width, spec.height, spec.fps, frames)?
            .with_metadata(Some(metadata)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: f64, amp: f64, sigma: f64) -> SyntheticSpec {
        SyntheticSpec {
            duration_s: 20.0,
            fps: Fps::DEFAULT,
            width: 16,
            height: 12,
            background: 1000.0,
            regions: vec![RegionSpec {
                label: "forehead".into(),
                vital: Some(VitalKind::HeartRate),
                roi: RoiBox::new(4, 2, 8, 8),
                frequency_hz: f,
                amplitude: amp,
                contrast: 0.0,
                waveform: Waveform::Sinusoid,
                phase_rad: None,
                motion: Motion::Static,
            }],
            noise_sigma: sigma,
            drift_per_s: 0.0,
            seed: 1,
        }
    }

    // Naive DFT magnitude at integer bin k.
    fn dft_mag(x: &[f64], k: usize) -> f64 {
        let n = x.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in x.iter().enumerate() {
            let a = TAU * k as f64 * t as f64 / n;
            re += v * a.cos();
            im -= v * a.sin();
        }
        re.hypot(im)
    }

    #[test]
    fn zero_amplitude_zero_noise_is_constant() {
        let s = generate_synthetic(&spec(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(s.len(), 300);
        assert!(s
            .frames()
            .iter()
            .all(|f| f.data().iter().all(|&v| v == 1000)));
    }

    #[test]
    fn region_mean_peaks_at_modulation_bin() {
        let sp = spec(2.0, 50.0, 0.0);
        let s = generate_synthetic(&sp).unwrap();
        let r = sp.regions[0].roi;
        let mean: Vec<f64> = s
            .frames()
            .iter()
            .map(|f| {
                let mut acc = 0.0;
                for y in r.y..r.y + r.h as i32 {
                    for x in r.x..r.x + r.w as i32 {
                        acc += f.get(x as u32, y as u32) as f64;
                    }
                }
                acc / (r.w * r.h) as f64
            })
            .collect();
        let m = mean.iter().sum::<f64>() / mean.len() as f64;
        let centered: Vec<f64> = mean.iter().map(|v| v - m).collect();
        let n = centered.len();
        let best = (1..n / 2)
            .max_by(|&a, &b| dft_mag(&centered, a).total_cmp(&dft_mag(&centered, b)))
            .unwrap();
        let bin_width = 15.0 / n as f64;
        assert!((best as f64 * bin_width - 2.0).abs() <= bin_width);
    }

    #[test]
    fn same_seed_is_bit_identical_and_seed_changes_noise() {
        let a = generate_synthetic(&spec(1.0, 10.0, 5.0)).unwrap();
        let b = generate_synthetic(&spec(1.0, 10.0, 5.0)).unwrap();
        assert_eq!(a, b);
        let mut sp = spec(1.0, 10.0, 5.0);
        sp.seed = 2;
        let c = generate_synthetic(&sp).unwrap();
        assert_ne!(a.frames(), c.frames());
    }

    #[test]
    fn nyquist_violation_is_spec_error() {
        let err = generate_synthetic(&spec(7.5, 1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Spec(ref m) if m.contains("Nyquist")));
    }

    #[test]
    fn out_of_range_levels_rejected() {
        let mut sp = spec(1.0, 2000.0, 0.0);
        assert!(generate_synthetic(&sp).is_err());
        sp.regions[0].amplitude = 10.0;
        sp.drift_per_s = 4000.0;
        assert!(generate_synthetic(&sp).is_err());
    }

    #[test]
    fn motion_translates_with_rounding() {
        let mut sp = spec(1.0, 0.0, 0.0);
        sp.regions[0].contrast = 100.0;
        sp.regions[0].motion = Motion::ConstantVelocity { vx: 0.5, vy: 0.0 };
        let s = generate_synthetic(&sp).unwrap();
        // frame 3: offset 1.5 rounds to 2
        let f = &s.frames()[3];
        assert_eq!(sp.regions[0].position_at(3, sp.fps), (6, 2));
        assert_eq!(f.get(5, 2), 1000);
        assert_eq!(f.get(6, 2), 1100);
        assert_eq!(f.get(13, 2), 1100);
        assert_eq!(f.get(14, 2), 1000);
    }

    #[test]
    fn metadata_records_truth() {
        let s = generate_synthetic(&spec(2.0, 5.0, 0.0)).unwrap();
        let m = s.metadata().unwrap();
        assert_eq!(m.true_hr_hz, Some(2.0));
        assert_eq!(m.true_rr_hz, None);
        assert_eq!(m.regions.len(), 1);
    }

    #[test]
    fn spec_parses_from_json() {
        let text = r#"{
            "duration_s": 2, "width": 4, "height": 4, "background": 10,
            "regions": [{"roi": {"x":0,"y":0,"w":2,"h":2}, "frequency_hz": 1,
                         "amplitude": 1, "motion": {"kind": "sway",
                         "amplitude_x": 1, "amplitude_y": 0, "frequency_hz": 0.2}}]
        }"#;
        let sp: SyntheticSpec = serde_json::from_str(text).unwrap();
        assert_eq!(sp.fps, Fps::DEFAULT);
        assert_eq!(sp.regions[0].label, "region");
        assert!(matches!(sp.regions[0].motion, Motion::Sway { .. }));
    }
}
