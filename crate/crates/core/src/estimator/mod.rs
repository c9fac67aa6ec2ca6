//! ROI-mean (Method 1) and per-pixel vote (Method 2) rate estimation over
//! buffered windows.

mod buffer;
mod methods;
mod stream;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::FrequencyBand;
use crate::error::{Error, Result};

pub use buffer::{BufferState, SignalBuffer};
pub use methods::{estimate_method1, estimate_method2, Estimator, VoteTally};
pub use stream::{stream_estimates, WindowPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VitalKind {
    #[serde(rename = "hr")]
    HeartRate,
    #[serde(rename = "rr")]
    RespirationRate,
}

impl VitalKind {
    pub fn unit(self) -> &'static str {
        match self {
            VitalKind::HeartRate => "BPM",
            VitalKind::RespirationRate => "RPM",
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            VitalKind::HeartRate => "hr",
            VitalKind::RespirationRate => "rr",
        }
    }
}

impl fmt::Display for VitalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VitalKind::HeartRate => "heart rate",
            VitalKind::RespirationRate => "respiration rate",
        })
    }
}

impl FromStr for VitalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hr" | "heart" | "heart_rate" => Ok(VitalKind::HeartRate),
            "rr" | "resp" | "respiration" | "respiration_rate" => Ok(VitalKind::RespirationRate),
            _ => Err(Error::Argument(format!("unknown vital sign {s:?}"))),
        }
    }
}

/// Serialized as the integers 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Dominant frequency of the ROI-mean series.
    RoiMean,
    /// Most frequent per-pixel dominant bin.
    PixelVote,
}

impl Method {
    pub fn number(self) -> u8 {
        match self {
            Method::RoiMean => 1,
            Method::PixelVote => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Method::RoiMean),
            2 => Ok(Method::PixelVote),
            _ => Err(Error::Argument(format!("method must be 1 or 2, got {n}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Method::from_number(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Per-minute rate from a frequency in Hz.
pub fn hz_to_rate(f: f64) -> f64 {
    60.0 * f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateWarning {
    /// The tracker flagged at least one frame inside the window.
    LowTrackingConfidence,
    /// Spectral peak prominence below the configured threshold.
    LowProminence,
    /// The ROI left the frame in at least one window frame.
    BorderClamped,
    /// Constant pixels left out of the vote.
    ZeroVariancePixels(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalEstimate {
    pub kind: VitalKind,
    pub method: Method,
    pub frequency_hz: f64,
    pub rate_per_min: f64,
    /// Peak prominence for Method 1, winning vote fraction for Method 2.
    pub confidence: f64,
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    pub window_start_s: f64,
    pub warnings: Vec<EstimateWarning>,
}

impl VitalEstimate {
    pub(crate) fn new(
        kind: VitalKind,
        method: Method,
        frequency_hz: f64,
        confidence: f64,
        band: FrequencyBand,
    ) -> Self {
        VitalEstimate {
            kind,
            method,
            frequency_hz,
            rate_per_min: hz_to_rate(frequency_hz),
            confidence,
            band_lo_hz: band.lo(),
            band_hi_hz: band.hi(),
            window_start_s: 0.0,
            warnings: Vec::new(),
        }
    }

    pub fn band(&self) -> FrequencyBand {
        FrequencyBand::new(self.band_lo_hz, self.band_hi_hz).expect("built from a valid band")
    }

    pub fn has_warning(&self, w: EstimateWarning) -> bool {
        self.warnings.contains(&w)
    }
}

/// Physiological bands and evaluation segment lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandConfig {
    pub hr_band: FrequencyBand,
    pub rr_band: FrequencyBand,
    pub hr_segment_s: f64,
    pub rr_segment_s: f64,
}

impl Default for BandConfig {
    fn default() -> Self {
        BandConfig {
            hr_band: FrequencyBand::HEART_RATE,
            rr_band: FrequencyBand::RESPIRATION,
            hr_segment_s: 20.0,
            rr_segment_s: 30.0,
        }
    }
}

impl BandConfig {
    pub fn band(&self, kind: VitalKind) -> FrequencyBand {
        match kind {
            VitalKind::HeartRate => self.hr_band,
            VitalKind::RespirationRate => self.rr_band,
        }
    }

    pub fn segment_s(&self, kind: VitalKind) -> f64 {
        match kind {
            VitalKind::HeartRate => self.hr_segment_s,
            VitalKind::RespirationRate => self.rr_segment_s,
        }
    }

    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        for kind in [VitalKind::HeartRate, VitalKind::RespirationRate] {
            if !(self.segment_s(kind) > 0.0) {
                return Err(Error::Argument(format!("{kind} segment must be positive")));
            }
            if let Some(fs) = fs {
                crate::dsp::nyquist_check(self.band(kind), fs).into_result()?;
            }
        }
        Ok(())
    }
}

/// Spectral pipeline settings shared by both methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub filter_family: String,
    pub filter_order: usize,
    /// Windows are zero-padded to the next power of two at or above
    /// `padding_factor` times their length.
    pub padding_factor: usize,
    pub prominence_threshold: f64,
    /// Stride between successive streaming windows, seconds.
    pub hop_s: f64,
}

pub const BUTTERWORTH: &str = "butterworth";

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            filter_family: BUTTERWORTH.into(),
            filter_order: crate::dsp::DEFAULT_ORDER,
            padding_factor: 8,
            prominence_threshold: 3.0,
            hop_s: 1.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_family != BUTTERWORTH {
            return Err(Error::Argument(format!(
                "unsupported filter family {:?}",
                self.filter_family
            )));
        }
        if self.filter_order == 0 || self.padding_factor == 0 {
            return Err(Error::Argument(
                "filter order and padding factor must be >= 1".into(),
            ));
        }
        if !(self.hop_s > 0.0) {
            return Err(Error::Argument("hop must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_conversion() {
        assert!((hz_to_rate(2.67) - 160.2).abs() < 1e-9);
        assert_eq!(hz_to_rate(2.67).round(), 160.0);
        assert_eq!(hz_to_rate(0.0), 0.0);
        assert!((hz_to_rate(0.4) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn method_serializes_as_number() {
        assert_eq!(serde_json::to_string(&Method::PixelVote).unwrap(), "2");
        assert_eq!(
            serde_json::from_str::<Method>("1").unwrap(),
            Method::RoiMean
        );
        assert!(serde_json::from_str::<Method>("3").is_err());
    }

    #[test]
    fn kind_tags() {
        assert_eq!(
            serde_json::to_string(&VitalKind::HeartRate).unwrap(),
            "\"hr\""
        );
        assert_eq!(
            "rr".parse::<VitalKind>().unwrap(),
            VitalKind::RespirationRate
        );
        assert!("bp".parse::<VitalKind>().is_err());
    }

    #[test]
    fn estimate_json_fields() {
        let mut e = VitalEstimate::new(
            VitalKind::RespirationRate,
            Method::RoiMean,
            0.4,
            5.0,
            FrequencyBand::RESPIRATION,
        );
        e.warnings.push(EstimateWarning::ZeroVariancePixels(3));
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        for key in [
            "kind",
            "method",
            "frequency_hz",
            "rate_per_min",
            "confidence",
            "band_lo_hz",
            "band_hi_hz",
            "window_start_s",
            "warnings",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["warnings"][0]["zero_variance_pixels"], 3);
        let back: VitalEstimate = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn band_config_rejects_bad_band_in_serde() {
        let r: std::result::Result<BandConfig, _> =
            serde_json::from_str(r#"{"hr_band": {"lo": 3.0, "hi": 2.0}}"#);
        assert!(r.is_err());
    }
}
