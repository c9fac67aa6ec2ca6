//! Band-pass filtering, zero padding, spectra and in-band peak picking.

mod filter;
mod spectrum;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use filter::{bandpass, ButterworthBandpass, DEFAULT_ORDER};
pub use spectrum::{
    dominant_frequency, fft_magnitude, padded_length, zero_pad, Peak, Spectrum, SpectrumAnalyzer,
};

/// Uniformly sampled real series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    fs: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(Error::Argument(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        Ok(TimeSeries { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Closed frequency interval `[lo, hi]` in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBand")]
pub struct FrequencyBand {
    lo: f64,
    hi: f64,
}

impl FrequencyBand {
    /// Heart-rate band: 100 to 160 beats per minute.
    pub const HEART_RATE: FrequencyBand = FrequencyBand { lo: 1.67, hi: 2.67 };
    /// Respiration band: 10 to 40 breaths per minute.
    pub const RESPIRATION: FrequencyBand = FrequencyBand { lo: 0.17, hi: 0.67 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Band(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
        }
        Ok(FrequencyBand { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f <= self.hi
    }
}

#[derive(Deserialize)]
struct RawBand {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawBand> for FrequencyBand {
    type Error = Error;

    fn try_from(raw: RawBand) -> Result<Self> {
        FrequencyBand::new(raw.lo, raw.hi)
    }
}

impl fmt::Display for FrequencyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] Hz", self.lo, self.hi)
    }
}

/// Outcome of [`nyquist_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nyquist {
    Ok { margin_hz: f64 },
    Violation { required_hz: f64, fs: f64 },
}

impl Nyquist {
    pub fn is_ok(&self) -> bool {
        matches!(self, Nyquist::Ok { .. })
    }

    /// Converts a violation into [`Error::Band`].
    pub fn into_result(self) -> Result<f64> {
        match self {
            Nyquist::Ok { margin_hz } => Ok(margin_hz),
            Nyquist::Violation { required_hz, fs } => Err(Error::Band(format!(
                "sampling rate {fs} Hz is below the Nyquist rate {required_hz} Hz for this band"
            ))),
        }
    }
}

/// The band is resolvable iff `fs >= 2 * band.hi`.
pub fn nyquist_check(band: FrequencyBand, fs: f64) -> Nyquist {
    let required_hz = 2.0 * band.hi;
    if fs >= required_hz {
        Nyquist::Ok {
            margin_hz: fs - required_hz,
        }
    } else {
        Nyquist::Violation { required_hz, fs }
    }
}

/// Subtracts the sample mean in place.
pub fn remove_mean(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}
