use std::io::Write;
use std::ops::RangeInclusive;
use std::sync::Arc;

use realfft::{RealFftPlanner, RealToComplex};

use super::{FrequencyBand, TimeSeries};
use crate::error::{Error, Result};

/// Smallest power of two that is at least `factor * len`.
pub fn padded_length(len: usize, factor: usize) -> usize {
    (len * factor.max(1)).max(1).next_power_of_two()
}

/// Appends zeros up to `target` samples.
pub fn zero_pad(x: &TimeSeries, target: usize) -> Result<TimeSeries> {
    if target < x.len() {
        return Err(Error::Argument(format!(
            "cannot pad {} samples down to {target}",
            x.len()
        )));
    }
    let mut samples = Vec::with_capacity(target);
    samples.extend_from_slice(x.samples());
    samples.resize(target, 0.0);
    TimeSeries::new(samples, x.fs())
}

/// One-sided magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    fs: f64,
    len: usize,
}

impl Spectrum {
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Length of the transformed (padded) series.
    pub fn padded_len(&self) -> usize {
        self.len
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn bin_width(&self) -> f64 {
        self.fs / self.len as f64
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.fs / self.len as f64
    }

    /// Bins whose center frequency lies in `band`, or `None` when the grid is
    /// too coarse to place any bin there.
    pub fn band_bins(&self, band: FrequencyBand) -> Option<RangeInclusive<usize>> {
        let last = self.magnitudes.len() - 1;
        let mut lo = ((band.lo() / self.bin_width()).floor() as usize).min(last);
        while lo <= last && self.frequency(lo) < band.lo() {
            lo += 1;
        }
        while lo > 0 && self.frequency(lo - 1) >= band.lo() {
            lo -= 1;
        }
        let mut hi = ((band.hi() / self.bin_width()).ceil() as usize).min(last);
        while hi > 0 && self.frequency(hi) > band.hi() {
            hi -= 1;
        }
        (lo <= hi && lo <= last && self.frequency(hi) <= band.hi()).then_some(lo..=hi)
    }

    /// Writes `frequency_hz,magnitude` rows.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "frequency_hz,magnitude")?;
        for (k, m) in self.magnitudes.iter().enumerate() {
            writeln!(out, "{},{}", self.frequency(k), m)?;
        }
        Ok(())
    }
}

/// Reusable real-FFT plan for a fixed padded length.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    fft: Arc<dyn RealToComplex<f64>>,
    len: usize,
    fs: f64,
}

impl std::fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumAnalyzer")
            .field("len", &self.len)
            .field("fs", &self.fs)
            .finish()
    }
}

impl SpectrumAnalyzer {
    pub fn new(padded_len: usize, fs: f64) -> Result<Self> {
        if padded_len == 0 {
            return Err(Error::Argument("spectrum length must be nonzero".into()));
        }
        let fft = RealFftPlanner::<f64>::new().plan_fft_forward(padded_len);
        Ok(SpectrumAnalyzer {
            fft,
            len: padded_len,
            fs,
        })
    }

    pub fn padded_len(&self) -> usize {
        self.len
    }

    /// Zero-pads `samples` to the planned length and transforms.
    pub fn analyze(&self, samples: &[f64]) -> Result<Spectrum> {
        if samples.len() > self.len {
            return Err(Error::Argument(format!(
                "{} samples exceed the planned length {}",
                samples.len(),
                self.len
            )));
        }
        let mut input = self.fft.make_input_vec();
        input[..samples.len()].copy_from_slice(samples);
        let mut output = self.fft.make_output_vec();
        self.fft
            .process(&mut input, &mut output)
            .expect("buffers come from the plan");
        Ok(Spectrum {
            magnitudes: output.iter().map(|c| c.norm_sqr().sqrt()).collect(),
            fs: self.fs,
            len: self.len,
        })
    }
}

/// One-sided magnitude spectrum of an already padded series.
pub fn fft_magnitude(x: &TimeSeries) -> Result<Spectrum> {
    if x.is_empty() {
        return Err(Error::Argument("cannot transform an empty series".into()));
    }
    SpectrumAnalyzer::new(x.len(), x.fs())?.analyze(x.samples())
}

/// The in-band spectral maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub frequency_hz: f64,
    pub magnitude: f64,
    /// Peak magnitude over the mean in-band magnitude; 0 for a silent band.
    pub prominence: f64,
}

/// Largest in-band bin; ties go to the lower frequency.
pub fn dominant_frequency(spectrum: &Spectrum, band: FrequencyBand) -> Result<Peak> {
    let bins = spectrum.band_bins(band).ok_or(Error::BandResolution {
        lo: band.lo(),
        hi: band.hi(),
        bin_width: spectrum.bin_width(),
    })?;
    let mags = &spectrum.magnitudes()[bins.clone()];
    let mut best = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[best] {
            best = i;
        }
    }
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    let magnitude = mags[best];
    let bin = bins.start() + best;
    Ok(Peak {
        bin,
        frequency_hz: spectrum.frequency(bin),
        magnitude,
        prominence: if mean > 0.0 { magnitude / mean } else { 0.0 },
    })
}
