use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{EstimateWarning, EstimatorConfig, Method, SignalBuffer, VitalEstimate, VitalKind};
use crate::dsp::{
    dominant_frequency, padded_length, remove_mean, ButterworthBandpass, FrequencyBand, Peak,
    SpectrumAnalyzer, TimeSeries,
};
use crate::error::{Error, Result};

/// Vote counts per padded-FFT bin from [`Estimator::vote`].
#[derive(Debug, Clone, PartialEq)]
pub struct VoteTally {
    /// bin -> (votes, summed peak magnitude of the voters)
    pub bins: BTreeMap<usize, (usize, f64)>,
    /// Constant pixels that did not vote.
    pub excluded: usize,
    pub bin_width: f64,
}

impl VoteTally {
    pub fn voters(&self) -> usize {
        self.bins.values().map(|(n, _)| n).sum()
    }

    /// Most votes, then larger summed magnitude, then lower bin.
    pub fn winner(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (&bin, &(n, mag)) in &self.bins {
            let better = match best {
                None => true,
                Some((_, bn, bm)) => n > bn || (n == bn && mag > bm),
            };
            if better {
                best = Some((bin, n, mag));
            }
        }
        best.map(|(bin, n, _)| (bin, n))
    }
}

/// Band-specific spectral pipeline for a fixed window length:
/// mean removal, zero-phase band-pass, zero padding, FFT, in-band peak.
#[derive(Debug, Clone)]
pub struct Estimator {
    kind: VitalKind,
    band: FrequencyBand,
    window: usize,
    filter: ButterworthBandpass,
    analyzer: SpectrumAnalyzer,
    prominence_threshold: f64,
}

impl Estimator {
    pub fn new(
        kind: VitalKind,
        band: FrequencyBand,
        fs: f64,
        window: usize,
        config: &EstimatorConfig,
    ) -> Result<Self> {
        config.validate()?;
        let filter = ButterworthBandpass::design(band, fs, config.filter_order)?;
        if window < filter.min_len() {
            return Err(Error::Length {
                required: filter.min_len(),
                actual: window,
            });
        }
        let analyzer = SpectrumAnalyzer::new(padded_length(window, config.padding_factor), fs)?;
        Ok(Estimator {
            kind,
            band,
            window,
            filter,
            analyzer,
            prominence_threshold: config.prominence_threshold,
        })
    }

    pub fn kind(&self) -> VitalKind {
        self.kind
    }

    pub fn band(&self) -> FrequencyBand {
        self.band
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn padded_len(&self) -> usize {
        self.analyzer.padded_len()
    }

    pub fn bin_width(&self) -> f64 {
        self.filter.fs() / self.analyzer.padded_len() as f64
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n < self.window {
            Err(Error::NotReady {
                filled: n,
                capacity: self.window,
            })
        } else if n > self.window {
            Err(Error::Argument(format!(
                "series has {n} samples, window is {}",
                self.window
            )))
        } else {
            Ok(())
        }
    }

    /// Dominant in-band peak of one series.
    pub fn peak(&self, series: &[f64]) -> Result<Peak> {
        self.check_len(series.len())?;
        let mut x = series.to_vec();
        remove_mean(&mut x);
        let filtered = self.filter.filtfilt(&x)?;
        let spectrum = self.analyzer.analyze(&filtered)?;
        dominant_frequency(&spectrum, self.band)
    }

    /// Method 1 on an ROI-mean window.
    pub fn method1(&self, mean: &[f64]) -> Result<VitalEstimate> {
        let peak = self.peak(mean)?;
        let mut est = VitalEstimate::new(
            self.kind,
            Method::RoiMean,
            peak.frequency_hz,
            peak.prominence,
            self.band,
        );
        if peak.prominence < self.prominence_threshold {
            est.warnings.push(EstimateWarning::LowProminence);
        }
        Ok(est)
    }

    /// Per-pixel dominant bins, tallied. Pixels are processed in parallel;
    /// the tally is order-independent.
    pub fn vote<S: AsRef<[f64]> + Sync>(&self, pixels: &[S]) -> Result<VoteTally> {
        if pixels.is_empty() {
            return Err(Error::Input("empty pixel grid".into()));
        }
        let peaks: Vec<Option<Peak>> = pixels
            .par_iter()
            .map(|p| {
                let p = p.as_ref();
                self.check_len(p.len())?;
                let flat = p.iter().all(|&v| v == p[0]);
                if flat {
                    Ok(None)
                } else {
                    self.peak(p).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let mut bins = BTreeMap::new();
        let mut excluded = 0;
        for peak in peaks {
            match peak {
                Some(p) => {
                    let e = bins.entry(p.bin).or_insert((0usize, 0.0f64));
                    e.0 += 1;
                    e.1 += p.magnitude;
                }
                None => excluded += 1,
            }
        }
        Ok(VoteTally {
            bins,
            excluded,
            bin_width: self.bin_width(),
        })
    }

    /// Method 2 on per-pixel windows.
    pub fn method2<S: AsRef<[f64]> + Sync>(&self, pixels: &[S]) -> Result<VitalEstimate> {
        let tally = self.vote(pixels)?;
        let (bin, votes) = tally.winner().ok_or_else(|| {
            Error::Data(format!(
                "all {} pixels are constant; nothing to vote on",
                tally.excluded
            ))
        })?;
        let mut est = VitalEstimate::new(
            self.kind,
            Method::PixelVote,
            bin as f64 * tally.bin_width,
            votes as f64 / tally.voters() as f64,
            self.band,
        );
        if tally.excluded > 0 {
            est.warnings
                .push(EstimateWarning::ZeroVariancePixels(tally.excluded));
        }
        Ok(est)
    }

    /// Runs either method on a full buffer. Method 1 averages the channels.
    pub fn estimate_buffer(&self, buffer: &SignalBuffer, method: Method) -> Result<VitalEstimate> {
        if !buffer.is_ready() {
            return Err(Error::NotReady {
                filled: buffer.filled(),
                capacity: buffer.capacity(),
            });
        }
        match method {
            Method::RoiMean => self.method1(&buffer.channel_mean()),
            Method::PixelVote => self.method2(&buffer.snapshot()),
        }
    }
}

/// Method 1 with the window taken to be the whole series.
pub fn estimate_method1(
    series: &TimeSeries,
    kind: VitalKind,
    band: FrequencyBand,
    config: &EstimatorConfig,
) -> Result<VitalEstimate> {
    Estimator::new(kind, band, series.fs(), series.len(), config)?.method1(series.samples())
}

/// Method 2 with the window taken to be the common series length.
pub fn estimate_method2<S: AsRef<[f64]> + Sync>(
    pixels: &[S],
    fs: f64,
    kind: VitalKind,
    band: FrequencyBand,
    config: &EstimatorConfig,
) -> Result<VitalEstimate> {
    let len = pixels
        .first()
        .ok_or_else(|| Error::Input("empty pixel grid".into()))?
        .as_ref()
        .len();
    Estimator::new(kind, band, fs, len, config)?.method2(pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::TAU;

    const FS: f64 = 15.0;

    fn tone(f: f64, amp: f64, n: usize, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|i| 1000.0 + amp * (TAU * f * i as f64 / FS + phase).sin())
            .collect()
    }

    fn cfg() -> EstimatorConfig {
        EstimatorConfig::default()
    }

    #[test]
    fn constant_series_is_flagged_low_prominence() {
        let s = TimeSeries::new(vec![500.0; 450], FS).unwrap();
        let e = estimate_method1(
            &s,
            VitalKind::RespirationRate,
            FrequencyBand::RESPIRATION,
            &cfg(),
        )
        .unwrap();
        assert!(e.has_warning(EstimateWarning::LowProminence));
        assert!(FrequencyBand::RESPIRATION.contains(e.frequency_hz));
    }

    #[test]
    fn unanimous_vote() {
        let px: Vec<Vec<f64>> = (0..16)
            .map(|i| tone(2.0, 5.0, 300, i as f64 * 0.3))
            .collect();
        let est = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            FS,
            300,
            &cfg(),
        )
        .unwrap();
        let e = est.method2(&px).unwrap();
        assert_eq!(e.confidence, 1.0);
        assert!((e.frequency_hz - 2.0).abs() <= est.bin_width());
        assert_eq!(e.rate_per_min, e.frequency_hz * 60.0);
    }

    #[test]
    fn half_noise_half_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, 5.0).unwrap();
        let mut px: Vec<Vec<f64>> = (0..50).map(|i| tone(2.0, 5.0, 300, i as f64)).collect();
        px.extend((0..50).map(|_| (0..300).map(|_| 1000.0 + noise.sample(&mut rng)).collect()));
        let est = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            FS,
            300,
            &cfg(),
        )
        .unwrap();
        let tally = est.vote(&px).unwrap();
        assert_eq!(tally.voters(), 100);
        let e = est.method2(&px).unwrap();
        assert!((e.frequency_hz - 2.0).abs() <= est.bin_width());
        // every modulated pixel agrees; noise pixels only add stray votes
        assert!(e.confidence >= 0.5, "vote fraction {}", e.confidence);
    }

    #[test]
    fn single_pixel_grid_matches_method1() {
        let x = tone(1.93, 3.0, 300, 0.7);
        let est = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            FS,
            300,
            &cfg(),
        )
        .unwrap();
        let a = est.method1(&x).unwrap();
        let b = est.method2(&[x]).unwrap();
        assert_eq!(a.frequency_hz, b.frequency_hz);
    }

    #[test]
    fn constant_pixels_are_excluded() {
        let mut px: Vec<Vec<f64>> = (0..3).map(|_| tone(2.2, 4.0, 300, 0.0)).collect();
        px.push(vec![7.0; 300]);
        let est = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            FS,
            300,
            &cfg(),
        )
        .unwrap();
        let e = est.method2(&px).unwrap();
        assert!(e.has_warning(EstimateWarning::ZeroVariancePixels(1)));
        assert_eq!(e.confidence, 1.0);
        assert!(est.method2(&[vec![7.0; 300]]).is_err());
    }

    #[test]
    fn short_window_is_not_ready_and_empty_grid_is_input_error() {
        let est = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            FS,
            300,
            &cfg(),
        )
        .unwrap();
        assert!(matches!(
            est.method1(&[0.0; 299]),
            Err(Error::NotReady { .. })
        ));
        let empty: Vec<Vec<f64>> = vec![];
        assert!(matches!(est.method2(&empty), Err(Error::Input(_))));
    }

    #[test]
    fn nyquist_violation_is_band_error() {
        let r = Estimator::new(
            VitalKind::HeartRate,
            FrequencyBand::HEART_RATE,
            5.0,
            100,
            &cfg(),
        );
        assert!(matches!(r, Err(Error::Band(_))));
    }

    #[test]
    fn buffer_estimation() {
        let est = Estimator::new(
            VitalKind::RespirationRate,
            FrequencyBand::RESPIRATION,
            FS,
            450,
            &cfg(),
        )
        .unwrap();
        let mut buf = SignalBuffer::new(2, 450, FS).unwrap();
        let x = tone(0.4, 10.0, 460, 0.0);
        for v in &x[..449] {
            buf.push_frame(&[*v, *v + 1.0]).unwrap();
        }
        assert!(matches!(
            est.estimate_buffer(&buf, Method::RoiMean),
            Err(Error::NotReady { .. })
        ));
        buf.push_frame(&[x[449], x[449] + 1.0]).unwrap();
        for m in [Method::RoiMean, Method::PixelVote] {
            let e = est.estimate_buffer(&buf, m).unwrap();
            assert!((e.frequency_hz - 0.4).abs() <= est.bin_width());
            assert!((e.rate_per_min - 24.0).abs() <= 60.0 * est.bin_width());
        }
    }

    #[test]
    fn tie_break_prefers_magnitude_then_lower_bin() {
        let mut t = VoteTally {
            bins: BTreeMap::new(),
            excluded: 0,
            bin_width: 1.0,
        };
        t.bins.insert(10, (3, 1.0));
        t.bins.insert(12, (3, 2.0));
        t.bins.insert(14, (2, 9.0));
        assert_eq!(t.winner(), Some((12, 3)));
        t.bins.insert(12, (3, 1.0));
        assert_eq!(t.winner(), Some((10, 3)));
    }
}
