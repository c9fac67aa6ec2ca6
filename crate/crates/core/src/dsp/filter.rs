//! Digital Butterworth band-pass via the bilinear transform, run as a cascade
//! of second-order sections, forward then backward.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::{nyquist_check, remove_mean, FrequencyBand, TimeSeries};
use crate::error::{Error, Result};

/// Prototype order used by [`bandpass`]. The band-pass itself has twice as
/// many poles.
pub const DEFAULT_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Section {
    b: [f64; 3],
    // a[0] == 1
    a: [f64; 3],
}

impl Section {
    /// Steady-state state vector for a unit step input (transposed direct
    /// form II).
    fn step_state(&self) -> [f64; 2] {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        // (I - A^T) z = b[1..] - a[1..] * b0 with A the companion matrix.
        let r0 = b1 - a1 * b0;
        let r1 = b2 - a2 * b0;
        // [[1 + a1, -1], [a2, 1]] z = r
        let det = (1.0 + a1) + a2;
        let z0 = (r0 + r1) / det;
        let z1 = r1 - a2 * z0;
        [z0, z1]
    }

    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b[0] + self.b[1] * z_inv + self.b[2] * z2)
            / (self.a[0] + self.a[1] * z_inv + self.a[2] * z2)
    }
}

/// Butterworth band-pass designed for a given band and sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthBandpass {
    sections: Vec<Section>,
    order: usize,
    band: FrequencyBand,
    fs: f64,
}

impl ButterworthBandpass {
    /// Designs an order-`order` prototype mapped onto `band`.
    ///
    /// Band edges are prewarped so the digital -3 dB points land exactly on
    /// `band.lo()` and `band.hi()`.
    pub fn design(band: FrequencyBand, fs: f64, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Argument("filter order must be at least 1".into()));
        }
        nyquist_check(band, fs).into_result()?;
        if band.hi() >= fs / 2.0 {
            return Err(Error::Band(format!(
                "upper edge {} Hz sits on the Nyquist frequency {} Hz",
                band.hi(),
                fs / 2.0
            )));
        }

        let k = 2.0 * fs;
        let w_lo = k * (PI * band.lo() / fs).tan();
        let w_hi = k * (PI * band.hi() / fs).tan();
        let bw = w_hi - w_lo;
        let w0_sq = w_lo * w_hi;

        let mut upper = Vec::with_capacity(order);
        let mut real = Vec::new();
        for i in 1..=order {
            let theta = PI * (2 * i + order - 1) as f64 / (2 * order) as f64;
            let p = Complex64::from_polar(1.0, theta);
            let half = p * (bw / 2.0);
            let d = (half * half - w0_sq).sqrt();
            for s in [half + d, half - d] {
                let z = (k + s) / (k - s);
                if z.im.abs() <= 1e-12 * z.norm() {
                    real.push(z.re);
                } else if z.im > 0.0 {
                    upper.push(z);
                }
            }
        }

        let mut sections: Vec<Section> = upper
            .iter()
            .map(|z| Section {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -2.0 * z.re, z.norm_sqr()],
            })
            .collect();
        for pair in real.chunks(2) {
            let (r1, r2) = (pair[0], *pair.get(1).unwrap_or(&0.0));
            sections.push(Section {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -(r1 + r2), r1 * r2],
            });
        }

        let mut filt = ButterworthBandpass {
            sections,
            order,
            band,
            fs,
        };
        // Normalize to unit gain at the geometric center.
        let center = fs / PI * (w0_sq.sqrt() / k).atan();
        let g = filt.gain(center);
        let per_section = g.powf(-1.0 / filt.sections.len() as f64);
        for s in &mut filt.sections {
            s.b.iter_mut().for_each(|c| *c *= per_section);
        }
        Ok(filt)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn band(&self) -> FrequencyBand {
        self.band
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Shortest input [`filtfilt`](Self::filtfilt) accepts.
    pub fn min_len(&self) -> usize {
        3 * self.order
    }

    /// Magnitude of the single-pass frequency response at `f` Hz, evaluated
    /// from the realized coefficients.
    pub fn gain(&self, f: f64) -> f64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * f / self.fs);
        self.sections
            .iter()
            .map(|s| s.response(z_inv))
            .product::<Complex64>()
            .norm()
    }

    /// Closed-form single-pass magnitude `1 / sqrt(1 + x^(2N))` with
    /// `x = (Ω² - Ω0²) / (Ω · B)` on the prewarped frequency axis.
    pub fn analytic_gain(band: FrequencyBand, fs: f64, order: usize, f: f64) -> f64 {
        if f <= 0.0 || f >= fs / 2.0 {
            return 0.0;
        }
        let k = 2.0 * fs;
        let warp = |hz: f64| k * (PI * hz / fs).tan();
        let (w, w_lo, w_hi) = (warp(f), warp(band.lo()), warp(band.hi()));
        let x = (w * w - w_lo * w_hi) / (w * (w_hi - w_lo));
        1.0 / (1.0 + x.powi(2 * order as i32)).sqrt()
    }

    /// One causal pass with zero initial state.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        let mut state = vec![[0.0; 2]; self.sections.len()];
        self.run(&mut out, &mut state);
        out
    }

    fn run(&self, x: &mut [f64], state: &mut [[f64; 2]]) {
        for v in x.iter_mut() {
            let mut s = *v;
            for (sec, z) in self.sections.iter().zip(state.iter_mut()) {
                let y = sec.b[0] * s + z[0];
                z[0] = sec.b[1] * s - sec.a[1] * y + z[1];
                z[1] = sec.b[2] * s - sec.a[2] * y;
                s = y;
            }
            *v = s;
        }
    }

    fn initial_state(&self) -> Vec<[f64; 2]> {
        let mut scale = 1.0;
        self.sections
            .iter()
            .map(|s| {
                let z = s.step_state();
                let out = [z[0] * scale, z[1] * scale];
                scale *= s.b.iter().sum::<f64>() / s.a.iter().sum::<f64>();
                out
            })
            .collect()
    }

    /// Zero-phase filtering: odd-extend both ends, run forward with
    /// steady-state initial conditions, then backward, then trim.
    pub fn filtfilt(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        if n < self.min_len() {
            return Err(Error::Length {
                required: self.min_len(),
                actual: n,
            });
        }
        let pad = (3 * (2 * self.sections.len() + 1)).min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        let (first, last) = (x[0], x[n - 1]);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
        ext.extend_from_slice(x);
        ext.extend((n - 1 - pad..n - 1).rev().map(|i| 2.0 * last - x[i]));

        let zi = self.initial_state();
        let scaled = |v: f64| zi.iter().map(|z| [z[0] * v, z[1] * v]).collect::<Vec<_>>();

        let mut state = scaled(ext[0]);
        self.run(&mut ext, &mut state);
        ext.reverse();
        let mut state = scaled(ext[0]);
        self.run(&mut ext, &mut state);
        ext.reverse();

        Ok(ext[pad..pad + n].to_vec())
    }
}

/// Mean removal followed by an order-4 zero-phase Butterworth band-pass.
pub fn bandpass(x: &TimeSeries, band: FrequencyBand) -> Result<TimeSeries> {
    let filt = ButterworthBandpass::design(band, x.fs(), DEFAULT_ORDER)?;
    let mut samples = x.samples().to_vec();
    remove_mean(&mut samples);
    TimeSeries::new(filt.filtfilt(&samples)?, x.fs())
}
