//! Kernelized correlation filter.
//!
//! Kernel ridge regression over every cyclic shift of a padded window around
//! the target. Circulant structure diagonalizes in the Fourier domain, so
//! training is an element-wise division and detection a single inverse
//! transform. Features are the window intensities standardized to zero mean
//! and unit variance and tapered by a 2D Hann window; the kernel is Gaussian.

use std::cell::RefCell;
use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RoiBox;
use crate::error::{Error, Result};
use crate::fft2::Fft2;
use crate::ingest::ThermalFrame;

/// Smallest trainable ROI side, pixels.
pub const MIN_ROI_SIDE: u32 = 8;

/// Half-width of the square around the response peak left out of the
/// sidelobe statistics (an 11 x 11 exclusion zone).
const SIDELOBE_EXCLUSION: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KcfParams {
    /// Gaussian kernel bandwidth on standardized features.
    pub sigma: f64,
    /// Ridge regularization.
    pub lambda: f64,
    /// Linear interpolation rate of the model update.
    pub learning_rate: f64,
    /// Extra context around the target: window side = side * (1 + padding).
    pub padding: f64,
    /// Target response bandwidth as a fraction of `sqrt(w * h)`.
    pub response_sigma_factor: f64,
    /// Frames whose peak-to-sidelobe ratio falls below this are flagged.
    pub psr_threshold: f64,
}

impl Default for KcfParams {
    fn default() -> Self {
        KcfParams {
            sigma: 0.5,
            lambda: 1e-4,
            learning_rate: 0.02,
            padding: 1.5,
            response_sigma_factor: 0.1,
            psr_threshold: 5.0,
        }
    }
}

impl KcfParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Argument(format!("kcf: {m}")));
        if !(self.lambda > 0.0) {
            return bad("lambda must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning rate must lie in (0, 1]");
        }
        if !(self.sigma > 0.0) {
            return bad("kernel sigma must be positive");
        }
        if !(self.padding >= 0.0) {
            return bad("padding must be non-negative");
        }
        if !(self.response_sigma_factor > 0.0) {
            return bad("response sigma factor must be positive");
        }
        Ok(())
    }
}

/// Result of correlating the model against one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub dx: i32,
    pub dy: i32,
    pub peak: f64,
    /// Peak-to-sidelobe ratio; 0 when the sidelobe is flat.
    pub psr: f64,
}

#[derive(Debug, Clone)]
pub struct KcfModel {
    params: KcfParams,
    roi_w: u32,
    roi_h: u32,
    win_w: usize,
    win_h: usize,
    fft: Fft2,
    taper: Vec<f64>,
    target_f: Vec<Complex64>,
    template: Vec<f64>,
    template_f: Vec<Complex64>,
    template_energy: f64,
    alpha_f: Vec<Complex64>,
    scratch: RefCell<Scratch>,
}

// Per-frame working grids. Window-sized vectors are large enough that
// allocating them fresh every frame costs page faults on each transform.
#[derive(Debug, Clone, Default)]
struct Scratch {
    patch: Vec<f64>,
    patch_f: Vec<Complex64>,
    k: Vec<f64>,
    k_f: Vec<Complex64>,
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 * (1.0 - (TAU * i as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Signed offset of index `i` on a cyclic axis of length `n`.
fn wrap(i: usize, n: usize) -> i64 {
    if i > n / 2 {
        i as i64 - n as i64
    } else {
        i as i64
    }
}

impl KcfModel {
    /// Trains a filter on `roi` in `frame`.
    pub fn init(frame: &ThermalFrame, roi: RoiBox, params: KcfParams) -> Result<Self> {
        params.validate()?;
        if roi.w < MIN_ROI_SIDE || roi.h < MIN_ROI_SIDE {
            return Err(Error::Init(format!(
                "ROI {}x{} is below the {MIN_ROI_SIDE}x{MIN_ROI_SIDE} minimum",
                roi.w, roi.h
            )));
        }
        if !roi.fits(frame.width(), frame.height()) {
            return Err(Error::Bounds(format!(
                "ROI {roi:?} is not inside the {}x{} frame",
                frame.width(),
                frame.height()
            )));
        }
        let win_w = (roi.w as f64 * (1.0 + params.padding)).round() as usize;
        let win_h = (roi.h as f64 * (1.0 + params.padding)).round() as usize;
        let (hx, hy) = (hann(win_w), hann(win_h));
        let taper = hy
            .iter()
            .flat_map(|&a| hx.iter().map(move |&b| a * b))
            .collect();

        let sigma = (roi.w as f64 * roi.h as f64).sqrt() * params.response_sigma_factor;
        let mut target = Vec::with_capacity(win_w * win_h);
        for y in 0..win_h {
            let dy = wrap(y, win_h) as f64;
            for x in 0..win_w {
                let dx = wrap(x, win_w) as f64;
                target.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
            }
        }
        let fft = Fft2::new(win_w, win_h);
        let target_f = fft.forward(&target);

        let (n, m) = (win_w * win_h, fft.spectrum_len());
        let mut model = KcfModel {
            params,
            roi_w: roi.w,
            roi_h: roi.h,
            win_w,
            win_h,
            fft,
            taper,
            target_f,
            template: vec![0.0; n],
            template_f: vec![Complex64::default(); m],
            template_energy: 0.0,
            alpha_f: vec![Complex64::default(); m],
            scratch: RefCell::new(Scratch {
                patch: Vec::with_capacity(n),
                patch_f: vec![Complex64::default(); m],
                k: vec![0.0; n],
                k_f: vec![Complex64::default(); m],
            }),
        };
        let mut s = model.scratch.take();
        model.features_into(frame, roi, &mut s);
        model.train(&mut s, 1.0);
        model.scratch = RefCell::new(s);
        Ok(model)
    }

    pub fn params(&self) -> &KcfParams {
        &self.params
    }

    pub fn window_dims(&self) -> (usize, usize) {
        (self.win_w, self.win_h)
    }

    pub fn template(&self) -> &[f64] {
        &self.template
    }

    /// Dual coefficients over the non-redundant half spectrum, column-major
    /// (`(w/2 + 1) * h` bins).
    pub fn alpha_spectrum(&self) -> &[Complex64] {
        &self.alpha_f
    }

    /// Standardized, tapered window centered on `roi`, and its spectrum.
    /// Samples outside the frame replicate the nearest edge pixel.
    fn features_into(&self, frame: &ThermalFrame, roi: RoiBox, s: &mut Scratch) {
        let cx = roi.x as i64 + roi.w as i64 / 2;
        let cy = roi.y as i64 + roi.h as i64 / 2;
        let x0 = cx - self.win_w as i64 / 2;
        let y0 = cy - self.win_h as i64 / 2;
        let (fw, fh) = (frame.width() as i64, frame.height() as i64);
        let cols: Vec<usize> = (x0..x0 + self.win_w as i64)
            .map(|x| x.clamp(0, fw - 1) as usize)
            .collect();
        let patch = &mut s.patch;
        patch.clear();
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for y in y0..y0 + self.win_h as i64 {
            let row = &frame.data()[y.clamp(0, fh - 1) as usize * fw as usize..][..fw as usize];
            patch.extend(cols.iter().map(|&x| {
                let v = row[x] as f64;
                sum += v;
                sum_sq += v * v;
                v
            }));
        }
        let n = patch.len() as f64;
        let mean = sum / n;
        // Raw counts are integers well below 2^16, so the one-pass variance is exact enough.
        let std = (sum_sq / n - mean * mean).max(0.0).sqrt();
        // A flat patch carries no appearance; leave it all-zero.
        let inv = if std > 1e-6 * mean.abs().max(1.0) {
            1.0 / std
        } else {
            0.0
        };
        for (v, t) in patch.iter_mut().zip(&self.taper) {
            *v = (*v - mean) * inv * t;
        }
        self.fft.forward_into(patch, &mut s.patch_f);
    }

    /// Spectrum of the Gaussian kernel between every cyclic shift of `a` and
    /// `b`, left in `kf`; `k` is overwritten on the way.
    fn kernel_spectrum(
        &self,
        af: &[Complex64],
        a_energy: f64,
        bf: &[Complex64],
        b_energy: f64,
        k: &mut [f64],
        kf: &mut [Complex64],
    ) {
        self.fft.inverse_cross_into(af, bf, k);
        let n = (self.win_w * self.win_h) as f64;
        let inv_s2 = 1.0 / (self.params.sigma * self.params.sigma);
        for v in k.iter_mut() {
            let d2 = ((a_energy + b_energy - 2.0 * *v) / n).max(0.0);
            *v = (-d2 * inv_s2).exp();
        }
        self.fft.forward_into(k, kf);
    }

    /// Fits `ŷ / (k̂xx + λ)` to the window in `s` and blends it into the
    /// model at `rate` (1 replaces the model).
    fn train(&mut self, s: &mut Scratch, rate: f64) {
        let e = energy(&s.patch);
        self.kernel_spectrum(&s.patch_f, e, &s.patch_f, e, &mut s.k, &mut s.k_f);
        let lambda = self.params.lambda;
        for ((a, y), k) in self.alpha_f.iter_mut().zip(&self.target_f).zip(&s.k_f) {
            *a = *a * (1.0 - rate) + y / (k + lambda) * rate;
        }
        for (o, n) in self.template_f.iter_mut().zip(&s.patch_f) {
            *o = *o * (1.0 - rate) + n * rate;
        }
        for (o, n) in self.template.iter_mut().zip(&s.patch) {
            *o = *o * (1.0 - rate) + n * rate;
        }
        self.template_energy = energy(&self.template);
    }

    /// Response to the window in `s`, left in `s.k`.
    fn respond(&self, s: &mut Scratch) {
        let (tf, te) = (&self.template_f, self.template_energy);
        self.kernel_spectrum(&s.patch_f, energy(&s.patch), tf, te, &mut s.k, &mut s.k_f);
        let kzf = &s.k_f;
        self.fft.inverse_into(
            |cols| {
                for ((c, a), k) in cols.iter_mut().zip(&self.alpha_f).zip(kzf) {
                    *c = a * k;
                }
            },
            &mut s.k,
        );
    }

    /// Raw response map (window-sized, row-major, zero shift at index 0) for
    /// a window centered on `roi`.
    pub fn response_map(&self, frame: &ThermalFrame, roi: RoiBox) -> Vec<f64> {
        let mut s = self.scratch.borrow_mut();
        self.features_into(frame, roi, &mut s);
        self.respond(&mut s);
        s.k.clone()
    }

    /// Response map for a precomputed feature window. Used to check shift
    /// behavior on synthetic feature grids.
    #[cfg(test)]
    pub(crate) fn response_for_features(&self, z: &[f64]) -> Vec<f64> {
        let mut s = self.scratch.borrow_mut();
        s.patch.clear();
        s.patch.extend_from_slice(z);
        let s = &mut *s;
        self.fft.forward_into(&s.patch, &mut s.patch_f);
        self.respond(s);
        s.k.clone()
    }

    #[cfg(test)]
    pub(crate) fn train_on_features(&mut self, x: Vec<f64>) {
        let mut s = self.scratch.take();
        self.fft.forward_into(&x, &mut s.patch_f);
        s.patch = x;
        self.train(&mut s, 1.0);
        self.scratch = RefCell::new(s);
    }

    fn locate(&self, response: &[f64]) -> Detection {
        // strict > keeps the smallest row-major index on ties
        let mut best = 0;
        for (i, &v) in response.iter().enumerate() {
            if v > response[best] {
                best = i;
            }
        }
        let (py, px) = (best / self.win_w, best % self.win_w);
        let peak = response[best];

        // Sidelobe = everything outside the cyclic exclusion square around the peak.
        let excluded = |n: usize, p: usize| {
            let mut mask = vec![false; n];
            for d in 0..=2 * SIDELOBE_EXCLUSION {
                mask[(p + n * (SIDELOBE_EXCLUSION + 1) + d - SIDELOBE_EXCLUSION) % n] = true;
            }
            mask
        };
        let (ex_rows, ex_cols) = (excluded(self.win_h, py), excluded(self.win_w, px));
        let (mut sum, mut sum_sq) = response
            .iter()
            .fold((0.0, 0.0), |(s, q), &v| (s + v, q + v * v));
        let mut count = response.len();
        for (row, _) in response
            .chunks_exact(self.win_w)
            .zip(&ex_rows)
            .filter(|(_, &e)| e)
        {
            for (&v, _) in row.iter().zip(&ex_cols).filter(|(_, &e)| e) {
                sum -= v;
                sum_sq -= v * v;
                count -= 1;
            }
        }
        let psr = if count > 1 {
            let mean = sum / count as f64;
            let std = (sum_sq / count as f64 - mean * mean).max(0.0).sqrt();
            let scale = peak.abs().max(mean.abs());
            if std > 1e-9 * scale && std > f64::MIN_POSITIVE {
                ((peak - mean) / std).max(0.0)
            } else {
                0.0
            }
        } else {
            0.0
        };

        Detection {
            dx: wrap(px, self.win_w) as i32,
            dy: wrap(py, self.win_h) as i32,
            peak,
            psr,
        }
    }

    /// Correlates the model with a window centered on `roi`.
    pub fn detect(&self, frame: &ThermalFrame, roi: RoiBox) -> Detection {
        let mut s = self.scratch.borrow_mut();
        self.features_into(frame, roi, &mut s);
        self.respond(&mut s);
        self.locate(&s.k)
    }

    /// Retrains on `roi` and blends into the model at the learning rate.
    pub fn update(&mut self, frame: &ThermalFrame, roi: RoiBox) {
        let mut s = self.scratch.take();
        self.features_into(frame, roi, &mut s);
        self.train(&mut s, self.params.learning_rate);
        self.scratch = RefCell::new(s);
    }

    /// Detects around `roi`, then updates the model at the new position.
    /// Returns the detection and the new box, shifted back inside the frame
    /// if the displacement pushed it out.
    pub(crate) fn step(&mut self, frame: &ThermalFrame, roi: RoiBox) -> (Detection, RoiBox) {
        let mut s = self.scratch.take();
        self.features_into(frame, roi, &mut s);
        self.respond(&mut s);
        let det = self.locate(&s.k);
        let moved = roi
            .translated(det.dx, det.dy)
            .clamped_into(frame.width(), frame.height());
        if moved != roi {
            self.features_into(frame, moved, &mut s);
        }
        self.train(&mut s, self.params.learning_rate);
        self.scratch = RefCell::new(s);
        (det, moved)
    }

    pub fn roi_dims(&self) -> (u32, u32) {
        (self.roi_w, self.roi_h)
    }
}

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
