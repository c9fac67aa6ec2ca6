//! 2D real FFT on row-major grids, keeping only the `w/2 + 1` non-redundant
//! columns of the spectrum. Everything done to a spectrum in the tracker is
//! elementwise, so the spectrum is left column-major to skip a transpose.

use std::cell::RefCell;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

// Intermediate buffers, kept between calls; the tracker runs several
// transforms per frame and fresh allocations cost as much as the FFTs.
#[derive(Clone)]
struct Work {
    rows: Vec<Complex64>,
    cols: Vec<Complex64>,
    real: Vec<f64>,
    row_scratch: Vec<Complex64>,
    col_scratch: Vec<Complex64>,
}

#[derive(Clone)]
pub(crate) struct Fft2 {
    w: usize,
    h: usize,
    wc: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    work: RefCell<Work>,
}

/// `dst` (`cols x rows`) = transpose of `src` (`rows x cols`), in tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 16;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.w, self.h)
    }
}

impl Fft2 {
    pub(crate) fn new(w: usize, h: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        let (r2c, c2r) = (real.plan_fft_forward(w), real.plan_fft_inverse(w));
        let (col_fwd, col_inv) = (cplx.plan_fft_forward(h), cplx.plan_fft_inverse(h));
        let wc = w / 2 + 1;
        let zero = Complex64::default();
        let work = Work {
            rows: vec![zero; h * wc],
            cols: vec![zero; h * wc],
            real: vec![0.0; w],
            row_scratch: vec![zero; r2c.get_scratch_len().max(c2r.get_scratch_len())],
            col_scratch: vec![
                zero;
                col_fwd
                    .get_inplace_scratch_len()
                    .max(col_inv.get_inplace_scratch_len())
            ],
        };
        Fft2 {
            w,
            h,
            wc,
            r2c,
            c2r,
            col_fwd,
            col_inv,
            work: RefCell::new(work),
        }
    }

    pub(crate) fn spectrum_len(&self) -> usize {
        self.h * self.wc
    }

    /// Forward transform. The spectrum is column-major: bin `(u, v)` sits at
    /// `u * h + v` for `u < w/2 + 1`.
    pub(crate) fn forward(&self, grid: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.spectrum_len()];
        self.forward_into(grid, &mut out);
        out
    }

    pub(crate) fn forward_into(&self, grid: &[f64], out: &mut [Complex64]) {
        debug_assert_eq!(grid.len(), self.w * self.h);
        debug_assert_eq!(out.len(), self.spectrum_len());
        let mut guard = self.work.borrow_mut();
        let work = &mut *guard;
        for (src, dst) in grid
            .chunks_exact(self.w)
            .zip(work.rows.chunks_exact_mut(self.wc))
        {
            work.real.copy_from_slice(src);
            self.r2c
                .process_with_scratch(&mut work.real, dst, &mut work.row_scratch)
                .expect("row buffers sized by plan");
        }
        transpose(&work.rows, out, self.h, self.wc);
        self.col_fwd
            .process_with_scratch(out, &mut work.col_scratch);
    }

    /// Inverse of [`Fft2::forward`], normalized so `inverse(forward(x)) == x`.
    #[cfg(test)]
    pub(crate) fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.spectrum_len());
        let mut out = vec![0.0; self.w * self.h];
        self.inverse_into(|cols| cols.copy_from_slice(spectrum), &mut out);
        out
    }

    /// Inverse of `a * conj(b)`: the cyclic cross-correlation of the two grids.
    pub(crate) fn inverse_cross_into(&self, a: &[Complex64], b: &[Complex64], out: &mut [f64]) {
        debug_assert_eq!(a.len(), self.spectrum_len());
        debug_assert_eq!(b.len(), self.spectrum_len());
        self.inverse_into(
            |cols| {
                for ((c, p), q) in cols.iter_mut().zip(a).zip(b) {
                    *c = p * q.conj();
                }
            },
            out,
        )
    }

    /// Inverse of the spectrum written by `fill` into the column buffer.
    pub(crate) fn inverse_into(&self, fill: impl FnOnce(&mut [Complex64]), out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.w * self.h);
        let mut guard = self.work.borrow_mut();
        let work = &mut *guard;
        fill(&mut work.cols);
        self.col_inv
            .process_with_scratch(&mut work.cols, &mut work.col_scratch);
        transpose(&work.cols, &mut work.rows, self.wc, self.h);
        let scale = 1.0 / (self.w * self.h) as f64;
        for (src, dst) in work
            .rows
            .chunks_exact_mut(self.wc)
            .zip(out.chunks_exact_mut(self.w))
        {
            // DC and Nyquist columns of a real signal are real; drop rounding residue.
            src[0].im = 0.0;
            if self.w.is_multiple_of(2) {
                src[self.wc - 1].im = 0.0;
            }
            self.c2r
                .process_with_scratch(src, dst, &mut work.row_scratch)
                .expect("row buffers sized by plan");
        }
        out.iter_mut().for_each(|v| *v *= scale);
    }
}
