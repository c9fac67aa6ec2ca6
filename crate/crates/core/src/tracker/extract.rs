use serde::{Deserialize, Serialize};

use super::Track;
use crate::error::{Error, Result};
use crate::ingest::FrameSequence;

/// What to do when a tracked box pokes outside a frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorderMode {
    /// Replicate edge pixels and record the frame.
    #[default]
    Clamp,
    /// Fail with [`Error::Bounds`].
    Strict,
}

/// Intensity series for every pixel offset inside a tracked box, plus the
/// box-mean series.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelSeries {
    width: u32,
    height: u32,
    len: usize,
    // cell-major: cell (x, y) occupies [(y * width + x) * len ..][.. len]
    data: Vec<f64>,
    mean: Vec<f64>,
    clamped_frames: Vec<usize>,
}

impl PixelSeries {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Samples per series.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cells(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Series at offset `(x, y)` inside the box.
    pub fn series(&self, x: u32, y: u32) -> &[f64] {
        self.cell(y as usize * self.width as usize + x as usize)
    }

    pub fn cell(&self, index: usize) -> &[f64] {
        &self.data[index * self.len..(index + 1) * self.len]
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.len.max(1)).take(self.cells())
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Frames where the box was partly outside and edge pixels were used.
    pub fn clamped_frames(&self) -> &[usize] {
        &self.clamped_frames
    }
}

pub fn extract_pixel_series(
    seq: &FrameSequence,
    track: &Track,
    mode: BorderMode,
) -> Result<PixelSeries> {
    if track.len() != seq.len() {
        return Err(Error::Input(format!(
            "track has {} boxes, sequence has {} frames",
            track.len(),
            seq.len()
        )));
    }
    let (bw, bh) = match track.boxes().first() {
        Some(b) => (b.w, b.h),
        None => (0, 0),
    };
    if !seq.is_empty() && (bw == 0 || bh == 0) {
        return Err(Error::Input("empty ROI".into()));
    }
    let len = seq.len();
    let cells = bw as usize * bh as usize;
    let mut data = vec![0.0; cells * len];
    let mut mean = Vec::with_capacity(len);
    let mut clamped_frames = Vec::new();
    for (t, (frame, b)) in seq.frames().iter().zip(track.boxes()).enumerate() {
        if !b.fits(seq.width(), seq.height()) {
            match mode {
                BorderMode::Strict => {
                    return Err(Error::Bounds(format!(
                        "frame {t}: box {b:?} leaves the {}x{} frame",
                        seq.width(),
                        seq.height()
                    )))
                }
                BorderMode::Clamp => clamped_frames.push(t),
            }
        }
        let mut sum = 0.0;
        for y in 0..bh {
            for x in 0..bw {
                let v = frame.get_clamped(b.x as i64 + x as i64, b.y as i64 + y as i64) as f64;
                data[(y as usize * bw as usize + x as usize) * len + t] = v;
                sum += v;
            }
        }
        mean.push(sum / cells as f64);
    }
    Ok(PixelSeries {
        width: bw,
        height: bh,
        len,
        data,
        mean,
        clamped_frames,
    })
}
