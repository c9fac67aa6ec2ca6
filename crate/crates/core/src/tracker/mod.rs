//! Region-of-interest tracking with a kernelized correlation filter, and
//! extraction of the intensity series the estimators consume.

mod extract;
mod kcf;
mod track;

use serde::{Deserialize, Serialize};

pub use extract::{extract_pixel_series, BorderMode, PixelSeries};
pub use kcf::{Detection, KcfModel, KcfParams, MIN_ROI_SIDE};
pub use track::{track_sequence, Track};

/// Axis-aligned box in pixel coordinates; `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoiBox {
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
}

impl RoiBox {
    pub const fn new(x: i32, y: i32, w: u32, h: u32) -> Self {
        RoiBox { x, y, w, h }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    /// Whether the box lies entirely inside a `width` x `height` frame.
    pub fn fits(&self, width: u32, height: u32) -> bool {
        self.x >= 0
            && self.y >= 0
            && self.x as i64 + self.w as i64 <= width as i64
            && self.y as i64 + self.h as i64 <= height as i64
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        RoiBox {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }

    /// Shifts the box the minimum amount needed to fit inside the frame.
    pub(crate) fn clamped_into(&self, width: u32, height: u32) -> Self {
        let max_x = (width as i64 - self.w as i64).max(0) as i32;
        let max_y = (height as i64 - self.h as i64).max(0) as i32;
        RoiBox {
            x: self.x.clamp(0, max_x),
            y: self.y.clamp(0, max_y),
            ..*self
        }
    }
}

impl std::str::FromStr for RoiBox {
    type Err = crate::Error;

    /// Parses `x,y,w,h`.
    fn from_str(s: &str) -> crate::Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || crate::Error::Argument(format!("expected x,y,w,h, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        Ok(RoiBox {
            x: parts[0].parse().map_err(|_| bad())?,
            y: parts[1].parse().map_err(|_| bad())?,
            w: parts[2].parse().map_err(|_| bad())?,
            h: parts[3].parse().map_err(|_| bad())?,
        })
    }
}
