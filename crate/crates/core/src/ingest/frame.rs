use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::VitalKind;
use crate::tracker::RoiBox;

/// A single 16-bit thermal frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThermalFrame {
    width: u32,
    height: u32,
    index: u64,
    data: Vec<u16>,
}

impl ThermalFrame {
    pub fn new(width: u32, height: u32, index: u64, data: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input(format!(
                "frame dimensions must be nonzero, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::Input(format!(
                "frame {index} holds {} intensities, expected {expected}",
                data.len()
            )));
        }
        Ok(ThermalFrame {
            width,
            height,
            index,
            data,
        })
    }

    /// A frame filled with one value.
    pub fn filled(width: u32, height: u32, index: u64, value: u16) -> Result<Self> {
        Self::new(
            width,
            height,
            index,
            vec![value; width as usize * height as usize],
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u16] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u16 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Intensity at `(x, y)` with coordinates clamped to the frame edge.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> u16 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[cy * self.width as usize + cx]
    }

    pub(crate) fn with_index(mut self, index: u64) -> Self {
        self.index = index;
        self
    }
}

/// Frame rate as an exact rational number of frames per second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fps {
    num: u32,
    den: u32,
}

impl Fps {
    pub const DEFAULT: Fps = Fps { num: 15, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::Input(format!(
                "fps must be positive, got {num}/{den}"
            )));
        }
        Ok(Fps { num, den })
    }

    pub fn integer(num: u32) -> Result<Self> {
        Self::new(num, 1)
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn hz(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Number of whole frames covering `seconds`, rounded to nearest.
    pub fn frames_in(self, seconds: f64) -> usize {
        (seconds * self.hz()).round().max(0.0) as usize
    }

    /// Timestamp of a frame index, in seconds.
    pub fn time_of(self, frame: usize) -> f64 {
        frame as f64 * self.den as f64 / self.num as f64
    }
}

impl Default for Fps {
    fn default() -> Self {
        Fps::DEFAULT
    }
}

impl fmt::Display for Fps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Fps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("cannot parse fps from {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => Fps::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Fps::integer(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FpsRepr {
    Int(u32),
    Text(String),
}

impl Serialize for Fps {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.den == 1 {
            s.serialize_u32(self.num)
        } else {
            s.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for Fps {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match FpsRepr::deserialize(d)? {
            FpsRepr::Int(n) => Fps::integer(n),
            FpsRepr::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Ground truth carried alongside a synthetic sequence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_hr_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_rr_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionTruth {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vital: Option<VitalKind>,
    pub roi: RoiBox,
    pub frequency_hz: f64,
    pub phase_rad: f64,
    pub motion: String,
}

/// An ordered run of equally sized frames at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    width: u32,
    height: u32,
    fps: Fps,
    frames: Vec<ThermalFrame>,
    metadata: Option<SequenceMetadata>,
}

impl FrameSequence {
    /// Builds a sequence, checking dimensions and renumbering nothing: frame
    /// indices must already run `0, 1, 2, ...`.
    pub fn new(width: u32, height: u32, fps: Fps, frames: Vec<ThermalFrame>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input(format!(
                "sequence dimensions must be nonzero, got {width}x{height}"
            )));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.width != width || f.height != height {
                return Err(Error::Input(format!(
                    "frame {i} is {}x{}, sequence is {width}x{height}",
                    f.width, f.height
                )));
            }
            if f.index != i as u64 {
                return Err(Error::Input(format!(
                    "frame at position {i} carries index {}",
                    f.index
                )));
            }
        }
        Ok(FrameSequence {
            width,
            height,
            fps,
            frames,
            metadata: None,
        })
    }

    /// Builds a sequence from frames in order, assigning consecutive indices.
    pub fn from_frames(fps: Fps, frames: Vec<ThermalFrame>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Input("cannot infer dimensions from zero frames".into()))?;
        let (w, h) = (first.width, first.height);
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.with_index(i as u64))
            .collect();
        Self::new(w, h, fps, frames)
    }

    pub fn with_metadata(mut self, metadata: Option<SequenceMetadata>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn fps(&self) -> Fps {
        self.fps
    }

    pub fn frames(&self) -> &[ThermalFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.fps.time_of(self.frames.len())
    }

    pub fn metadata(&self) -> Option<&SequenceMetadata> {
        self.metadata.as_ref()
    }

    pub fn into_frames(self) -> Vec<ThermalFrame> {
        self.frames
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_rejects_wrong_length() {
        assert!(ThermalFrame::new(2, 2, 0, vec![0; 3]).is_err());
        assert!(ThermalFrame::new(0, 2, 0, vec![]).is_err());
    }

    #[test]
    fn sequence_rejects_mismatched_dims_and_indices() {
        let a = ThermalFrame::filled(2, 2, 0, 1).unwrap();
        let b = ThermalFrame::filled(3, 2, 1, 1).unwrap();
        assert!(FrameSequence::new(2, 2, Fps::DEFAULT, vec![a.clone(), b]).is_err());
        let c = ThermalFrame::filled(2, 2, 5, 1).unwrap();
        assert!(FrameSequence::new(2, 2, Fps::DEFAULT, vec![a, c]).is_err());
    }

    #[test]
    fn fps_parse_and_display() {
        let f: Fps = "30000/1001".parse().unwrap();
        assert_eq!((f.num(), f.den()), (30000, 1001));
        assert_eq!(f.to_string(), "30000/1001");
        assert_eq!("15".parse::<Fps>().unwrap(), Fps::DEFAULT);
        assert!("0".parse::<Fps>().is_err());
        assert!("abc".parse::<Fps>().is_err());
    }

    #[test]
    fn fps_serde_accepts_int_and_ratio() {
        let f: Fps = serde_json::from_str("15").unwrap();
        assert_eq!(f, Fps::DEFAULT);
        let g: Fps = serde_json::from_str("\"25/2\"").unwrap();
        assert_eq!(g.hz(), 12.5);
        assert_eq!(serde_json::to_string(&g).unwrap(), "\"25/2\"");
    }
}
