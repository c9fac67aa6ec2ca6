use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{KcfModel, KcfParams, RoiBox};
use crate::error::{Error, Result};
use crate::ingest::FrameSequence;

/// Per-frame boxes and tracker confidence for one ROI.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    boxes: Vec<RoiBox>,
    confidence: Vec<f64>,
    low_confidence: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct TrackRow {
    frame_index: usize,
    x: i32,
    y: i32,
    w: u32,
    h: u32,
    confidence: f64,
    low_confidence: u8,
}

impl Track {
    pub fn new(boxes: Vec<RoiBox>, confidence: Vec<f64>, threshold: f64) -> Result<Self> {
        if boxes.len() != confidence.len() {
            return Err(Error::Input(format!(
                "{} boxes but {} confidence values",
                boxes.len(),
                confidence.len()
            )));
        }
        if let Some(first) = boxes.first() {
            if boxes.iter().any(|b| (b.w, b.h) != (first.w, first.h)) {
                return Err(Error::Input("box dimensions change along the track".into()));
            }
        }
        let low_confidence = confidence
            .iter()
            .enumerate()
            .filter(|(_, &c)| c < threshold)
            .map(|(i, _)| i)
            .collect();
        Ok(Track {
            boxes,
            confidence,
            low_confidence,
        })
    }

    /// A motionless track with unbounded confidence, for ROIs that are known
    /// not to move.
    pub fn stationary(roi: RoiBox, frames: usize) -> Self {
        Track {
            boxes: vec![roi; frames],
            confidence: vec![f64::INFINITY; frames],
            low_confidence: BTreeSet::new(),
        }
    }

    pub fn boxes(&self) -> &[RoiBox] {
        &self.boxes
    }

    pub fn confidence(&self) -> &[f64] {
        &self.confidence
    }

    pub fn low_confidence_frames(&self) -> &BTreeSet<usize> {
        &self.low_confidence
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Whether any frame in `range` was flagged.
    pub fn has_low_confidence_in(&self, range: std::ops::Range<usize>) -> bool {
        self.low_confidence.range(range).next().is_some()
    }

    pub fn low_confidence_fraction(&self) -> f64 {
        if self.boxes.is_empty() {
            0.0
        } else {
            self.low_confidence.len() as f64 / self.boxes.len() as f64
        }
    }

    /// Writes `frame_index,x,y,w,h,confidence,low_confidence` rows.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, (b, &c)) in self.boxes.iter().zip(&self.confidence).enumerate() {
            w.serialize(TrackRow {
                frame_index: i,
                x: b.x,
                y: b.y,
                w: b.w,
                h: b.h,
                confidence: c,
                low_confidence: self.low_confidence.contains(&i) as u8,
            })?;
        }
        w.flush().map_err(|e| Error::io("<track csv>", e))?;
        Ok(())
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut boxes = Vec::new();
        let mut confidence = Vec::new();
        let mut low_confidence = BTreeSet::new();
        for (i, row) in csv::Reader::from_reader(input).deserialize().enumerate() {
            let row: TrackRow = row?;
            if row.frame_index != i {
                return Err(Error::Input(format!(
                    "track row {i} has frame_index {}",
                    row.frame_index
                )));
            }
            boxes.push(RoiBox::new(row.x, row.y, row.w, row.h));
            confidence.push(row.confidence);
            if row.low_confidence != 0 {
                low_confidence.insert(i);
            }
        }
        if let Some(first) = boxes.first() {
            if boxes.iter().any(|b| (b.w, b.h) != (first.w, first.h)) {
                return Err(Error::Input("box dimensions change along the track".into()));
            }
        }
        Ok(Track {
            boxes,
            confidence,
            low_confidence,
        })
    }
}

/// Tracks `roi` from frame 0 through the sequence.
///
/// Frame 0's confidence comes from detecting on the training frame itself,
/// so a featureless initial patch is flagged immediately.
pub fn track_sequence(seq: &FrameSequence, roi: RoiBox, params: KcfParams) -> Result<Track> {
    let frames = seq.frames();
    let first = frames
        .first()
        .ok_or_else(|| Error::Input("cannot track an empty sequence".into()))?;
    let mut model = KcfModel::init(first, roi, params)?;
    let mut boxes = Vec::with_capacity(frames.len());
    let mut confidence = Vec::with_capacity(frames.len());
    boxes.push(roi);
    confidence.push(model.detect(first, roi).psr);

    let mut current = roi;
    for frame in &frames[1..] {
        if (frame.width(), frame.height()) != (first.width(), first.height()) {
            return Err(Error::Input(format!(
                "frame {} is {}x{}, first frame is {}x{}",
                frame.index(),
                frame.width(),
                frame.height(),
                first.width(),
                first.height()
            )));
        }
        let (det, moved) = model.step(frame, current);
        current = moved;
        boxes.push(current);
        confidence.push(det.psr);
    }
    Track::new(boxes, confidence, params.psr_threshold)
}
