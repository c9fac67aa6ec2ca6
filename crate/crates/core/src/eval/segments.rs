use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MINUTE_S: f64 = 60.0;

/// An evaluation window inside minute `minute` of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub minute: usize,
    pub start_s: f64,
    pub end_s: f64,
}

/// Draws one segment of `segment_s` seconds per whole minute of `total_s`,
/// with its start uniform over the positions that keep it inside the minute.
pub fn sample_segments(
    total_s: f64,
    minute_s: f64,
    segment_s: f64,
    seed: u64,
) -> Result<Vec<Segment>> {
    if !(segment_s > 0.0 && segment_s <= minute_s) {
        return Err(Error::Argument(format!(
            "segment of {segment_s} s does not fit a {minute_s} s minute"
        )));
    }
    // tolerate float noise in durations computed from frame counts
    let minutes = (total_s / minute_s + 1e-9).floor() as usize;
    if minutes == 0 {
        return Err(Error::Argument(format!(
            "{total_s} s is shorter than one {minute_s} s minute"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = minute_s - segment_s;
    Ok((0..minutes)
        .map(|m| {
            let start = m as f64 * minute_s + rng.gen_range(0.0..=span);
            Segment {
                minute: m,
                start_s: start,
                end_s: start + segment_s,
            }
        })
        .collect())
}
