//! THSQ: a lossless little-endian container for 16-bit thermal frames.
//!
//! ```text
//! "THSQ" | u32 version=1 | u32 width | u32 height | u32 fps_num | u32 fps_den
//! u64 frame_count | frame_count * width * height * u16 (row-major, frame-major)
//! u32 metadata_len | metadata_len bytes of UTF-8 JSON
//! ```
//!
//! The trailing metadata length is always written (0 when absent); readers
//! also accept files that end right after the payload.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::frame::{Fps, FrameSequence, SequenceMetadata, ThermalFrame};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"THSQ";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 5 + 8;

pub fn read_sequence(path: impl AsRef<Path>) -> Result<FrameSequence> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_sequence(&bytes)
}

pub fn write_sequence(seq: &FrameSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode_into(seq, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn encode_sequence(seq: &FrameSequence) -> Vec<u8> {
    let mut buf = Vec::with_capacity(
        HEADER_LEN + seq.len() * seq.width() as usize * seq.height() as usize * 2 + 4,
    );
    encode_into(seq, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

fn encode_into(seq: &FrameSequence, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&seq.width().to_le_bytes())?;
    out.write_all(&seq.height().to_le_bytes())?;
    out.write_all(&seq.fps().num().to_le_bytes())?;
    out.write_all(&seq.fps().den().to_le_bytes())?;
    out.write_all(&(seq.len() as u64).to_le_bytes())?;
    let mut row = Vec::with_capacity(seq.width() as usize * 2);
    for frame in seq.frames() {
        for chunk in frame.data().chunks(seq.width() as usize) {
            row.clear();
            row.extend(chunk.iter().flat_map(|v| v.to_le_bytes()));
            out.write_all(&row)?;
        }
    }
    match seq.metadata() {
        Some(meta) => {
            let json = serde_json::to_vec(meta).map_err(std::io::Error::other)?;
            out.write_all(&(json.len() as u32).to_le_bytes())?;
            out.write_all(&json)?;
        }
        None => out.write_all(&0u32.to_le_bytes())?,
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8)
            .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn decode_sequence(bytes: &[u8]) -> Result<FrameSequence> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur
        .take(4)
        .ok_or_else(|| Error::Format("file shorter than the magic bytes".into()))?;
    if magic != MAGIC {
        return Err(Error::Format(format!("bad magic bytes {magic:02x?}")));
    }
    let short = || Error::Corrupt("header truncated".into());
    let version = cur.u32().ok_or_else(short)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let width = cur.u32().ok_or_else(short)?;
    let height = cur.u32().ok_or_else(short)?;
    let fps_num = cur.u32().ok_or_else(short)?;
    let fps_den = cur.u32().ok_or_else(short)?;
    let count = cur.u64().ok_or_else(short)?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidHeader(format!(
            "zero frame dimension {width}x{height}"
        )));
    }
    let fps = Fps::new(fps_num, fps_den)
        .map_err(|_| Error::InvalidHeader(format!("fps {fps_num}/{fps_den}")))?;

    let pixels = width as usize * height as usize;
    let frame_bytes = pixels * 2;
    let available = cur.remaining() / frame_bytes;
    if (available as u64) < count {
        return Err(Error::Corrupt(format!(
            "header declares {count} frames, payload holds {available}"
        )));
    }
    let mut frames = Vec::with_capacity(count as usize);
    for i in 0..count {
        let raw = cur.take(frame_bytes).expect("length checked above");
        let data = raw
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]))
            .collect();
        frames.push(ThermalFrame::new(width, height, i, data)?);
    }

    let metadata = match cur.remaining() {
        0 => None,
        _ => {
            let len = cur
                .u32()
                .ok_or_else(|| Error::Corrupt("truncated metadata length".into()))?;
            if len == 0 {
                None
            } else {
                let raw = cur
                    .take(len as usize)
                    .ok_or_else(|| Error::Corrupt("truncated metadata block".into()))?;
                let text = std::str::from_utf8(raw)
                    .map_err(|e| Error::Corrupt(format!("metadata is not UTF-8: {e}")))?;
                Some(serde_json::from_str::<SequenceMetadata>(text)?)
            }
        }
    };
    if cur.remaining() != 0 {
        return Err(Error::Corrupt(format!(
            "{} trailing bytes after metadata",
            cur.remaining()
        )));
    }

    Ok(FrameSequence::new(width, height, fps, frames)?.with_metadata(metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(w: u32, h: u32, frames: &[Vec<u16>]) -> FrameSequence {
        let frames = frames
            .iter()
            .enumerate()
            .map(|(i, d)| ThermalFrame::new(w, h, i as u64, d.clone()).unwrap())
            .collect();
        FrameSequence::new(w, h, Fps::DEFAULT, frames).unwrap()
    }

    #[test]
    fn empty_sequence_encodes_zero_frames() {
        let s = FrameSequence::new(4, 3, Fps::DEFAULT, vec![]).unwrap();
        let bytes = encode_sequence(&s);
        assert_eq!(bytes.len(), HEADER_LEN + 4);
        assert_eq!(&bytes[28..36], &0u64.to_le_bytes());
        assert_eq!(decode_sequence(&bytes).unwrap(), s);
    }

    #[test]
    fn single_pixel_payload_is_one_le_u16() {
        let s = seq(1, 1, &[vec![42]]);
        let bytes = encode_sequence(&s);
        assert_eq!(&bytes[HEADER_LEN..HEADER_LEN + 2], &[42, 0]);
        assert_eq!(bytes.len(), HEADER_LEN + 2 + 4);
    }

    #[test]
    fn header_layout() {
        let s = FrameSequence::new(3, 2, Fps::new(30000, 1001).unwrap(), vec![]).unwrap();
        let b = encode_sequence(&s);
        assert_eq!(&b[0..4], &[0x54, 0x48, 0x53, 0x51]);
        assert_eq!(&b[4..8], &1u32.to_le_bytes());
        assert_eq!(&b[8..12], &3u32.to_le_bytes());
        assert_eq!(&b[12..16], &2u32.to_le_bytes());
        assert_eq!(&b[16..20], &30000u32.to_le_bytes());
        assert_eq!(&b[20..24], &1001u32.to_le_bytes());
    }

    #[test]
    fn bad_magic_is_format_error() {
        let mut b = encode_sequence(&seq(1, 1, &[vec![1]]));
        b[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode_sequence(&b), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload_is_corruption() {
        let frames: Vec<Vec<u16>> = (0..10).map(|i| vec![i; 4]).collect();
        let b = encode_sequence(&seq(2, 2, &frames));
        // drop the metadata length and the whole last frame
        let cut = &b[..b.len() - 4 - 8];
        assert!(matches!(decode_sequence(cut), Err(Error::Corrupt(_))));
    }

    #[test]
    fn zero_width_is_invalid_header() {
        let mut b = encode_sequence(&seq(1, 1, &[]));
        b[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(decode_sequence(&b), Err(Error::InvalidHeader(_))));
    }

    #[test]
    fn file_without_trailing_metadata_length_is_accepted() {
        let s = seq(1, 1, &[vec![7]]);
        let b = encode_sequence(&s);
        assert_eq!(decode_sequence(&b[..b.len() - 4]).unwrap(), s);
    }

    #[test]
    fn metadata_roundtrip_on_disk() {
        let meta = SequenceMetadata {
            true_hr_hz: Some(2.0),
            true_rr_hz: Some(0.1 + 0.2),
            motion: Some("static".into()),
            regions: vec![],
        };
        let s = seq(2, 1, &[vec![1, 2], vec![3, 4]]).with_metadata(Some(meta));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.thsq");
        write_sequence(&s, &path).unwrap();
        assert_eq!(read_sequence(&path).unwrap(), s);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let s = seq(1, 1, &[]);
        let err = write_sequence(&s, "/nonexistent-dir/x.thsq").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #[test]
        fn roundtrip_random_sequences(
            w in 1u32..6, h in 1u32..6, n in 0usize..5,
            num in 1u32..120, den in 1u32..4, seed in any::<u64>(),
        ) {
            let mut state = seed;
            let frames: Vec<Vec<u16>> = (0..n).map(|_| {
                (0..w * h).map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 48) as u16
                }).collect()
            }).collect();
            let mut s = seq(w, h, &frames);
            s = FrameSequence::new(w, h, Fps::new(num, den).unwrap(), s.into_frames()).unwrap();
            prop_assert_eq!(decode_sequence(&encode_sequence(&s)).unwrap(), s);
        }
    }
}
