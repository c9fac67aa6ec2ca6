//! Frame sequences, the THSQ container, and the synthetic sequence generator.

mod frame;
mod synthetic;
mod thsq;

pub use frame::{Fps, FrameSequence, RegionTruth, SequenceMetadata, ThermalFrame};
pub use synthetic::{generate_synthetic, Motion, RegionSpec, SyntheticSpec, Waveform};
pub use thsq::{decode_sequence, encode_sequence, read_sequence, write_sequence, MAGIC, VERSION};
