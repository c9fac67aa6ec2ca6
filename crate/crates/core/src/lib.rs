//! Heart-rate and respiration-rate estimation from thermal frame sequences.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! 1. [`ingest`] reads and writes lossless 16-bit frame sequences (the THSQ
//!    container) and synthesizes sequences with known modulations and motion.
//! 2. [`tracker`] follows a region of interest with a kernelized correlation
//!    filter and pulls per-pixel and ROI-mean intensity series out of it.
//! 3. [`dsp`] and [`estimator`] band-pass, zero-pad and transform those
//!    series and pick the dominant in-band frequency, either from the ROI mean
//!    ([`Method::RoiMean`]) or by a per-pixel vote ([`Method::PixelVote`]).
//! 4. [`eval`] samples evaluation segments and scores estimates against
//!    ground truth with MAPE and Bland-Altman statistics.
//!
//! The `book/` directory at the repository root walks through each stage;
//! its code listings are compiled and run as doctests of this crate.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dsp;
pub mod error;
pub mod estimator;
pub mod eval;
mod fft2;
pub mod ingest;
pub mod tracker;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use estimator::{Method, VitalKind};

// Book chapters are compiled as doctests so their listings cannot drift.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ingest.md")]
    mod ingest {}
    #[doc = include_str!("../../../book/src/tracking.md")]
    mod tracking {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
