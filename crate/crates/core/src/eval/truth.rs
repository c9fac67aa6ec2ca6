use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::VitalKind;

/// One ground-truth sample; either rate may be missing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub time_s: f64,
    pub hr_bpm: Option<f64>,
    pub rr_rpm: Option<f64>,
}

impl TruthRecord {
    pub fn rate(&self, kind: VitalKind) -> Option<f64> {
        match kind {
            VitalKind::HeartRate => self.hr_bpm,
            VitalKind::RespirationRate => self.rr_rpm,
        }
    }
}

/// Reference rates over time, as a `time_s,hr_bpm,rr_rpm` CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSeries {
    records: Vec<TruthRecord>,
}

impl GroundTruthSeries {
    pub fn new(records: Vec<TruthRecord>) -> Result<Self> {
        for w in records.windows(2) {
            if !(w[1].time_s > w[0].time_s) {
                return Err(Error::Data(format!(
                    "ground truth times must increase strictly ({} then {})",
                    w[0].time_s, w[1].time_s
                )));
            }
        }
        for r in &records {
            for v in [r.hr_bpm, r.rr_rpm].into_iter().flatten() {
                if !(v > 0.0) {
                    return Err(Error::Data(format!(
                        "non-positive rate {v} at {} s",
                        r.time_s
                    )));
                }
            }
        }
        Ok(GroundTruthSeries { records })
    }

    /// Constant rates sampled every `step_s` from 0 to `duration_s` inclusive.
    pub fn constant(
        duration_s: f64,
        step_s: f64,
        hr_bpm: Option<f64>,
        rr_rpm: Option<f64>,
    ) -> Result<Self> {
        if !(step_s > 0.0) {
            return Err(Error::Argument("ground truth step must be positive".into()));
        }
        let n = (duration_s / step_s + 1e-9).floor() as usize;
        Self::new(
            (0..=n)
                .map(|i| TruthRecord {
                    time_s: i as f64 * step_s,
                    hr_bpm,
                    rr_rpm,
                })
                .collect(),
        )
    }

    pub fn records(&self) -> &[TruthRecord] {
        &self.records
    }

    pub fn has(&self, kind: VitalKind) -> bool {
        self.records.iter().any(|r| r.rate(kind).is_some())
    }

    /// Mean of the present `kind` rates with time inside `[start_s, end_s]`.
    pub fn reference(&self, kind: VitalKind, start_s: f64, end_s: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.time_s >= start_s && r.time_s <= end_s)
            .filter_map(|r| r.rate(kind))
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn from_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["time_s", "hr_bpm", "rr_rpm"] {
            return Err(Error::Data(format!(
                "ground truth header must be time_s,hr_bpm,rr_rpm, got {}",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let records = r
            .deserialize()
            .collect::<std::result::Result<Vec<TruthRecord>, _>>()?;
        Self::new(records)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_csv(std::fs::File::open(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        if self.records.is_empty() {
            w.write_record(["time_s", "hr_bpm", "rr_rpm"])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}
