use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::Method;

/// One estimate and its reference, both in per-minute units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPair {
    pub estimate: f64,
    pub reference: f64,
    pub roi: String,
    pub method: Method,
    pub segment: String,
}

impl MeasurementPair {
    /// Bare pair for statistics that ignore the labels.
    pub fn new(estimate: f64, reference: f64) -> Self {
        MeasurementPair {
            estimate,
            reference,
            roi: String::new(),
            method: Method::RoiMean,
            segment: String::new(),
        }
    }

    pub fn difference(&self) -> f64 {
        self.estimate - self.reference
    }
}

/// Mean absolute percentage error, in percent.
pub fn mape(pairs: &[MeasurementPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Argument("MAPE of an empty pair set".into()));
    }
    let mut sum = 0.0;
    for p in pairs {
        if !(p.reference > 0.0) {
            return Err(Error::Data(format!(
                "reference {} for segment {:?} is not positive",
                p.reference, p.segment
            )));
        }
        sum += (p.estimate - p.reference).abs() / p.reference;
    }
    Ok(100.0 * sum / pairs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlandAltmanStats {
    pub bias: f64,
    pub sd: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    /// `(mean of pair, estimate - reference)` per pair.
    pub points: Vec<(f64, f64)>,
}

impl BlandAltmanStats {
    /// Points as a `mean,diff` CSV.
    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mean", "diff"])?;
        for (m, d) in &self.points {
            w.write_record([m.to_string(), d.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Bias and 95% limits of agreement, with the sample (n - 1) standard deviation.
pub fn bland_altman(pairs: &[MeasurementPair]) -> Result<BlandAltmanStats> {
    if pairs.len() < 2 {
        return Err(Error::Argument(format!(
            "Bland-Altman needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let diffs: Vec<f64> = pairs.iter().map(MeasurementPair::difference).collect();
    let bias = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - bias).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    Ok(BlandAltmanStats {
        bias,
        sd,
        loa_low: bias - 1.96 * sd,
        loa_high: bias + 1.96 * sd,
        points: pairs
            .iter()
            .map(|p| ((p.estimate + p.reference) / 2.0, p.difference()))
            .collect(),
    })
}
