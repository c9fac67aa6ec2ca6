use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    bland_altman, mape, sample_segments, BlandAltmanStats, GroundTruthSeries, MeasurementPair,
    MINUTE_S,
};
use crate::error::{Error, Result};
use crate::estimator::{Method, VitalEstimate, VitalKind};

/// Sliding-window estimates for one ROI of one recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSeries {
    /// Recording identifier; pairs from the same source share segments.
    pub source: String,
    pub roi: String,
    pub kind: VitalKind,
    pub method: Method,
    pub duration_s: f64,
    pub window_s: f64,
    pub estimates: Vec<VitalEstimate>,
}

#[derive(Debug, Clone, Copy)]
pub struct EvaluationInput<'a> {
    pub series: &'a EstimateSeries,
    pub truth: &'a GroundTruthSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAgreement {
    pub method: Method,
    pub pairs: Vec<MeasurementPair>,
    pub mape: f64,
    /// Absent with fewer than two pairs.
    pub bland_altman: Option<BlandAltmanStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub vital: VitalKind,
    pub roi: String,
    /// Distinct segments with at least one paired estimate.
    pub recordings: usize,
    pub mape_method1: Option<f64>,
    pub mape_method2: Option<f64>,
    pub methods: Vec<MethodAgreement>,
}

impl ReportRow {
    pub fn method(&self, m: Method) -> Option<&MethodAgreement> {
        self.methods.iter().find(|a| a.method == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn row(&self, vital: VitalKind, roi: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.vital == vital && r.roi == roi)
    }
}

// FNV-1a, so every recording gets its own stable segment draw.
fn source_seed(seed: u64, source: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in source.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

/// Estimate whose window starts closest to `t` (earlier on ties).
fn nearest(estimates: &[VitalEstimate], t: f64) -> Option<&VitalEstimate> {
    estimates
        .iter()
        .fold(None, |best: Option<&VitalEstimate>, e| match best {
            Some(b) if (b.window_start_s - t).abs() <= (e.window_start_s - t).abs() => Some(b),
            _ => Some(e),
        })
}

fn pair_series(
    input: &EvaluationInput<'_>,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Vec<MeasurementPair> {
    let s = input.series;
    let segments = match sample_segments(
        s.duration_s,
        MINUTE_S,
        s.window_s,
        source_seed(seed, &s.source),
    ) {
        Ok(segs) => segs,
        Err(e) => {
            warnings.push(format!("{} {} {}: {e}", s.source, s.roi, s.kind));
            return Vec::new();
        }
    };
    let mut pairs = Vec::new();
    for seg in segments {
        let Some(reference) = input.truth.reference(s.kind, seg.start_s, seg.end_s) else {
            warnings.push(format!(
                "{} {} {}: no ground truth in [{:.2}, {:.2}] s, segment skipped",
                s.source, s.roi, s.kind, seg.start_s, seg.end_s
            ));
            continue;
        };
        let Some(est) = nearest(&s.estimates, seg.start_s) else {
            warnings.push(format!("{} {} {}: no estimates", s.source, s.roi, s.kind));
            break;
        };
        pairs.push(MeasurementPair {
            estimate: est.rate_per_min,
            reference,
            roi: s.roi.clone(),
            method: s.method,
            segment: format!("{}#{}", s.source, seg.minute),
        });
    }
    pairs
}

/// Pairs every recording's estimates with ground truth over sampled
/// segments and aggregates them per (vital, ROI) row.
pub fn build_report(inputs: &[EvaluationInput<'_>], seed: u64) -> Result<EvaluationReport> {
    let mut warnings = Vec::new();
    let mut groups: Vec<((VitalKind, String), Vec<MeasurementPair>)> = Vec::new();
    for input in inputs {
        let s = input.series;
        if !input.truth.has(s.kind) {
            warnings.push(format!(
                "{}: ground truth has no {} values; {} {} omitted",
                s.source,
                s.kind.unit(),
                s.roi,
                s.kind
            ));
            continue;
        }
        let pairs = pair_series(input, seed, &mut warnings);
        let key = (s.kind, s.roi.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.extend(pairs),
            None => groups.push((key, pairs)),
        }
    }
    groups.sort_by_key(|((kind, _), _)| *kind == VitalKind::RespirationRate);

    let mut rows = Vec::new();
    for ((vital, roi), pairs) in groups {
        if pairs.is_empty() {
            continue;
        }
        let mut segments: Vec<&str> = pairs.iter().map(|p| p.segment.as_str()).collect();
        segments.sort_unstable();
        segments.dedup();
        let mut methods = Vec::new();
        for m in [Method::RoiMean, Method::PixelVote] {
            let mp: Vec<MeasurementPair> =
                pairs.iter().filter(|p| p.method == m).cloned().collect();
            if mp.is_empty() {
                continue;
            }
            methods.push(MethodAgreement {
                method: m,
                mape: mape(&mp)?,
                bland_altman: bland_altman(&mp).ok(),
                pairs: mp,
            });
        }
        let pick = |m| {
            methods
                .iter()
                .find(|a: &&MethodAgreement| a.method == m)
                .map(|a| a.mape)
        };
        rows.push(ReportRow {
            vital,
            recordings: segments.len(),
            mape_method1: pick(Method::RoiMean),
            mape_method2: pick(Method::PixelVote),
            roi,
            methods,
        });
    }
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "no estimate overlaps the ground truth{}",
            warnings
                .first()
                .map(|w| format!(" ({w})"))
                .unwrap_or_default()
        )));
    }
    Ok(EvaluationReport {
        seed,
        rows,
        warnings,
    })
}

/// Scatter of pair differences against pair means with bias and limits of
/// agreement drawn as horizontal lines.
pub fn bland_altman_svg(stats: &BlandAltmanStats, title: &str) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 40.0;
    let xs = stats.points.iter().map(|p| p.0);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let ys = stats
        .points
        .iter()
        .map(|p| p.1)
        .chain([stats.loa_low, stats.loa_high]);
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    if !(x1 > x0) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for (y, label, dash) in [
        (stats.bias, "bias", ""),
        (stats.loa_high, "+1.96 SD", r#" stroke-dasharray="4 3""#),
        (stats.loa_low, "-1.96 SD", r#" stroke-dasharray="4 3""#),
    ] {
        let yy = py(y);
        let _ = writeln!(
            s,
            r#"<line x1="{M}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="gray"{dash}/><text x="{:.2}" y="{:.2}" font-size="10">{label} {y:.2}</text>"#,
            W - M,
            W - M - 70.0,
            yy - 3.0
        );
    }
    for (x, y) in &stats.points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
            px(*x),
            py(*y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">mean of pair</text>"#,
        W / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{:.2}" font-size="11" transform="rotate(-90 12 {:.2})" text-anchor="middle">estimate - reference</text>"#,
        H / 2.0,
        H / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
