//! Gaze trace CSV with header `frame,x,y,subject`.
//!
//! `frame` may be fractional for trackers faster than the video. Empty or
//! non-numeric coordinates mark invalid samples (blinks, tracker loss).

use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::{EyeTrace, GazeSample};

const COLUMNS: [&str; 4] = ["frame", "x", "y", "subject"];

fn parse_coord(s: &str) -> f64 {
    s.trim().parse().unwrap_or(f64::NAN)
}

/// Reads all subjects of a trace file in order of first appearance.
/// `fps` converts the per-frame sample spacing into a sample rate.
pub fn read_traces_csv(path: &Path, fps: f64) -> Result<Vec<EyeTrace>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let headers = rdr.headers().map_err(|e| Error::format(path, e.to_string()))?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format(path, format!("missing column `{name}`")))?;
    }
    let mut order: Vec<String> = Vec::new();
    let mut samples: Vec<Vec<GazeSample>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e.to_string()))?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let t: f64 = field(0)
            .parse()
            .map_err(|_| Error::format(path, format!("row {}: bad frame value `{}`", line + 2, field(0))))?;
        let subject = field(3).to_string();
        let slot = match order.iter().position(|s| *s == subject) {
            Some(k) => k,
            None => {
                order.push(subject);
                samples.push(Vec::new());
                order.len() - 1
            }
        };
        samples[slot].push(GazeSample {
            t,
            x: parse_coord(field(1)),
            y: parse_coord(field(2)),
        });
    }
    order
        .into_iter()
        .zip(samples)
        .map(|(subject, s)| {
            let mut dts: Vec<f64> = s.windows(2).map(|w| w[1].t - w[0].t).collect();
            dts.sort_by(f64::total_cmp);
            let rate = dts.get(dts.len() / 2).map_or(fps, |dt| fps / dt);
            EyeTrace::new(subject, s, rate).map_err(|e| Error::format(path, e.to_string()))
        })
        .collect()
}

pub fn write_traces_csv(path: &Path, traces: &[EyeTrace]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let io = |e: csv::Error| Error::format(path, e.to_string());
    w.write_record(COLUMNS).map_err(io)?;
    for tr in traces {
        for s in &tr.samples {
            let coord = |v: f64| if v.is_finite() { format!("{v:?}") } else { String::new() };
            w.write_record([format!("{:?}", s.t), coord(s.x), coord(s.y), tr.subject.clone()])
                .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
