//! Normalized scan-path saliency (NSS).
//!
//! A map is standardized by its pixel mean and standard deviation; the
//! score of a gaze point is the largest standardized value within a disc
//! around it, averaged over subjects.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::trace::EyeTrace;

/// Default region radius in pixels for a frame of the given size: 30 px at
/// 480 lines, scaled with the shorter side.
pub fn default_radius(width: usize, height: usize) -> f64 {
    30.0 * width.min(height) as f64 / 480.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NssValue {
    pub value: f64,
    /// The map had zero spread and the score was defined as 0.
    pub degenerate: bool,
}

/// Pixel mean and population standard deviation.
pub fn map_moments(map: &ScalarMap) -> (f64, f64) {
    let n = map.len() as f64;
    let mean = map.sum() / n;
    let var = map.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Largest value among pixels whose centres lie within `radius` of
/// `(gx, gy)`, together with the pixel containing the point.
fn region_max(map: &ScalarMap, gx: f64, gy: f64, radius: f64) -> f64 {
    let (w, h) = map.dims();
    let cx = (gx.floor().max(0.0) as usize).min(w - 1);
    let cy = (gy.floor().max(0.0) as usize).min(h - 1);
    let mut best = map.get(cx, cy);
    let r = radius.max(0.0);
    let x0 = (gx - r - 0.5).floor().max(0.0) as usize;
    let y0 = (gy - r - 0.5).floor().max(0.0) as usize;
    let x1 = ((gx + r).ceil().max(0.0) as usize).min(w - 1);
    let y1 = ((gy + r).ceil().max(0.0) as usize).min(h - 1);
    for y in y0..=y1 {
        let dy = y as f64 + 0.5 - gy;
        for x in x0..=x1 {
            let dx = x as f64 + 0.5 - gx;
            if dx * dx + dy * dy <= r * r {
                best = best.max(map.get(x, y));
            }
        }
    }
    best
}

/// NSS of one map for a set of gaze points (pixel coordinates).
pub fn nss_frame(density: &ScalarMap, gaze: &[[f64; 2]], radius: f64) -> Result<NssValue> {
    if gaze.is_empty() {
        return Err(Error::InsufficientData("NSS needs at least one gaze point".into()));
    }
    if density.is_empty() || !density.is_finite() {
        return Err(Error::Numerical("NSS needs a finite, non-empty map".into()));
    }
    let (mean, sd) = map_moments(density);
    // Rounding in the mean leaves a tiny spread on constant maps.
    if density.max() == density.min() || !(sd > 1e-12 * mean.abs()) {
        return Ok(NssValue {
            value: 0.0,
            degenerate: true,
        });
    }
    let total: f64 = gaze.iter().map(|g| (region_max(density, g[0], g[1], radius) - mean) / sd).sum();
    Ok(NssValue {
        value: total / gaze.len() as f64,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NssReport {
    pub per_frame: Vec<(i64, f64)>,
    pub mean: f64,
    /// Standard error of the mean across frames.
    pub stderr: f64,
    pub num_subjects: usize,
    pub radius: f64,
    /// Frames whose map had zero spread.
    pub degenerate_frames: usize,
}

/// Scores frame-indexed maps against traces. Only frames with a map and at
/// least one valid gaze sample count; subjects without a sample at a frame
/// are left out of that frame.
pub fn evaluate_run(densities: &[(i64, ScalarMap)], traces: &[EyeTrace], radius: f64) -> Result<NssReport> {
    let Some((_, first)) = densities.first() else {
        return Err(Error::InsufficientData("no density maps to evaluate".into()));
    };
    let (w, h) = (first.width() as f64, first.height() as f64);
    let frames: BTreeSet<i64> = densities.iter().map(|d| d.0).collect();
    let mut gaze: BTreeMap<i64, Vec<[f64; 2]>> = BTreeMap::new();
    let mut subjects = BTreeSet::new();
    for tr in traces {
        for (k, p) in tr.per_frame(w, h) {
            if let (Some(p), true) = (p, frames.contains(&k)) {
                gaze.entry(k).or_default().push(p);
                subjects.insert(tr.subject.as_str());
            }
        }
    }
    let jobs: Vec<(i64, &ScalarMap, &Vec<[f64; 2]>)> = densities
        .iter()
        .filter_map(|(k, m)| gaze.get(k).map(|g| (*k, m, g)))
        .collect();
    if jobs.is_empty() {
        return Err(Error::InsufficientData("no frame has both a density map and a gaze sample".into()));
    }
    let scored = jobs
        .par_iter()
        .map(|(k, m, g)| nss_frame(m, g, radius).map(|v| (*k, v)))
        .collect::<Result<Vec<_>>>()?;
    let per_frame: Vec<(i64, f64)> = scored.iter().map(|(k, v)| (*k, v.value)).collect();
    let n = per_frame.len() as f64;
    let mean = per_frame.iter().map(|p| p.1).sum::<f64>() / n;
    let stderr = if per_frame.len() > 1 {
        let var = per_frame.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(NssReport {
        per_frame,
        mean,
        stderr,
        num_subjects: subjects.len(),
        radius,
        degenerate_frames: scored.iter().filter(|s| s.1.degenerate).count(),
    })
}
