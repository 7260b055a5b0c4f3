//! Deterministic saliency maps from RGB frames.
//!
//! Twelve feature channels are each expanded into a dyadic pyramid,
//! turned into center-surround difference maps at the working scale,
//! normalized by within-map competition, summed across scales into a
//! conspicuity map, normalized again, and summed across channels. A
//! centred Gaussian "retinal" weight is applied last, followed by
//! rescaling to `[0, 1]`.

pub mod channels;
pub mod frame;
pub mod normalize;
pub mod pyramid;

use rayon::prelude::*;

use crate::error::Result;
use crate::map::ScalarMap;

pub use channels::{build_feature_channels, Channel, CHANNELS, NUM_CHANNELS};
pub use frame::Frame;
pub use normalize::normalize_map;
pub use pyramid::{blur5, blur_decimate, center_surround, gaussian_pyramid, EffectiveScales, PyramidConfig};

/// Centrally weighted retinal filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetinalConfig {
    /// Gaussian standard deviation as a fraction of `min(W, H)`.
    pub sigma_fraction: f64,
}

impl Default for RetinalConfig {
    fn default() -> Self {
        Self {
            sigma_fraction: 0.4,
        }
    }
}

impl RetinalConfig {
    pub fn weight_map(&self, width: usize, height: usize) -> ScalarMap {
        let sigma = self.sigma_fraction * width.min(height) as f64;
        let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
        ScalarMap::from_fn(width, height, |x, y| {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
        })
    }
}

/// Conspicuity of one channel: normalized sum of normalized
/// center-surround maps.
fn conspicuity(channel: &ScalarMap, scales: &EffectiveScales) -> Result<ScalarMap> {
    let pyr = gaussian_pyramid(channel, scales.num_scales);
    let maps = center_surround(&pyr, &scales.pairs, scales.working_scale)?;
    let mut acc = ScalarMap::zeros(maps[0].width(), maps[0].height());
    for m in &maps {
        acc.add_assign(&normalize_map(m))?;
    }
    Ok(normalize_map(&acc))
}

/// Saliency before retinal weighting and rescaling, at working resolution.
pub fn pre_retinal_saliency(frame: &Frame, prev: Option<&Frame>, config: &PyramidConfig) -> Result<ScalarMap> {
    let scales = EffectiveScales::for_size(config, frame.width(), frame.height())?;
    let chans = build_feature_channels(frame, prev)?;
    let consp: Vec<ScalarMap> = chans
        .par_iter()
        .map(|c| conspicuity(c, &scales))
        .collect::<Result<_>>()?;
    let mut total = ScalarMap::zeros(consp[0].width(), consp[0].height());
    // Fixed channel order keeps the sum schedule-independent.
    for c in &consp {
        total.add_assign(c)?;
    }
    Ok(total)
}

/// Applies the retinal weight and rescales by the global maximum.
pub fn apply_retinal(map: &ScalarMap, retinal: &RetinalConfig) -> ScalarMap {
    let weights = retinal.weight_map(map.width(), map.height());
    let mut out = map
        .zip_with(&weights, |a, b| a * b)
        .expect("same dimensions");
    let max = out.max();
    if max > 0.0 {
        out.scale(1.0 / max);
    }
    out
}

/// Saliency map in `[0, 1]` at working resolution.
pub fn compute_saliency_map(
    frame: &Frame,
    prev: Option<&Frame>,
    config: &PyramidConfig,
    retinal: &RetinalConfig,
) -> Result<ScalarMap> {
    let raw = pre_retinal_saliency(frame, prev, config)?;
    Ok(apply_retinal(&raw, retinal))
}
