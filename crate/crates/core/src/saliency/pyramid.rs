//! Dyadic Gaussian pyramids and center-surround differences.

use crate::error::{Error, Result};
use crate::map::ScalarMap;

/// Scales used by the center-surround stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PyramidConfig {
    pub num_scales: usize,
    pub center_scales: Vec<usize>,
    pub surround_deltas: Vec<usize>,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        Self {
            num_scales: 9,
            center_scales: vec![2, 3, 4],
            surround_deltas: vec![3, 4],
        }
    }
}

impl PyramidConfig {
    pub fn validate(&self) -> Result<()> {
        let (Some(&c), Some(&s)) = (
            self.center_scales.iter().max(),
            self.surround_deltas.iter().max(),
        ) else {
            return Err(Error::InvalidParameter(
                "center and surround scale sets must be non-empty".into(),
            ));
        };
        if self.surround_deltas.contains(&0) {
            return Err(Error::InvalidParameter("surround deltas must be positive".into()));
        }
        if c + s >= self.num_scales {
            return Err(Error::InvalidParameter(format!(
                "max center {c} + max delta {s} must be below num_scales {}",
                self.num_scales
            )));
        }
        Ok(())
    }

    /// All `(center, surround)` scale pairs in center-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &c in &self.center_scales {
            for &d in &self.surround_deltas {
                out.push((c, c + d));
            }
        }
        out
    }
}

/// Scales actually used for a frame of a given size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveScales {
    pub num_scales: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Pyramid level whose resolution all maps are resampled to.
    pub working_scale: usize,
}

impl EffectiveScales {
    /// Reduces the pyramid depth for frames too small to support the full
    /// configuration.
    ///
    /// The deepest usable level is `floor(log2(min(W, H)))`. Pairs whose
    /// surround exceeds it are dropped; if none survive, a single pair is
    /// synthesized from the deepest available levels.
    pub fn for_size(config: &PyramidConfig, width: usize, height: usize) -> Result<Self> {
        config.validate()?;
        let min_side = width.min(height);
        if min_side < 2 {
            return Err(Error::PyramidDepth(format!(
                "a {width}x{height} frame supports fewer than 2 scales"
            )));
        }
        let max_level = (usize::BITS - 1 - min_side.leading_zeros()) as usize;
        let num_scales = config.num_scales.min(max_level + 1);
        let top = num_scales - 1;
        let mut pairs: Vec<_> = config.pairs().into_iter().filter(|&(_, s)| s <= top).collect();
        if pairs.is_empty() {
            let c = config.center_scales.iter().copied().min().unwrap_or(0).min(top - 1);
            pairs.push((c, top));
        }
        let working_scale = pairs.iter().map(|p| p.0).min().unwrap_or(0);
        Ok(Self {
            num_scales,
            pairs,
            working_scale,
        })
    }
}

/// Side length of pyramid level `level` for a base side `n`.
pub fn level_size(n: usize, level: usize) -> usize {
    let mut n = n;
    for _ in 0..level {
        n = n.div_ceil(2);
    }
    n
}

/// Working-resolution dimensions for a frame.
pub fn working_dims(config: &PyramidConfig, width: usize, height: usize) -> Result<(usize, usize)> {
    let eff = EffectiveScales::for_size(config, width, height)?;
    Ok((
        level_size(width, eff.working_scale),
        level_size(height, eff.working_scale),
    ))
}

const BLUR_W: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Source indices of the five taps around each output position, with
/// replicated borders.
fn taps(n: usize, outputs: impl Iterator<Item = usize>) -> Vec<[usize; 5]> {
    outputs
        .map(|c| std::array::from_fn(|k| (c + k).saturating_sub(2).min(n - 1)))
        .collect()
}

/// Separable `[1 4 6 4 1]/16` blur evaluated at columns `xs` and rows `ys`.
///
/// Computed as `x + Σ w_k (x_k − x)` so that constant regions stay exactly
/// constant.
fn blur_at(map: &ScalarMap, xs: &[[usize; 5]], xc: &[usize], ys: &[[usize; 5]], yc: &[usize]) -> ScalarMap {
    let (w, h) = map.dims();
    let src = map.data();
    let ow = xs.len();
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut tmp[y * ow..(y + 1) * ow];
        for ((o, t), &c) in out.iter_mut().zip(xs).zip(xc) {
            let c = row[c];
            let mut acc = 0.0;
            for k in 0..5 {
                acc += BLUR_W[k] * (row[t[k]] - c);
            }
            *o = c + acc;
        }
    }
    let mut out = vec![0.0; ow * ys.len()];
    for (j, (t, &c)) in ys.iter().zip(yc).enumerate() {
        let dst = &mut out[j * ow..(j + 1) * ow];
        let center = &tmp[c * ow..(c + 1) * ow];
        let rows: [&[f64]; 5] = std::array::from_fn(|k| &tmp[t[k] * ow..(t[k] + 1) * ow]);
        for (x, d) in dst.iter_mut().enumerate() {
            let c = center[x];
            let mut acc = 0.0;
            for k in 0..5 {
                acc += BLUR_W[k] * (rows[k][x] - c);
            }
            *d = c + acc;
        }
    }
    ScalarMap::from_vec(ow, ys.len(), out).expect("sized above")
}

/// Separable `[1 4 6 4 1]/16` blur with replicated borders.
///
/// Computed as `x + Σ w_k (x_k − x)` so that constant regions stay exactly
/// constant.
pub fn blur5(map: &ScalarMap) -> ScalarMap {
    let (w, h) = map.dims();
    let xc: Vec<usize> = (0..w).collect();
    let yc: Vec<usize> = (0..h).collect();
    blur_at(map, &taps(w, 0..w), &xc, &taps(h, 0..h), &yc)
}

/// [`blur5`] followed by keeping every second row and column, computing
/// only the kept samples.
pub fn blur_decimate(map: &ScalarMap) -> ScalarMap {
    let (w, h) = map.dims();
    let xc: Vec<usize> = (0..w).step_by(2).collect();
    let yc: Vec<usize> = (0..h).step_by(2).collect();
    blur_at(map, &taps(w, xc.iter().copied()), &xc, &taps(h, yc.iter().copied()), &yc)
}

/// Gaussian pyramid: level 0 is the input, level `k+1` is level `k`
/// blurred and decimated by two.
pub fn gaussian_pyramid(base: &ScalarMap, num_scales: usize) -> Vec<ScalarMap> {
    let mut levels = Vec::with_capacity(num_scales);
    levels.push(base.clone());
    for _ in 1..num_scales {
        let next = blur_decimate(levels.last().expect("non-empty"));
        levels.push(next);
    }
    levels
}

/// Center-surround difference maps `|P[c] − P[s]|`, both resampled to the
/// resolution of the working scale.
pub fn center_surround(pyramid: &[ScalarMap], pairs: &[(usize, usize)], working_scale: usize) -> Result<Vec<ScalarMap>> {
    let Some(base) = pyramid.get(working_scale) else {
        return Err(Error::PyramidDepth(format!(
            "working scale {working_scale} not present in a {}-level pyramid",
            pyramid.len()
        )));
    };
    let (w, h) = base.dims();
    pairs
        .iter()
        .map(|&(c, s)| {
            if s >= pyramid.len() {
                return Err(Error::PyramidDepth(format!(
                    "pair ({c}, {s}) needs {} levels, pyramid has {}",
                    s + 1,
                    pyramid.len()
                )));
            }
            let center = pyramid[c].resize_bilinear(w, h);
            let surround = pyramid[s].resize_bilinear(w, h);
            center.zip_with(&surround, |a, b| (a - b).abs())
        })
        .collect()
}

/// Center-surround maps for a configuration applied to a full-depth pyramid.
pub fn center_surround_config(pyramid: &[ScalarMap], config: &PyramidConfig) -> Result<Vec<ScalarMap>> {
    config.validate()?;
    if pyramid.len() < config.num_scales {
        return Err(Error::PyramidDepth(format!(
            "configuration needs {} levels, pyramid has {}",
            config.num_scales,
            pyramid.len()
        )));
    }
    let working = *config.center_scales.iter().min().expect("validated");
    center_surround(pyramid, &config.pairs(), working)
}
