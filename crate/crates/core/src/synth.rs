//! Synthetic corpora drawn from the generative model: frames with salient
//! blobs, local-level saliency streams, pattern-switching gaze walks and
//! gaze samples guided by probability-of-maximum maps.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::attention::{
    max_probability_map, propagate_pattern, propagate_position, sample_shifted_gaussian, AttentionParams, MaxProbMap,
    QuadratureConfig,
};
use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::rng::substream;
use crate::rng::derive_seed;
use crate::saliency::{compute_saliency_map, EffectiveScales, Frame, PyramidConfig, RetinalConfig};
use crate::stochastic::{SaliencyFilter, SaliencyParams};
use crate::trace::EyeTrace;

/// Frames with bright coloured discs on a gray background.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub blobs: usize,
    /// Disc radius in pixels.
    pub blob_radius: f64,
    /// Discs jump to new random places every this many frames.
    pub relocate_every: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            width: 160,
            height: 120,
            frames: 30,
            blobs: 1,
            blob_radius: 6.0,
            relocate_every: 10,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width < 8 || self.height < 8 {
            return Err(Error::InvalidParameter("synthetic frames must be at least 8x8".into()));
        }
        if self.relocate_every == 0 {
            return Err(Error::InvalidParameter("relocate_every must be at least 1".into()));
        }
        if !(self.blob_radius > 0.0) {
            return Err(Error::InvalidParameter("blob_radius must be positive".into()));
        }
        Ok(())
    }

    /// Disc centres in effect at frame `t`.
    pub fn blob_centers(&self, t: usize) -> Vec<[f64; 2]> {
        let epoch = (t / self.relocate_every) as u64;
        let mut rng = substream(self.seed, epoch, 0);
        let r = self.blob_radius;
        (0..self.blobs)
            .map(|_| {
                [
                    rng.random_range(r..(self.width as f64 - r).max(r + 1.0)),
                    rng.random_range(r..(self.height as f64 - r).max(r + 1.0)),
                ]
            })
            .collect()
    }

    /// Frame `t` (0-based).
    pub fn frame(&self, t: usize) -> Result<Frame> {
        let centers = self.blob_centers(t);
        let r2 = self.blob_radius * self.blob_radius;
        let inside = |x: usize, y: usize| {
            centers.iter().any(|c| {
                let (dx, dy) = (x as f64 + 0.5 - c[0], y as f64 + 0.5 - c[1]);
                dx * dx + dy * dy <= r2
            })
        };
        let plane = |on: f64| ScalarMap::from_fn(self.width, self.height, |x, y| if inside(x, y) { on } else { 0.5 });
        Frame::new(t as u32, plane(1.0), plane(0.1), plane(0.1))
    }

    pub fn frames(&self) -> Result<Vec<Frame>> {
        self.validate()?;
        (0..self.frames).map(|t| self.frame(t)).collect()
    }
}

/// Observations of the per-pixel local-level model: a Gaussian random
/// walk started uniformly in `[0, 1]`, observed with Gaussian noise.
pub fn simulate_local_level(width: usize, height: usize, frames: usize, params: &SaliencyParams, seed: u64) -> Result<Vec<ScalarMap>> {
    params.validate()?;
    let obs = Normal::new(0.0, params.sigma_s1).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let step = Normal::new(0.0, params.sigma_s2).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = vec![ScalarMap::zeros(width, height); frames];
    for i in 0..width * height {
        let mut rng = substream(seed, 0, i as u64);
        let mut s: f64 = rng.random();
        for (t, map) in out.iter_mut().enumerate() {
            if t > 0 {
                s += step.sample(&mut rng);
            }
            map.data_mut()[i] = s + obs.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Gaze walk from the pattern HMM without borders: positions and patterns
/// for `len` frames starting at `start` in the stationary pattern law.
pub fn sample_pattern_walk(params: &AttentionParams, len: usize, start: [f64; 2], seed: u64) -> Result<(Vec<[f64; 2]>, Vec<u8>)> {
    params.validate()?;
    let mut rng = substream(seed, 0, 0);
    let mut u = u8::from(rng.random::<f64>() >= params.stationary()[0]);
    let mut x = start;
    let mut positions = Vec::with_capacity(len);
    let mut patterns = Vec::with_capacity(len);
    for t in 0..len {
        if t > 0 {
            u = propagate_pattern(u, params, &mut rng);
            let k = u as usize;
            x = sample_shifted_gaussian(x, params.gamma[k], params.sigma[k], &mut rng);
        }
        positions.push(x);
        patterns.push(u);
    }
    Ok((positions, patterns))
}

/// Candidates drawn per frame when sampling gaze.
const GAZE_CANDIDATES: usize = 64;

/// One subject's gaze on the grid of `maxprob`: each frame a jump is drawn
/// from the pattern model and accepted in proportion to the
/// probability-of-maximum at its landing point (sampling-importance
/// resampling over a batch of candidates). The first position is drawn
/// from the first map alone, uniformly within the chosen cell.
pub fn sample_gaze(maxprob: &[MaxProbMap], params: &AttentionParams, seed: u64) -> Result<Vec<[f64; 2]>> {
    params.validate()?;
    let Some(first) = maxprob.first() else {
        return Ok(Vec::new());
    };
    let (w, h) = first.probs.dims();
    let bounds = (w as f64, h as f64);
    let mut out = Vec::with_capacity(maxprob.len());
    let mut x = [0.0, 0.0];
    let mut u = 0u8;
    for (t, m) in maxprob.iter().enumerate() {
        let mut rng = substream(seed, t as u64, 0);
        if t == 0 {
            let total = m.probs.sum();
            let mut r = rng.random::<f64>() * total;
            let cell = m
                .probs
                .data()
                .iter()
                .position(|&p| {
                    r -= p;
                    r < 0.0
                })
                .unwrap_or(w * h - 1);
            x = [
                (cell % w) as f64 + rng.random::<f64>(),
                (cell / w) as f64 + rng.random::<f64>(),
            ];
            u = u8::from(rng.random::<f64>() >= params.stationary()[0]);
            out.push(x);
            continue;
        }
        let mut cands = Vec::with_capacity(GAZE_CANDIDATES);
        let mut weights = Vec::with_capacity(GAZE_CANDIDATES);
        for _ in 0..GAZE_CANDIDATES {
            let p = propagate_pattern(u, params, &mut rng);
            let c = propagate_position(x, p, params, bounds, &mut rng);
            weights.push(m.at(c[0], c[1]));
            cands.push((p, c));
        }
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            weights
                .iter()
                .position(|&wk| {
                    r -= wk;
                    r < 0.0
                })
                .unwrap_or(GAZE_CANDIDATES - 1)
        } else {
            0
        };
        (u, x) = cands[pick];
        out.push(x);
    }
    Ok(out)
}

/// Probability-of-maximum maps of a frame sequence on the working grid,
/// together with the grid-to-pixel factor.
pub fn model_maxprob_maps(
    frames: &[Frame],
    params_s: &SaliencyParams,
    pyramid: &PyramidConfig,
    retinal: &RetinalConfig,
    quad: &QuadratureConfig,
) -> Result<(Vec<MaxProbMap>, usize)> {
    let Some(first) = frames.first() else {
        return Err(Error::InsufficientData("no frames".into()));
    };
    let factor = 1 << EffectiveScales::for_size(pyramid, first.width(), first.height())?.working_scale;
    let mut filter = SaliencyFilter::new(*params_s)?;
    let mut out = Vec::with_capacity(frames.len());
    for (k, f) in frames.iter().enumerate() {
        let prev = k.checked_sub(1).map(|j| &frames[j]);
        let s = compute_saliency_map(f, prev, pyramid, retinal)?;
        let belief = filter.step(&s)?.updated;
        out.push(max_probability_map(&belief, quad)?.0);
    }
    Ok((out, factor))
}

/// Gaze traces of `subjects` simulated viewers in frame pixels. `params_x`
/// is in frame pixels; sampling runs on the grid of `maps` and positions
/// are scaled by `factor` and clipped to the `width × height` frame.
#[allow(clippy::too_many_arguments)]
pub fn sample_subjects(
    maps: &[MaxProbMap],
    factor: usize,
    params_x: &AttentionParams,
    width: usize,
    height: usize,
    subjects: usize,
    seed: u64,
    fps: f64,
) -> Result<Vec<EyeTrace>> {
    let grid = params_x.scaled(1.0 / factor as f64);
    let f = factor as f64;
    let (xmax, ymax) = (width as f64 - 1e-6, height as f64 - 1e-6);
    (0..subjects)
        .map(|s| {
            let g = sample_gaze(maps, &grid, derive_seed(seed, u64::MAX, s as u64))?;
            let px: Vec<[f64; 2]> = g.iter().map(|p| [(p[0] * f).min(xmax), (p[1] * f).min(ymax)]).collect();
            Ok(EyeTrace::from_positions(format!("s{s:02}"), &px, fps))
        })
        .collect()
}
