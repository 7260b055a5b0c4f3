use rand::Rng;
use rayon::prelude::*;

use crate::attention::motion::{propagate_pattern, propagate_position};
use crate::attention::{AttentionParams, MaxProbMap};
use crate::error::{Error, Result};
use crate::numeric::tree_sum;
use crate::rng::substream;

/// Attended position (grid cells) and eye movement pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeState {
    pub x: f64,
    pub y: f64,
    pub pattern: u8,
}

/// Weighted particle approximation of the eye focusing state posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub states: Vec<EyeState>,
    pub weights: Vec<f64>,
}

/// Substream index reserved for frame-level draws such as the resampling
/// offset.
const FRAME_STREAM: u64 = u64::MAX;

impl ParticleSet {
    /// Positions uniform over the grid, patterns from the stationary
    /// distribution of `phi`, equal weights.
    pub fn initialize(n: usize, width: usize, height: usize, params: &AttentionParams, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("particle count must be at least 1".into()));
        }
        let pi0 = params.stationary()[0];
        let states = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, 0, i as u64);
                let x = rng.random::<f64>() * width as f64;
                let y = rng.random::<f64>() * height as f64;
                let pattern = if rng.random::<f64>() < pi0 { 0 } else { 1 };
                EyeState { x, y, pattern }
            })
            .collect();
        Ok(Self {
            states,
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Effective sample size `1 / Σ w²`.
    pub fn ess(&self) -> f64 {
        let sq: Vec<f64> = self.weights.iter().map(|w| w * w).collect();
        1.0 / tree_sum(&sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// Every weight vanished and was reset to uniform.
    pub degenerate: bool,
    /// Effective sample size after the weight update, before resampling.
    pub ess: f64,
    pub resampled: bool,
}

/// Multiplies each weight by the bilinearly interpolated likelihood at the
/// particle and renormalizes. Returns `true` when every weight vanished, in
/// which case the weights are reset to uniform.
pub fn reweight(particles: &mut ParticleSet, maxprob: &MaxProbMap) -> bool {
    for (w, s) in particles.weights.iter_mut().zip(&particles.states) {
        *w *= maxprob.at(s.x, s.y);
    }
    let total = tree_sum(&particles.weights);
    let n = particles.len() as f64;
    if total > 0.0 && total.is_finite() {
        particles.weights.iter_mut().for_each(|w| *w /= total);
        false
    } else {
        particles.weights.iter_mut().for_each(|w| *w = 1.0 / n);
        true
    }
}

/// Systematic resampling with offset `u ∈ [0, 1)`.
pub fn resample_systematic(particles: &ParticleSet, u: f64) -> ParticleSet {
    let n = particles.len();
    let mut states = Vec::with_capacity(n);
    let mut cum = 0.0;
    let mut j = 0;
    for k in 0..n {
        let target = (k as f64 + u) / n as f64;
        while j < n - 1 && cum + particles.weights[j] <= target {
            cum += particles.weights[j];
            j += 1;
        }
        states.push(particles.states[j]);
    }
    ParticleSet {
        states,
        weights: vec![1.0 / n as f64; n],
    }
}

/// One filter step for frame `frame`: propagate pattern then position,
/// reweight by `maxprob`, optionally resample.
///
/// Particle `n` draws from the substream `(seed, frame, n)`, so the result
/// does not depend on the thread count.
pub fn step_particle_filter(
    particles: &ParticleSet,
    maxprob: &MaxProbMap,
    params: &AttentionParams,
    seed: u64,
    frame: u64,
    resample_now: bool,
) -> Result<(ParticleSet, StepDiagnostics)> {
    params.validate()?;
    let bounds = (maxprob.probs.width() as f64, maxprob.probs.height() as f64);
    let states: Vec<EyeState> = particles
        .states
        .par_iter()
        .enumerate()
        .map(|(n, s)| {
            let mut rng = substream(seed, frame, n as u64);
            let pattern = propagate_pattern(s.pattern, params, &mut rng);
            let [x, y] = propagate_position([s.x, s.y], pattern, params, bounds, &mut rng);
            EyeState { x, y, pattern }
        })
        .collect();
    let mut next = ParticleSet {
        states,
        weights: particles.weights.clone(),
    };
    let degenerate = reweight(&mut next, maxprob);
    let ess = next.ess();
    if resample_now {
        let u = substream(seed, frame, FRAME_STREAM).random::<f64>();
        next = resample_systematic(&next, u);
    }
    Ok((
        next,
        StepDiagnostics {
            degenerate,
            ess,
            resampled: resample_now,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::ScalarMap;

    fn set(n: usize) -> ParticleSet {
        ParticleSet::initialize(n, 8, 6, &AttentionParams::default(), 9).unwrap()
    }

    #[test]
    fn initialization_is_uniform_and_in_bounds() {
        let p = set(500);
        assert!((tree_sum(&p.weights) - 1.0).abs() < 1e-12);
        assert!(p.states.iter().all(|s| s.x >= 0.0 && s.x < 8.0 && s.y >= 0.0 && s.y < 6.0));
        assert!(ParticleSet::initialize(0, 8, 6, &AttentionParams::default(), 9).is_err());
    }

    #[test]
    fn uniform_likelihood_keeps_weights() {
        let mut p = set(50);
        p.weights = (1..=50).map(|k| k as f64).collect();
        let total: f64 = p.weights.iter().sum();
        let before: Vec<f64> = p.weights.iter().map(|w| w / total).collect();
        assert!(!reweight(&mut p, &MaxProbMap::uniform(8, 6)));
        for (a, b) in p.weights.iter().zip(&before) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_likelihood_concentrates_on_support() {
        let mut probs = ScalarMap::zeros(8, 6);
        probs.set(3, 2, 1.0);
        let m = MaxProbMap { probs };
        let mut p = set(2000);
        reweight(&mut p, &m);
        for (s, w) in p.states.iter().zip(&p.weights) {
            let inside = (s.x - 3.5).abs() < 1.0 && (s.y - 2.5).abs() < 1.0;
            if !inside {
                assert_eq!(*w, 0.0);
            }
        }
        assert!((tree_sum(&p.weights) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_weights_reset() {
        let mut p = set(10);
        let m = MaxProbMap {
            probs: ScalarMap::zeros(8, 6),
        };
        assert!(reweight(&mut p, &m));
        assert!(p.weights.iter().all(|&w| w == 0.1));
    }

    #[test]
    fn systematic_resampling_counts() {
        let p = ParticleSet {
            states: (0..4)
                .map(|k| EyeState {
                    x: k as f64,
                    y: 0.0,
                    pattern: 0,
                })
                .collect(),
            weights: vec![0.5, 0.25, 0.25, 0.0],
        };
        let r = resample_systematic(&p, 0.5);
        let xs: Vec<f64> = r.states.iter().map(|s| s.x).collect();
        assert_eq!(xs, vec![0.0, 0.0, 1.0, 2.0]);
        assert!(r.weights.iter().all(|&w| w == 0.25));
    }

    #[test]
    fn step_is_deterministic_and_valid() {
        let p = set(300);
        let m = MaxProbMap {
            probs: ScalarMap::from_fn(8, 6, |x, y| (1 + x + y) as f64 / 288.0),
        };
        let params = AttentionParams::default().scaled(0.1);
        let (a, da) = step_particle_filter(&p, &m, &params, 4, 2, false).unwrap();
        let (b, _) = step_particle_filter(&p, &m, &params, 4, 2, false).unwrap();
        assert_eq!(a, b);
        assert!(!da.degenerate);
        assert!((tree_sum(&a.weights) - 1.0).abs() < 1e-9);
        assert!(a.weights.iter().all(|&w| w >= 0.0));
        let (c, _) = step_particle_filter(&p, &m, &params, 4, 2, true).unwrap();
        assert!(c.weights.iter().all(|&w| (w - 1.0 / 300.0).abs() < 1e-15));
    }

    #[test]
    fn pattern_marginal_reaches_stationary() {
        let params = AttentionParams {
            gamma: [0.5, 1.0],
            sigma: [0.5, 0.5],
            phi: [[0.9, 0.3], [0.1, 0.7]],
        };
        let mut p = ParticleSet::initialize(1000, 8, 6, &params, 3).unwrap();
        for s in &mut p.states {
            s.pattern = 0;
        }
        let m = MaxProbMap::uniform(8, 6);
        let mut ones = 0usize;
        let mut total = 0usize;
        for frame in 1..=100 {
            p = step_particle_filter(&p, &m, &params, 3, frame, false).unwrap().0;
            if frame > 20 {
                ones += p.states.iter().filter(|s| s.pattern == 1).count();
                total += p.len();
            }
        }
        let f = ones as f64 / total as f64;
        assert!((f - params.stationary()[1]).abs() < 0.02, "{f}");
    }
}
