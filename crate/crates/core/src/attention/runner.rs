use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attention::{
    density_map, max_probability_map, resample_systematic, reweight, step_particle_filter,
    AttentionParams, MaxProbDiagnostics, ParticleSet, QuadratureConfig, StepDiagnostics,
};
use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::rng::substream;
use crate::stochastic::{SaliencyFilter, SaliencyParams};

/// Particle filter and output settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N", alias = "n_particles")]
    pub n_particles: usize,
    /// Resample every this many frames.
    pub resample_interval: usize,
    pub quadrature_nodes: usize,
    /// Density kernel standard deviation in grid cells.
    pub kernel_bandwidth: f64,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_particles: 2000,
            resample_interval: 1,
            quadrature_nodes: 256,
            kernel_bandwidth: 2.0,
            rng_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if self.resample_interval == 0 {
            return Err(Error::InvalidParameter("resample_interval must be at least 1".into()));
        }
        if self.quadrature_nodes < 2 {
            return Err(Error::InvalidParameter("quadrature_nodes must be at least 2".into()));
        }
        if !(self.kernel_bandwidth >= 0.0) || !self.kernel_bandwidth.is_finite() {
            return Err(Error::InvalidParameter("kernel_bandwidth must be non-negative".into()));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes: self.quadrature_nodes,
            ..Default::default()
        }
    }
}

/// Wall-clock milliseconds spent in each stage for one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub kalman_ms: f64,
    pub maxprob_ms: f64,
    pub particles_ms: f64,
    pub density_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    /// Eye focusing density on the working grid; sums to one.
    pub density: ScalarMap,
    pub maxprob: MaxProbDiagnostics,
    pub particles: StepDiagnostics,
    pub timings: StageTimings,
}

/// Streaming attention model over saliency maps on the working grid.
#[derive(Debug, Clone)]
pub struct AttentionRunner {
    filter: SaliencyFilter,
    params: AttentionParams,
    config: RunConfig,
    particles: Option<ParticleSet>,
    frame: u64,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

impl AttentionRunner {
    /// `params_x` must already be in grid cells.
    pub fn new(params_s: SaliencyParams, params_x: AttentionParams, config: RunConfig) -> Result<Self> {
        params_x.validate()?;
        config.validate()?;
        Ok(Self {
            filter: SaliencyFilter::new(params_s)?,
            params: params_x,
            config,
            particles: None,
            frame: 0,
        })
    }

    pub fn particles(&self) -> Option<&ParticleSet> {
        self.particles.as_ref()
    }

    pub fn step(&mut self, saliency: &ScalarMap) -> Result<FrameReport> {
        if !saliency.is_finite() {
            return Err(Error::Numerical("saliency map contains non-finite values".into()));
        }
        let (w, h) = saliency.dims();
        self.frame += 1;
        let seed = self.config.rng_seed;

        let t0 = Instant::now();
        let belief = self.filter.step(saliency)?.updated;
        let kalman_ms = ms(t0);

        let t0 = Instant::now();
        let (maxprob, maxprob_diag) = max_probability_map(&belief, &self.config.quadrature())?;
        let maxprob_ms = ms(t0);

        let t0 = Instant::now();
        let resample_now = self.frame.is_multiple_of(self.config.resample_interval as u64);
        let (particles, step_diag) = match self.particles.take() {
            None => {
                // First frame: no motion yet, only the likelihood update.
                let mut p = ParticleSet::initialize(self.config.n_particles, w, h, &self.params, seed)?;
                let degenerate = reweight(&mut p, &maxprob);
                let ess = p.ess();
                if resample_now {
                    let u = substream(seed, self.frame, u64::MAX).random::<f64>();
                    p = resample_systematic(&p, u);
                }
                (
                    p,
                    StepDiagnostics {
                        degenerate,
                        ess,
                        resampled: resample_now,
                    },
                )
            }
            Some(prev) => {
                if prev.states.iter().any(|s| s.x >= w as f64 || s.y >= h as f64) {
                    return Err(Error::DimensionMismatch {
                        expected: maxprob.probs.dims(),
                        actual: (w, h),
                    });
                }
                step_particle_filter(&prev, &maxprob, &self.params, seed, self.frame, resample_now)?
            }
        };
        let particles_ms = ms(t0);

        let t0 = Instant::now();
        let density = density_map(&particles, w, h, self.config.kernel_bandwidth)?;
        let density_ms = ms(t0);
        self.particles = Some(particles);

        Ok(FrameReport {
            density,
            maxprob: maxprob_diag,
            particles: step_diag,
            timings: StageTimings {
                kalman_ms,
                maxprob_ms,
                particles_ms,
                density_ms,
            },
        })
    }
}

/// Runs the model over a whole saliency stream.
pub fn run_attention(
    saliency_stream: &[ScalarMap],
    params_s: &SaliencyParams,
    params_x: &AttentionParams,
    config: &RunConfig,
) -> Result<Vec<FrameReport>> {
    if let Some(first) = saliency_stream.first() {
        for m in saliency_stream {
            first.ensure_same_dims(m)?;
        }
    }
    let mut runner = AttentionRunner::new(*params_s, *params_x, config.clone())?;
    saliency_stream.iter().map(|s| runner.step(s)).collect()
}
