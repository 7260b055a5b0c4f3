//! Eye focusing density maps.
//!
//! The attention layer turns the per-pixel saliency belief into a
//! probability-of-maximum map, combines it with the two-pattern eye
//! movement model in a particle filter and emits the particle density.
//!
//! All positions here are in working-grid cells, where cell `(i, j)`
//! covers `[i, i+1) × [j, j+1)`. Parameters learned in frame pixels are
//! converted with [`AttentionParams::scaled`].

mod density;
mod maxprob;
mod motion;
mod particles;
mod runner;

pub use density::density_map;
pub use maxprob::{
    max_probability_map, max_probability_map_naive, max_probability_naive_cells,
    MaxProbDiagnostics, MaxProbMap, QuadratureConfig,
};
pub use motion::{
    propagate_pattern, propagate_position, sample_radius, sample_shifted_gaussian,
    shifted_gaussian_radial_density, METROPOLIS_STEPS,
};
pub use particles::{
    resample_systematic, reweight, step_particle_filter, EyeState, ParticleSet, StepDiagnostics,
};
pub use runner::{run_attention, AttentionRunner, FrameReport, RunConfig, StageTimings};

use crate::error::{Error, Result};

/// Passive (0) and active (1) eye movement pattern parameters.
///
/// `phi[i][j]` is the probability of pattern `i` at time `t` given pattern
/// `j` at `t − 1`, so every column sums to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionParams {
    pub gamma: [f64; 2],
    pub sigma: [f64; 2],
    pub phi: [[f64; 2]; 2],
}

impl Default for AttentionParams {
    fn default() -> Self {
        Self {
            gamma: [3.0, 40.0],
            sigma: [2.0, 15.0],
            phi: [[0.95, 0.2], [0.05, 0.8]],
        }
    }
}

impl AttentionParams {
    pub fn validate(&self) -> Result<()> {
        for i in 0..2 {
            if !(self.sigma[i] > 0.0) || !self.sigma[i].is_finite() {
                return Err(Error::InvalidParameter(format!("sigma_x{i} must be positive")));
            }
            if !(self.gamma[i] >= 0.0) || !self.gamma[i].is_finite() {
                return Err(Error::InvalidParameter(format!("gamma_x{i} must be non-negative")));
            }
        }
        for j in 0..2 {
            for i in 0..2 {
                if !(0.0..=1.0).contains(&self.phi[i][j]) {
                    return Err(Error::InvalidParameter(format!("phi_{i}{j} outside [0, 1]")));
                }
            }
            let col = self.phi[0][j] + self.phi[1][j];
            if (col - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "transition column {j} sums to {col}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Same model with distances multiplied by `k`, e.g. frame pixels to
    /// grid cells.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            gamma: [self.gamma[0] * k, self.gamma[1] * k],
            sigma: [self.sigma[0] * k, self.sigma[1] * k],
            phi: self.phi,
        }
    }

    /// Stationary pattern distribution `(π₀, π₁)`; uniform when the chain
    /// never switches.
    pub fn stationary(&self) -> [f64; 2] {
        let a = self.phi[1][0];
        let b = self.phi[0][1];
        if a + b <= 0.0 {
            [0.5, 0.5]
        } else {
            [b / (a + b), a / (a + b)]
        }
    }
}
