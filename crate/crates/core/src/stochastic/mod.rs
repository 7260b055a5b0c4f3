//! Stochastic saliency: a pixel-wise local-level state-space model.
//!
//! Each pixel's perceived saliency `s` follows a Gaussian random walk with
//! step standard deviation `sigma_s2`, and the deterministic saliency is a
//! noisy observation of it with standard deviation `sigma_s1`. Both
//! parameters are shared by every pixel and frame.

mod em;
mod kalman;
mod smoother;

pub use em::{em_fit_saliency, log_likelihood, EmConfig, EmDiagnostics, EmIteration};
pub use kalman::{
    initial_belief, kalman_predict, kalman_update, run_filter, FilterStep, SaliencyFilter,
};
pub use smoother::{kalman_smooth, SmootherOutput};
pub(crate) use smoother::smooth_scalar;

use crate::error::{Error, Result};
use crate::map::ScalarMap;

/// Observation and process noise standard deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyParams {
    pub sigma_s1: f64,
    pub sigma_s2: f64,
}

impl Default for SaliencyParams {
    fn default() -> Self {
        Self {
            sigma_s1: 0.1,
            sigma_s2: 0.05,
        }
    }
}

impl SaliencyParams {
    pub fn new(sigma_s1: f64, sigma_s2: f64) -> Result<Self> {
        let p = Self { sigma_s1, sigma_s2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_s1 > 0.0 && self.sigma_s1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_s1 must be positive, got {}",
                self.sigma_s1
            )));
        }
        // Zero process noise is allowed for filtering (a static belief);
        // learning keeps it above the EM floor.
        if !(self.sigma_s2 >= 0.0 && self.sigma_s2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_s2 must be non-negative, got {}",
                self.sigma_s2
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn obs_var(&self) -> f64 {
        self.sigma_s1 * self.sigma_s1
    }

    #[inline]
    pub fn proc_var(&self) -> f64 {
        self.sigma_s2 * self.sigma_s2
    }
}

/// Per-pixel Gaussian belief: mean and variance maps.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMap {
    pub mean: ScalarMap,
    pub variance: ScalarMap,
}

impl GaussianMap {
    pub fn new(mean: ScalarMap, variance: ScalarMap) -> Result<Self> {
        mean.ensure_same_dims(&variance)?;
        if !mean.is_finite() || !variance.is_finite() {
            return Err(Error::Numerical("belief contains non-finite values".into()));
        }
        if variance.data().iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter("belief variances must be positive".into()));
        }
        Ok(Self { mean, variance })
    }

    pub fn width(&self) -> usize {
        self.mean.width()
    }

    pub fn height(&self) -> usize {
        self.mean.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mean.dims()
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}
