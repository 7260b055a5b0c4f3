//! Eye movement transition model.
//!
//! Positions jump by a displacement whose planar density is the shifted
//! Gaussian `L(x̄, γ, σ) ∝ exp{−(‖x − x̄‖ − γ)² / 2σ²}`, truncated to the
//! grid rectangle. The radial law of the jump length `r` is therefore
//! `∝ r · exp{−(r − γ)² / 2σ²}` on `r ≥ 0`.
//!
//! The Metropolis chain uses the untruncated law itself as an independence
//! proposal: proposals inside the rectangle are always accepted and those
//! outside always rejected, so the chain's stationary law is exactly the
//! truncated density.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::attention::AttentionParams;

/// Metropolis steps per particle and frame.
pub const METROPOLIS_STEPS: usize = 10;

/// Unnormalized radial density `r · exp{−(r − γ)² / 2σ²}` for `r ≥ 0`.
pub fn shifted_gaussian_radial_density(r: f64, gamma: f64, sigma: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let d = (r - gamma) / sigma;
    r * (-0.5 * d * d).exp()
}

/// Exact draw of the jump length.
///
/// Rejection from the envelope `(|r − γ| + γ) · exp{−(r − γ)² / 2σ²}`, a
/// mixture of a two-sided Rayleigh and a Gaussian both centred at `γ`.
pub fn sample_radius<R: Rng + ?Sized>(gamma: f64, sigma: f64, rng: &mut R) -> f64 {
    let w_rayleigh = 2.0 * sigma * sigma;
    let w_normal = gamma * sigma * (2.0 * PI).sqrt();
    let p_rayleigh = w_rayleigh / (w_rayleigh + w_normal);
    loop {
        let d = if rng.random::<f64>() < p_rayleigh {
            let u: f64 = 1.0 - rng.random::<f64>();
            let mag = sigma * (-2.0 * u.ln()).sqrt();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        } else {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        };
        let r = gamma + d;
        if r <= 0.0 {
            continue;
        }
        if rng.random::<f64>() * (d.abs() + gamma) < r {
            return r;
        }
    }
}

/// Untruncated draw of `x̄ + r (cos θ, sin θ)`.
pub fn sample_shifted_gaussian<R: Rng + ?Sized>(center: [f64; 2], gamma: f64, sigma: f64, rng: &mut R) -> [f64; 2] {
    let r = sample_radius(gamma, sigma, rng);
    let theta = TAU * rng.random::<f64>();
    [center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

/// Next pattern: 0 with probability `φ(0, prev)`.
pub fn propagate_pattern<R: Rng + ?Sized>(prev: u8, params: &AttentionParams, rng: &mut R) -> u8 {
    let p0 = params.phi[0][prev as usize];
    if rng.random::<f64>() < p0 {
        0
    } else {
        1
    }
}

/// Next position from [`METROPOLIS_STEPS`] Metropolis steps started at the
/// previous position.
pub fn propagate_position<R: Rng + ?Sized>(
    prev: [f64; 2],
    pattern: u8,
    params: &AttentionParams,
    bounds: (f64, f64),
    rng: &mut R,
) -> [f64; 2] {
    let (gamma, sigma) = (params.gamma[pattern as usize], params.sigma[pattern as usize]);
    let mut cur = prev;
    for _ in 0..METROPOLIS_STEPS {
        let p = sample_shifted_gaussian(prev, gamma, sigma, rng);
        if p[0] >= 0.0 && p[0] < bounds.0 && p[1] >= 0.0 && p[1] < bounds.1 {
            cur = p;
        }
    }
    cur
}
