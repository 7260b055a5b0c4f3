use std::f64::consts::PI;

use crate::numeric::norm_cdf;

/// `∫₀^R r · exp{−(r − γ)² / 2σ²} dr` in closed form.
pub fn radial_normalizer(gamma: f64, sigma: f64, r_max: f64) -> f64 {
    let s2 = sigma * sigma;
    let tail = (-(gamma * gamma) / (2.0 * s2)).exp() - (-(r_max - gamma).powi(2) / (2.0 * s2)).exp();
    let body = norm_cdf((r_max - gamma) / sigma) - norm_cdf(-gamma / sigma);
    s2 * tail + gamma * sigma * (2.0 * PI).sqrt() * body
}

/// Log density of a displacement of length `d` under the shifted 2D
/// Gaussian restricted to the disc of radius `r_max`.
///
/// This is the planar density; the radial density of `d` differs by the
/// factor `2πd`, which is the same for both patterns.
pub fn log_emission(d: f64, gamma: f64, sigma: f64, r_max: f64) -> f64 {
    let z = (d - gamma) / sigma;
    -0.5 * z * z - (2.0 * PI * radial_normalizer(gamma, sigma, r_max)).ln()
}
