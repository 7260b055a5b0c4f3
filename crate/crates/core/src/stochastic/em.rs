//! EM estimation of `(sigma_s1, sigma_s2)` from a saliency video.
//!
//! Pixels are independent given the shared parameters, so the E step runs
//! the filter and smoother over each pixel's time series and only the
//! sufficient statistics of the M step are kept.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::stochastic::kalman::{predict_scalar, update_scalar};
use crate::stochastic::smoother::smooth_scalar;
use crate::stochastic::SaliencyParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Stop when the relative L∞ change of `(sigma_s1, sigma_s2)` drops
    /// below this.
    pub tol: f64,
    /// Lower bound on both standard deviations.
    pub floor: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-4,
            floor: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmIteration {
    /// Parameters used by this iteration's E step.
    pub params: SaliencyParams,
    /// Observed-data log-likelihood under `params`, from the innovations.
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmDiagnostics {
    pub iterations: Vec<EmIteration>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct PixelStats {
    obs_sum: f64,
    proc_sum: f64,
    log_lik: f64,
}

fn pixel_pass(series: &[f64], params: &SaliencyParams, buf: &mut Vec<(f64, f64)>) -> PixelStats {
    let (r, q) = (params.obs_var(), params.proc_var());
    let n = series.len();
    buf.clear();
    let (mut mean, mut var) = (series[0], r);
    let mut log_lik = 0.0;
    for &y in series {
        let pv = predict_scalar(var, q);
        let s = pv + r;
        let e = y - mean;
        log_lik += -0.5 * ((2.0 * PI * s).ln() + e * e / s);
        (mean, var) = update_scalar(mean, pv, y, r);
        buf.push((mean, var));
    }

    let mut obs_sum = 0.0;
    let mut proc_sum = 0.0;
    let (mut next_mean, mut next_var) = buf[n - 1];
    obs_sum += (series[n - 1] - next_mean).powi(2) + next_var;
    for t in (0..n - 1).rev() {
        let (fm, fv) = buf[t];
        let (sm, sv, _) = smooth_scalar(fm, fv, next_mean, next_var, q);
        obs_sum += (series[t] - sm).powi(2) + sv;
        // Term for the step t -> t+1, using the filtered variance at t.
        proc_sum += (next_mean - sm).powi(2) + sv + (q - fv) / (q + fv) * next_var;
        next_mean = sm;
        next_var = sv;
    }
    PixelStats {
        obs_sum,
        proc_sum,
        log_lik,
    }
}

/// One E step plus M step. Returns the new parameters (unclamped) and the
/// log-likelihood of `params`.
fn em_step(pixels: &[Vec<f64>], params: &SaliencyParams) -> (f64, f64, f64) {
    let stats: Vec<PixelStats> = pixels
        .par_iter()
        .map_init(Vec::new, |buf, s| pixel_pass(s, params, buf))
        .collect();
    let t_len = pixels[0].len() as f64;
    let n_pix = pixels.len() as f64;
    let mut total = PixelStats::default();
    for s in &stats {
        total.obs_sum += s.obs_sum;
        total.proc_sum += s.proc_sum;
        total.log_lik += s.log_lik;
    }
    let s1_sq = total.obs_sum / (n_pix * t_len);
    let s2_sq = total.proc_sum / (n_pix * (t_len - 1.0));
    (s1_sq, s2_sq, total.log_lik)
}

/// Fits the shared noise parameters by EM, starting from `init`.
pub fn em_fit_saliency(
    observations: &[ScalarMap],
    init: SaliencyParams,
    config: &EmConfig,
) -> Result<(SaliencyParams, EmDiagnostics)> {
    if observations.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "EM needs at least 2 frames, got {}",
            observations.len()
        )));
    }
    if !(init.sigma_s1 > 0.0 && init.sigma_s2 > 0.0) {
        return Err(Error::InvalidParameter(
            "EM initial parameters must be positive".into(),
        ));
    }
    if config.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    for o in &observations[1..] {
        observations[0].ensure_same_dims(o)?;
        if !o.is_finite() {
            return Err(Error::Numerical("observation contains non-finite values".into()));
        }
    }

    let n_pix = observations[0].len();
    let pixels: Vec<Vec<f64>> = (0..n_pix)
        .map(|i| observations.iter().map(|o| o.data()[i]).collect())
        .collect();

    let mut params = init;
    let mut iterations = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iters {
        let (s1_sq, s2_sq, log_lik) = em_step(&pixels, &params);
        iterations.push(EmIteration {
            params,
            log_likelihood: log_lik,
        });
        let next = SaliencyParams {
            sigma_s1: s1_sq.sqrt().max(config.floor),
            sigma_s2: s2_sq.sqrt().max(config.floor),
        };
        if !(next.sigma_s1.is_finite() && next.sigma_s2.is_finite()) {
            return Err(Error::Numerical("EM produced non-finite parameters".into()));
        }
        let change = ((next.sigma_s1 - params.sigma_s1).abs() / params.sigma_s1)
            .max((next.sigma_s2 - params.sigma_s2).abs() / params.sigma_s2);
        params = next;
        if change < config.tol {
            converged = true;
            break;
        }
    }
    Ok((
        params,
        EmDiagnostics {
            iterations,
            converged,
        },
    ))
}

/// Observed-data log-likelihood of a saliency video under `params`.
pub fn log_likelihood(observations: &[ScalarMap], params: &SaliencyParams) -> f64 {
    let n_pix = observations[0].len();
    let mut buf = Vec::new();
    (0..n_pix)
        .map(|i| {
            let s: Vec<f64> = observations.iter().map(|o| o.data()[i]).collect();
            pixel_pass(&s, params, &mut buf).log_lik
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_or_bad_input() {
        let one = vec![ScalarMap::zeros(2, 2)];
        assert!(em_fit_saliency(&one, SaliencyParams::default(), &EmConfig::default()).is_err());
        let two = vec![ScalarMap::zeros(2, 2); 2];
        let bad = SaliencyParams {
            sigma_s1: 0.0,
            sigma_s2: 0.1,
        };
        assert!(em_fit_saliency(&two, bad, &EmConfig::default()).is_err());
    }

    #[test]
    fn infinite_tolerance_runs_one_iteration() {
        let obs: Vec<ScalarMap> = (0..10).map(|t| ScalarMap::filled(2, 2, t as f64 / 10.0)).collect();
        let cfg = EmConfig {
            tol: f64::INFINITY,
            ..Default::default()
        };
        let (_, diag) = em_fit_saliency(&obs, SaliencyParams::new(0.3, 0.3).unwrap(), &cfg).unwrap();
        assert_eq!(diag.iterations.len(), 1);
        assert!(diag.converged);
    }

    #[test]
    fn constant_observations_drive_process_noise_to_floor() {
        let obs = vec![ScalarMap::filled(3, 3, 0.5); 60];
        let cfg = EmConfig {
            max_iters: 500,
            ..Default::default()
        };
        let (p, _) = em_fit_saliency(&obs, SaliencyParams::new(0.3, 0.3).unwrap(), &cfg).unwrap();
        assert!(p.sigma_s2 < 0.01, "{p:?}");
        assert!(p.sigma_s2 >= cfg.floor);
        assert!(p.sigma_s1 >= cfg.floor);
    }

    #[test]
    fn pixel_pass_likelihood_matches_map_filter() {
        use crate::stochastic::run_filter;
        let p = SaliencyParams::new(0.2, 0.1).unwrap();
        let obs: Vec<ScalarMap> = (0..7)
            .map(|t| ScalarMap::filled(1, 1, ((t * 37) % 11) as f64 / 10.0))
            .collect();
        let hist = run_filter(&obs, &p).unwrap();
        let mut expect = 0.0;
        for (o, h) in obs.iter().zip(&hist) {
            let s = h.predicted.variance.data()[0] + p.obs_var();
            let e = o.data()[0] - h.predicted.mean.data()[0];
            expect += -0.5 * ((2.0 * PI * s).ln() + e * e / s);
        }
        assert!((log_likelihood(&obs, &p) - expect).abs() < 1e-12);
    }
}
