use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::stochastic::kalman::FilterStep;
use crate::stochastic::SaliencyParams;

/// Backward-pass quantities for `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherOutput {
    /// `ŝ(t|T)`.
    pub means: Vec<ScalarMap>,
    /// `σ_s²(t|T)`.
    pub variances: Vec<ScalarMap>,
    /// `σ_sq²(t|t) = σ_s2² σ_s²(t|t) / (σ_s2² + σ_s²(t|t))` for `t = 1..T−1`.
    pub lag_variances: Vec<ScalarMap>,
}

/// One backward step for a single pixel.
///
/// Returns `(ŝ(t|T), σ²(t|T), σ_sq²(t|t))` from the filtered moments at
/// `t` and the smoothed moments at `t + 1`.
#[inline]
pub(crate) fn smooth_scalar(filt_mean: f64, filt_var: f64, next_mean: f64, next_var: f64, proc_var: f64) -> (f64, f64, f64) {
    let sq = proc_var * filt_var / (proc_var + filt_var);
    let gain = sq / proc_var;
    let mean = sq / filt_var * filt_mean + gain * next_mean;
    let var = sq + gain * gain * next_var;
    (mean, var, sq)
}

/// Fixed-interval smoother over a complete forward history.
pub fn kalman_smooth(history: &[FilterStep], params: &SaliencyParams) -> Result<SmootherOutput> {
    let Some(last) = history.last() else {
        return Err(Error::InsufficientData("smoother needs at least one filter step".into()));
    };
    if !(params.proc_var() > 0.0) {
        return Err(Error::InvalidParameter(
            "smoothing needs a positive process noise".into(),
        ));
    }
    let t_len = history.len();
    let (w, h) = last.updated.dims();
    let q = params.proc_var();

    let mut means = vec![ScalarMap::zeros(w, h); t_len];
    let mut variances = vec![ScalarMap::zeros(w, h); t_len];
    let mut lag_variances = vec![ScalarMap::zeros(w, h); t_len - 1];
    means[t_len - 1] = last.updated.mean.clone();
    variances[t_len - 1] = last.updated.variance.clone();

    for t in (0..t_len - 1).rev() {
        let filt = &history[t].updated;
        filt.mean.ensure_same_dims(&means[t + 1])?;
        for i in 0..w * h {
            let (m, v, sq) = smooth_scalar(
                filt.mean.data()[i],
                filt.variance.data()[i],
                means[t + 1].data()[i],
                variances[t + 1].data()[i],
                q,
            );
            means[t].data_mut()[i] = m;
            variances[t].data_mut()[i] = v;
            lag_variances[t].data_mut()[i] = sq;
        }
    }
    Ok(SmootherOutput {
        means,
        variances,
        lag_variances,
    })
}
