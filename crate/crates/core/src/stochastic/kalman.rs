use crate::error::Result;
use crate::map::ScalarMap;
use crate::stochastic::{GaussianMap, SaliencyParams};

#[inline]
pub(crate) fn predict_scalar(var: f64, proc_var: f64) -> f64 {
    var + proc_var
}

/// Returns the posterior `(mean, variance)` of one pixel.
#[inline]
pub(crate) fn update_scalar(mean: f64, var: f64, obs: f64, obs_var: f64) -> (f64, f64) {
    let denom = obs_var + var;
    (
        obs_var / denom * mean + var / denom * obs,
        obs_var * var / denom,
    )
}

/// Belief before the first frame: centred on the first observation with
/// the observation variance.
pub fn initial_belief(first: &ScalarMap, params: &SaliencyParams) -> GaussianMap {
    GaussianMap {
        mean: first.clone(),
        variance: ScalarMap::filled(first.width(), first.height(), params.obs_var()),
    }
}

/// Estimation step: mean carried over, variance grows by `sigma_s2²`.
pub fn kalman_predict(prior: &GaussianMap, params: &SaliencyParams) -> GaussianMap {
    let q = params.proc_var();
    GaussianMap {
        mean: prior.mean.clone(),
        variance: prior.variance.map(|v| predict_scalar(v, q)),
    }
}

/// Update step: precision-weighted combination of prediction and observed
/// saliency.
pub fn kalman_update(predicted: &GaussianMap, observation: &ScalarMap, params: &SaliencyParams) -> Result<GaussianMap> {
    predicted.mean.ensure_same_dims(observation)?;
    let r = params.obs_var();
    let (w, h) = observation.dims();
    let mut mean = ScalarMap::zeros(w, h);
    let mut variance = ScalarMap::zeros(w, h);
    for i in 0..observation.len() {
        let (m, v) = update_scalar(
            predicted.mean.data()[i],
            predicted.variance.data()[i],
            observation.data()[i],
            r,
        );
        mean.data_mut()[i] = m;
        variance.data_mut()[i] = v;
    }
    Ok(GaussianMap { mean, variance })
}

/// One forward step's predicted and updated beliefs.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStep {
    pub predicted: GaussianMap,
    pub updated: GaussianMap,
}

/// Streaming filter over a saliency video.
#[derive(Debug, Clone)]
pub struct SaliencyFilter {
    params: SaliencyParams,
    belief: Option<GaussianMap>,
}

impl SaliencyFilter {
    pub fn new(params: SaliencyParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            belief: None,
        })
    }

    pub fn params(&self) -> &SaliencyParams {
        &self.params
    }

    pub fn belief(&self) -> Option<&GaussianMap> {
        self.belief.as_ref()
    }

    pub fn step(&mut self, observation: &ScalarMap) -> Result<FilterStep> {
        let prior = match self.belief.take() {
            Some(b) => b,
            None => initial_belief(observation, &self.params),
        };
        let predicted = kalman_predict(&prior, &self.params);
        let updated = kalman_update(&predicted, observation, &self.params)?;
        self.belief = Some(updated.clone());
        Ok(FilterStep { predicted, updated })
    }
}

/// Filters a whole sequence and keeps every step.
pub fn run_filter(observations: &[ScalarMap], params: &SaliencyParams) -> Result<Vec<FilterStep>> {
    let mut f = SaliencyFilter::new(*params)?;
    observations.iter().map(|o| f.step(o)).collect()
}
