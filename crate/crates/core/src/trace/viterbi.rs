use std::f64::consts::LN_2;

use crate::attention::AttentionParams;
use crate::error::{Error, Result};
use crate::trace::emission::log_emission;
use crate::trace::{PatternSequence, TraceSegment};

/// Threshold labeling: active when the jump into `t` exceeds `kappa`. The
/// first frame copies the second.
pub fn init_patterns(segment: &TraceSegment, kappa: f64) -> Result<PatternSequence> {
    if segment.positions.len() < 2 {
        return Err(Error::InsufficientData("pattern initialization needs at least 2 positions".into()));
    }
    let mut patterns: Vec<u8> = std::iter::once(0)
        .chain(segment.steps().into_iter().map(|d| u8::from(d > kappa)))
        .collect();
    patterns[0] = patterns[1];
    Ok(PatternSequence { patterns })
}

fn log_phi(params: &AttentionParams) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = params.phi[i][j].ln();
        }
    }
    out
}

/// `log p(U, X)` up to terms shared by all pattern sequences: a uniform
/// initial pattern, transitions and jump emissions.
pub fn objective(steps: &[f64], patterns: &PatternSequence, params: &AttentionParams, r_max: f64) -> f64 {
    let lp = log_phi(params);
    let mut total = -LN_2;
    for (k, &d) in steps.iter().enumerate() {
        let (prev, cur) = (patterns.patterns[k] as usize, patterns.patterns[k + 1] as usize);
        total += lp[cur][prev] + log_emission(d, params.gamma[cur], params.sigma[cur], r_max);
    }
    total
}

/// Most probable pattern sequence for the given jump lengths; ties go to
/// the passive pattern.
pub fn viterbi_decode_steps(steps: &[f64], params: &AttentionParams, r_max: f64) -> PatternSequence {
    let lp = log_phi(params);
    let n = steps.len() + 1;
    let mut back = vec![[0u8; 2]; n];
    let mut delta = [-LN_2, -LN_2];
    for (k, &d) in steps.iter().enumerate() {
        let mut next = [0.0; 2];
        for cur in 0..2 {
            let from0 = delta[0] + lp[cur][0];
            let from1 = delta[1] + lp[cur][1];
            let (best, arg) = if from1 > from0 { (from1, 1) } else { (from0, 0) };
            back[k + 1][cur] = arg;
            next[cur] = best + log_emission(d, params.gamma[cur], params.sigma[cur], r_max);
        }
        delta = next;
    }
    let mut patterns = vec![0u8; n];
    patterns[n - 1] = u8::from(delta[1] > delta[0]);
    for t in (1..n).rev() {
        patterns[t - 1] = back[t][patterns[t] as usize];
    }
    PatternSequence { patterns }
}

pub fn viterbi_decode(segment: &TraceSegment, params: &AttentionParams, r_max: f64) -> Result<PatternSequence> {
    if segment.positions.is_empty() {
        return Err(Error::InsufficientData("cannot decode an empty segment".into()));
    }
    params.validate()?;
    Ok(viterbi_decode_steps(&segment.steps(), params, r_max))
}
