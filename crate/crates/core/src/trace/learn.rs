use rayon::prelude::*;

use crate::attention::AttentionParams;
use crate::error::{Error, Result};
use crate::numeric::golden_max;
use crate::trace::emission::radial_normalizer;
use crate::trace::viterbi::{init_patterns, objective, viterbi_decode_steps};
use crate::trace::{EyeTrace, PatternSequence, TraceSegment};

/// How the jump-length parameters are re-estimated from decoded patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MStepRule {
    /// Label-weighted mean jump for `γ`; `σ² = Σ (d − γ_prev)² / 2n`.
    Printed,
    /// Exact maximizer of the normalized shifted-Gaussian likelihood over
    /// `(γ, σ)`, never accepting a worse value than the previous
    /// parameters.
    ExactMle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    /// Initial labeling threshold in pixels.
    pub kappa: f64,
    pub max_iters: usize,
    pub rule: MStepRule,
    /// Added to every transition count.
    pub phi_pseudocount: f64,
    pub sigma_floor: f64,
    /// Frame size in pixels; its diagonal bounds the jump length.
    pub frame_size: (f64, f64),
    /// Parameters kept by patterns that receive no frames.
    pub init: AttentionParams,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            kappa: 15.0,
            max_iters: 100,
            rule: MStepRule::ExactMle,
            phi_pseudocount: 1.0,
            sigma_floor: 0.5,
            frame_size: (640.0, 480.0),
            init: AttentionParams::default(),
        }
    }
}

impl LearnConfig {
    pub fn r_max(&self) -> f64 {
        self.frame_size.0.hypot(self.frame_size.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutcome {
    pub params: AttentionParams,
    /// Decode/update rounds performed.
    pub iterations: usize,
    /// Decoded patterns stopped changing before `max_iters`.
    pub converged: bool,
    /// Objective (log joint plus transition prior) after each update.
    pub objective: Vec<f64>,
    pub patterns: Vec<PatternSequence>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    n: [f64; 2],
    s1: [f64; 2],
    s2: [f64; 2],
    trans: [[f64; 2]; 2],
}

fn accumulate(steps: &[Vec<f64>], patterns: &[PatternSequence]) -> Stats {
    let mut st = Stats::default();
    for (d, u) in steps.iter().zip(patterns) {
        for (k, &dk) in d.iter().enumerate() {
            let (prev, cur) = (u.patterns[k] as usize, u.patterns[k + 1] as usize);
            st.n[cur] += 1.0;
            st.s1[cur] += dk;
            st.s2[cur] += dk * dk;
            st.trans[cur][prev] += 1.0;
        }
    }
    st
}

/// Log-likelihood of one pattern's jumps from sufficient statistics.
fn jump_loglik(n: f64, s1: f64, s2: f64, gamma: f64, sigma: f64, r_max: f64) -> f64 {
    let ss = (s2 - 2.0 * gamma * s1 + n * gamma * gamma).max(0.0);
    -ss / (2.0 * sigma * sigma) - n * (std::f64::consts::TAU * radial_normalizer(gamma, sigma, r_max)).ln()
}

/// Grid scan followed by golden-section refinement around the best node.
fn scan_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const NODES: usize = 32;
    let xs: Vec<f64> = (0..NODES).map(|k| lo + (hi - lo) * k as f64 / (NODES - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for k in 1..NODES {
        if vals[k] > vals[best] {
            best = k;
        }
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(NODES - 1)];
    let x = golden_max(a, b, 60, &f);
    if f(x) >= vals[best] {
        x
    } else {
        xs[best]
    }
}

fn exact_mle(n: f64, s1: f64, s2: f64, d_max: f64, floor: f64, r_max: f64) -> (f64, f64) {
    let hi_sigma = (d_max + 1.0).max(2.0 * floor).ln();
    let lo_sigma = floor.ln();
    let best_sigma = |g: f64| scan_max(lo_sigma, hi_sigma, |ls| jump_loglik(n, s1, s2, g, ls.exp(), r_max)).exp();
    let gamma = scan_max(0.0, d_max.max(1.0), |g| jump_loglik(n, s1, s2, g, best_sigma(g), r_max));
    (gamma, best_sigma(gamma))
}

/// Parameter update with the printed formulas and no transition smoothing.
pub fn update_params(segments: &[TraceSegment], patterns: &[PatternSequence], prev: &AttentionParams) -> Result<AttentionParams> {
    let config = LearnConfig {
        rule: MStepRule::Printed,
        phi_pseudocount: 0.0,
        ..Default::default()
    };
    update_params_with(segments, patterns, prev, &config)
}

pub fn update_params_with(
    segments: &[TraceSegment],
    patterns: &[PatternSequence],
    prev: &AttentionParams,
    config: &LearnConfig,
) -> Result<AttentionParams> {
    if segments.len() != patterns.len() {
        return Err(Error::InvalidParameter("one pattern sequence per segment is required".into()));
    }
    let steps: Vec<Vec<f64>> = segments.iter().map(TraceSegment::steps).collect();
    for (s, u) in steps.iter().zip(patterns) {
        if u.len() != s.len() + 1 || u.patterns.iter().any(|&p| p > 1) {
            return Err(Error::InvalidParameter("pattern sequence does not match its segment".into()));
        }
    }
    Ok(update_from_steps(&steps, patterns, prev, config))
}

fn update_from_steps(steps: &[Vec<f64>], patterns: &[PatternSequence], prev: &AttentionParams, config: &LearnConfig) -> AttentionParams {
    let st = accumulate(steps, patterns);
    let r_max = config.r_max();
    let floor = config.sigma_floor;
    let mut out = *prev;
    for i in 0..2 {
        let n = st.n[i];
        if n == 0.0 {
            continue;
        }
        match config.rule {
            MStepRule::Printed => {
                let gp = prev.gamma[i];
                let ss = (st.s2[i] - 2.0 * gp * st.s1[i] + n * gp * gp).max(0.0);
                out.gamma[i] = st.s1[i] / n;
                out.sigma[i] = (ss / (2.0 * n)).sqrt().max(floor);
            }
            MStepRule::ExactMle => {
                let d_max = steps
                    .iter()
                    .zip(patterns)
                    .flat_map(|(d, u)| d.iter().zip(&u.patterns[1..]).filter(|(_, &p)| p as usize == i).map(|(&d, _)| d))
                    .fold(0.0, f64::max);
                let (g, s) = exact_mle(n, st.s1[i], st.s2[i], d_max, floor, r_max);
                let new = jump_loglik(n, st.s1[i], st.s2[i], g, s, r_max);
                let old = jump_loglik(n, st.s1[i], st.s2[i], prev.gamma[i], prev.sigma[i].max(floor), r_max);
                if new >= old {
                    out.gamma[i] = g;
                    out.sigma[i] = s;
                }
            }
        }
    }
    let c = config.phi_pseudocount;
    for j in 0..2 {
        let total = st.trans[0][j] + st.trans[1][j] + 2.0 * c;
        if total > 0.0 {
            out.phi[0][j] = (st.trans[0][j] + c) / total;
            out.phi[1][j] = 1.0 - out.phi[0][j];
        } else {
            out.phi[0][j] = 0.5;
            out.phi[1][j] = 0.5;
        }
    }
    out
}

fn prior(params: &AttentionParams, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    params.phi.iter().flatten().map(|p| c * p.ln()).sum()
}

/// Viterbi learning over every gap-free segment of every trace.
pub fn viterbi_learn(traces: &[EyeTrace], config: &LearnConfig) -> Result<LearnOutcome> {
    let (w, h) = config.frame_size;
    let segments: Vec<TraceSegment> = traces
        .iter()
        .flat_map(|t| t.segments(w, h))
        .filter(|s| s.positions.len() >= 2)
        .collect();
    viterbi_learn_segments(&segments, config)
}

pub fn viterbi_learn_segments(segments: &[TraceSegment], config: &LearnConfig) -> Result<LearnOutcome> {
    if segments.is_empty() {
        return Err(Error::InsufficientData("no trace segment has at least 2 valid frames".into()));
    }
    config.init.validate()?;
    let r_max = config.r_max();
    let steps: Vec<Vec<f64>> = segments.iter().map(TraceSegment::steps).collect();
    let mut patterns = segments
        .iter()
        .map(|s| init_patterns(s, config.kappa))
        .collect::<Result<Vec<_>>>()?;
    let mut params = update_from_steps(&steps, &patterns, &config.init, config);
    let score = |u: &[PatternSequence], p: &AttentionParams| {
        steps.iter().zip(u).map(|(d, u)| objective(d, u, p, r_max)).sum::<f64>() + prior(p, config.phi_pseudocount)
    };
    let mut trace_obj = vec![score(&patterns, &params)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        iterations += 1;
        let decoded: Vec<PatternSequence> = steps
            .par_iter()
            .map(|d| viterbi_decode_steps(d, &params, r_max))
            .collect();
        if decoded == patterns {
            converged = true;
            break;
        }
        patterns = decoded;
        params = update_from_steps(&steps, &patterns, &params, config);
        trace_obj.push(score(&patterns, &params));
    }
    Ok(LearnOutcome {
        params,
        iterations,
        converged,
        objective: trace_obj,
        patterns,
    })
}
