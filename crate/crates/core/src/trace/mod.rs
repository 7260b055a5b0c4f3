//! Eye traces and the two-pattern eye movement HMM.
//!
//! Hidden patterns `u(t) ∈ {0, 1}` (passive, active) emit the jump length
//! `‖x(t) − x(t−1)‖` through the shifted 2D Gaussian of the active pattern
//! and switch according to `phi`. Parameters are learned by alternating
//! Viterbi decoding with closed-form parameter updates.

mod emission;
mod learn;
mod viterbi;

pub use emission::{log_emission, radial_normalizer};
pub use learn::{
    update_params, update_params_with, viterbi_learn, viterbi_learn_segments, LearnConfig,
    LearnOutcome, MStepRule,
};
pub use viterbi::{init_patterns, objective, viterbi_decode, viterbi_decode_steps};

use crate::error::{Error, Result};

/// One gaze sample; `t` is in video frames and may be fractional when the
/// tracker runs faster than the video.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Gaze samples of one subject in frame pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeTrace {
    pub subject: String,
    pub samples: Vec<GazeSample>,
    /// Samples per second.
    pub sample_rate: f64,
}

/// Consecutive per-frame positions without gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSegment {
    pub subject: String,
    pub start_frame: i64,
    pub positions: Vec<[f64; 2]>,
}

impl TraceSegment {
    /// Jump lengths `‖x(t) − x(t−1)‖` for `t = 2..T`.
    pub fn steps(&self) -> Vec<f64> {
        self.positions
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .collect()
    }
}

impl EyeTrace {
    pub fn new(subject: impl Into<String>, samples: Vec<GazeSample>, sample_rate: f64) -> Result<Self> {
        let subject = subject.into();
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidParameter(format!(
                "trace of subject {subject}: sample times must be strictly increasing"
            )));
        }
        Ok(Self {
            subject,
            samples,
            sample_rate,
        })
    }

    /// Trace with one sample per integer frame starting at frame 0.
    pub fn from_positions(subject: impl Into<String>, positions: &[[f64; 2]], fps: f64) -> Self {
        Self {
            subject: subject.into(),
            samples: positions
                .iter()
                .enumerate()
                .map(|(k, p)| GazeSample {
                    t: k as f64,
                    x: p[0],
                    y: p[1],
                })
                .collect(),
            sample_rate: fps,
        }
    }

    /// Position per integer frame: the temporally nearest sample within
    /// half a frame, or `None` when that sample is missing, non-finite or
    /// outside `[0, width) × [0, height)`.
    pub fn per_frame(&self, width: f64, height: f64) -> Vec<(i64, Option<[f64; 2]>)> {
        let Some(first) = self.samples.first() else {
            return Vec::new();
        };
        let last = self.samples[self.samples.len() - 1];
        let k0 = (first.t - 0.5).ceil() as i64;
        let k1 = (last.t + 0.5).floor() as i64;
        let mut out = Vec::with_capacity((k1 - k0 + 1).max(0) as usize);
        let mut j = 0;
        for k in k0..=k1 {
            let kf = k as f64;
            while j + 1 < self.samples.len() && (self.samples[j + 1].t - kf).abs() < (self.samples[j].t - kf).abs() {
                j += 1;
            }
            let s = self.samples[j];
            let valid = (s.t - kf).abs() <= 0.5
                && s.x.is_finite()
                && s.y.is_finite()
                && s.x >= 0.0
                && s.x < width
                && s.y >= 0.0
                && s.y < height;
            out.push((k, valid.then_some([s.x, s.y])));
        }
        out
    }

    /// Gap-free runs of per-frame positions.
    pub fn segments(&self, width: f64, height: f64) -> Vec<TraceSegment> {
        let mut out = Vec::new();
        let mut cur: Option<TraceSegment> = None;
        for (k, p) in self.per_frame(width, height) {
            match (p, cur.as_mut()) {
                (Some(p), Some(seg)) => seg.positions.push(p),
                (Some(p), None) => {
                    cur = Some(TraceSegment {
                        subject: self.subject.clone(),
                        start_frame: k,
                        positions: vec![p],
                    })
                }
                (None, _) => out.extend(cur.take()),
            }
        }
        out.extend(cur);
        out
    }
}

/// Decoded or initial patterns of one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSequence {
    pub patterns: Vec<u8>,
}

impl PatternSequence {
    /// `(u(t)_0, u(t)_1)` indicator vector.
    pub fn indicator(&self, t: usize) -> [f64; 2] {
        if self.patterns[t] == 0 {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}
