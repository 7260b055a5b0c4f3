//! Stochastic model of human visual attention.
//!
//! Four layers are stacked per video frame:
//!
//! 1. [`saliency`]: deterministic saliency maps from twelve feature channels.
//! 2. [`stochastic`]: a per-pixel Kalman filter turning saliency into a
//!    Gaussian belief over perceived saliency, plus the smoother and EM
//!    learner for its two noise parameters.
//! 3. [`trace`]: the two-state eye-movement-pattern HMM learned from gaze
//!    traces by Viterbi learning.
//! 4. [`attention`]: probability-of-maximum maps and the particle filter
//!    producing eye focusing density maps.
//!
//! [`evaluation`] scores density maps with normalized scan-path saliency,
//! [`io`] holds the file formats and [`synth`] generates synthetic corpora.

pub mod attention;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod map;
pub mod numeric;
pub mod rng;
pub mod saliency;
pub mod stochastic;
pub mod synth;
pub mod trace;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use attention::{AttentionParams, EyeState, MaxProbMap, ParticleSet, RunConfig};
pub use error::{Error, Result};
pub use map::ScalarMap;
pub use saliency::{Frame, PyramidConfig, RetinalConfig};
pub use stochastic::{GaussianMap, SaliencyParams};
pub use trace::{EyeTrace, PatternSequence};
