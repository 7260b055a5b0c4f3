//! Shared fixtures for the benchmarks.

use satt_core::stochastic::{initial_belief, kalman_predict, kalman_update};
use satt_core::synth::SynthConfig;
use satt_core::{Frame, GaussianMap, SaliencyParams, ScalarMap};

/// Smooth bumpy map in `[0, 1]`.
pub fn bumpy_map(width: usize, height: usize, phase: f64) -> ScalarMap {
    ScalarMap::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / width as f64, y as f64 / height as f64);
        0.5 + 0.25 * (9.0 * u + phase).sin() * (7.0 * v - phase).cos() + 0.2 * (23.0 * u * v).sin()
    })
}

/// Kalman belief after two observations of a bumpy map.
pub fn belief(width: usize, height: usize) -> GaussianMap {
    let p = SaliencyParams::default();
    let a = bumpy_map(width, height, 0.0);
    let b = bumpy_map(width, height, 0.3);
    let first = kalman_update(&kalman_predict(&initial_belief(&a, &p), &p), &a, &p).unwrap();
    kalman_update(&kalman_predict(&first, &p), &b, &p).unwrap()
}

/// Synthetic frames with moving discs.
pub fn frames(width: usize, height: usize, count: usize) -> Vec<Frame> {
    SynthConfig {
        width,
        height,
        frames: count,
        blobs: 3,
        blob_radius: width as f64 / 40.0,
        relocate_every: 5,
        seed: 1,
    }
    .frames()
    .unwrap()
}
