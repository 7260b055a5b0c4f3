use std::time::Instant;

use anyhow::Result;
use satt_core::io::{
    attention_params_to_string, write_attention_params, write_frame_png, write_saliency_params, write_traces_csv,
};
use satt_core::synth::{model_maxprob_maps, sample_subjects, SynthConfig};
use satt_core::{AttentionParams, Error, RunConfig, SaliencyParams};

use super::{create_dir, saliency_config};
use crate::{ConfigError, Manifest, SynthArgs};

/// Video frame rate of synthetic traces.
const FPS: f64 = 30.0;

pub fn synth(a: &SynthArgs) -> Result<Manifest> {
    let start = Instant::now();
    let cfg = SynthConfig {
        width: a.width,
        height: a.height,
        frames: a.frames,
        blobs: a.blobs,
        blob_radius: a.width.min(a.height) as f64 / 20.0,
        relocate_every: a.relocate_every,
        seed: a.seed,
    };
    cfg.validate().map_err(|e| ConfigError::new(e.to_string()))?;
    if a.frames == 0 {
        return Err(ConfigError::new("frames must be at least 1").into());
    }
    // Ground truth: default eye movement statistics scaled to the frame.
    let params_s = SaliencyParams::default();
    let params_x = AttentionParams::default().scaled(a.width.min(a.height) as f64 / 480.0);
    let run = RunConfig {
        rng_seed: a.seed,
        ..Default::default()
    };
    let snapshot = format!(
        "width = {}\nheight = {}\nframes = {}\nblobs = {}\nblob_radius = {:?}\nrelocate_every = {}\nsubjects = {}\nseed = {}\n\n[attention]\n{}",
        cfg.width,
        cfg.height,
        cfg.frames,
        cfg.blobs,
        cfg.blob_radius,
        cfg.relocate_every,
        a.subjects,
        a.seed,
        attention_params_to_string(&params_x)
    );
    let mut manifest = Manifest::new("synth", snapshot);
    manifest.rng_seed = Some(a.seed);

    let frames_dir = a.out.join("frames");
    create_dir(&frames_dir)?;
    let frames = cfg.frames()?;
    for f in &frames {
        let path = frames_dir.join(format!("frame_{:06}.png", f.index));
        write_frame_png(&path, f)?;
        manifest.outputs.push(path);
    }
    manifest.frames = frames.len();

    let t = Instant::now();
    let (pyramid, retinal) = saliency_config();
    let (maps, factor) = model_maxprob_maps(&frames, &params_s, &pyramid, &retinal, &run.quadrature())?;
    let traces = sample_subjects(&maps, factor, &params_x, a.width, a.height, a.subjects, a.seed, FPS)?;
    manifest.add_time("gaze", t.elapsed().as_secs_f64() * 1e3);

    let traces_path = a.out.join("traces.csv");
    write_traces_csv(&traces_path, &traces)?;
    let ps = a.out.join("params_s.toml");
    write_saliency_params(&ps, &params_s)?;
    let px = a.out.join("params_x.toml");
    write_attention_params(&px, &params_x)?;
    let rc = a.out.join("config.toml");
    std::fs::write(&rc, toml::to_string(&run)?).map_err(|e| Error::Io {
        path: rc.clone(),
        source: e,
    })?;
    manifest.outputs.extend([traces_path, ps, px, rc]);

    manifest.finish_timings();
    manifest.total_seconds = start.elapsed().as_secs_f64();
    manifest.write(&a.out.join("manifest.json"))?;
    Ok(manifest)
}
