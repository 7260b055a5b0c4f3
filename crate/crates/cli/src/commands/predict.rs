use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use satt_core::attention::AttentionRunner;
use satt_core::io::{
    read_attention_params, read_saliency_params, write_pgm_preview, write_smap, FrameSource, MapRole, SmapFile,
};
use satt_core::saliency::compute_saliency_map;
use satt_core::{AttentionParams, Error, Frame, ScalarMap};

use super::{create_dir, load_run_config, saliency_config, snapshot, working_factor};
use crate::{ConfigError, Manifest, PredictArgs};

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Loads frame `k` and checks it against the sequence size.
fn load_frame(source: &FrameSource, k: usize, dims: (usize, usize)) -> satt_core::Result<Frame> {
    let f = source.load(k)?;
    if f.dims() != dims {
        return Err(Error::Format {
            path: source.path(k).to_path_buf(),
            message: format!("frame is {}x{}, expected {}x{}", f.width(), f.height(), dims.0, dims.1),
        });
    }
    Ok(f)
}

pub fn predict(a: &PredictArgs) -> Result<Manifest> {
    let start = Instant::now();
    let params_s = a
        .saliency_params
        .as_deref()
        .map(read_saliency_params)
        .transpose()?
        .unwrap_or_default();
    let params_x = a
        .attention_params
        .as_deref()
        .map(read_attention_params)
        .transpose()?
        .unwrap_or_default();
    let mut config = load_run_config(a.config.as_deref())?;
    if let Some(n) = a.particles {
        config.n_particles = n;
    }
    if let Some(s) = a.seed {
        config.rng_seed = s;
    }
    config.validate().map_err(|e| ConfigError::new(e.to_string()))?;

    let source = FrameSource::open(&a.frames)?;
    let first = source.load(0)?;
    let dims = first.dims();
    let (pyramid, retinal) = saliency_config();
    let factor = working_factor(&pyramid, dims.0, dims.1)?;

    let mut manifest = Manifest::new("predict", snapshot(&pyramid, &retinal, &params_s, &params_x, &config)?);
    manifest.inputs.push(a.frames.clone());
    manifest.inputs.extend(a.saliency_params.iter().cloned());
    manifest.inputs.extend(a.attention_params.iter().cloned());
    manifest.inputs.extend(a.config.iter().cloned());
    manifest.rng_seed = Some(config.rng_seed);
    let hash = manifest.hash();
    create_dir(&a.out)?;

    let grid_params: AttentionParams = params_x.scaled(1.0 / factor as f64);
    let mut runner = AttentionRunner::new(params_s, grid_params, config)?;
    let saliency = |frame: &Frame, prev: Option<&Frame>| -> satt_core::Result<(ScalarMap, f64)> {
        let t = Instant::now();
        let s = compute_saliency_map(frame, prev, &pyramid, &retinal)?;
        Ok((s, ms(t)))
    };

    let (s0, t0) = saliency(&first, None)?;
    manifest.add_time("saliency", t0);
    let mut current = (first, s0);
    let n = source.len();
    for k in 0..n {
        let (frame, sal) = &current;
        // The next frame's saliency overlaps this frame's attention step.
        let (next, report) = rayon::join(
            || -> satt_core::Result<Option<(Frame, ScalarMap, f64)>> {
                if k + 1 == n {
                    return Ok(None);
                }
                let f = load_frame(&source, k + 1, dims)?;
                let (s, t) = saliency(&f, Some(frame))?;
                Ok(Some((f, s, t)))
            },
            || runner.step(sal),
        );
        let report = report?;
        manifest.add_time("kalman", report.timings.kalman_ms);
        manifest.add_time("maxprob", report.timings.maxprob_ms);
        manifest.add_time("particles", report.timings.particles_ms);

        let t = Instant::now();
        let density = report.density.upsample_mass_preserving(factor, dims.0, dims.1);
        manifest.add_time("density", report.timings.density_ms + ms(t));
        if !density.is_finite() {
            return Err(Error::Numerical(format!("density of frame {} is not finite", frame.index)).into());
        }

        let t = Instant::now();
        write_output(&a.out, &format!("density_{:06}.smap", frame.index), &mut manifest, |p| {
            write_smap(p, &SmapFile::new(frame.index, MapRole::Density, hash, density.clone()))
        })?;
        if a.write_saliency {
            write_output(&a.out, &format!("saliency_{:06}.smap", frame.index), &mut manifest, |p| {
                write_smap(p, &SmapFile::new(frame.index, MapRole::Saliency, hash, sal.clone()))
            })?;
        }
        if a.preview {
            write_output(&a.out, &format!("density_{:06}.pgm", frame.index), &mut manifest, |p| {
                write_pgm_preview(p, &density)
            })?;
        }
        manifest.add_time("write", ms(t));
        manifest.frames += 1;

        if let Some((f, s, t)) = next? {
            manifest.add_time("saliency", t);
            current = (f, s);
        }
    }
    manifest.finish_timings();
    manifest.total_seconds = start.elapsed().as_secs_f64();
    manifest.write(&a.out.join("manifest.json"))?;
    Ok(manifest)
}

fn write_output(
    dir: &Path,
    name: &str,
    manifest: &mut Manifest,
    write: impl FnOnce(&Path) -> satt_core::Result<()>,
) -> satt_core::Result<()> {
    let path = dir.join(name);
    write(&path)?;
    manifest.outputs.push(path);
    Ok(())
}
