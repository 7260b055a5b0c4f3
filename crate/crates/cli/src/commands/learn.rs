use std::time::Instant;

use anyhow::Result;
use satt_core::io::{read_smap_dir, read_traces_csv, write_attention_params, write_saliency_params, FrameSource};
use satt_core::saliency::compute_saliency_map;
use satt_core::stochastic::{em_fit_saliency, EmConfig};
use satt_core::trace::{viterbi_learn, LearnConfig, MStepRule};
use satt_core::{Error, SaliencyParams, ScalarMap};
use serde::Serialize;

use super::{create_dir, saliency_config, sibling};
use crate::{ConfigError, LearnSaliencyArgs, LearnTracesArgs, Manifest, RuleArg};

fn ensure_parent(path: &std::path::Path) -> satt_core::Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => create_dir(p),
        _ => Ok(()),
    }
}

fn write_json(path: &std::path::Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// Saliency maps of every frame in a sequence.
fn saliency_stream(dir: &std::path::Path, manifest: &mut Manifest) -> satt_core::Result<Vec<ScalarMap>> {
    let source = FrameSource::open(dir)?;
    let (pyramid, retinal) = saliency_config();
    let mut out = Vec::with_capacity(source.len());
    let mut prev = None;
    for k in 0..source.len() {
        let t = Instant::now();
        let f = source.load(k)?;
        let s = compute_saliency_map(&f, prev.as_ref(), &pyramid, &retinal).map_err(|e| match e {
            Error::DimensionMismatch { .. } => Error::Format {
                path: source.path(k).to_path_buf(),
                message: e.to_string(),
            },
            other => other,
        })?;
        manifest.add_time("saliency", t.elapsed().as_secs_f64() * 1e3);
        out.push(s);
        prev = Some(f);
    }
    Ok(out)
}

#[derive(Serialize)]
struct EmRecord {
    iteration: usize,
    sigma_s1: f64,
    sigma_s2: f64,
    log_likelihood: f64,
}

#[derive(Serialize)]
struct EmReport {
    converged: bool,
    sigma_s1: f64,
    sigma_s2: f64,
    iterations: Vec<EmRecord>,
}

pub fn learn_saliency(a: &LearnSaliencyArgs) -> Result<Manifest> {
    let start = Instant::now();
    let init = SaliencyParams::new(a.init_sigma_s1, a.init_sigma_s2).map_err(|e| ConfigError::new(e.to_string()))?;
    let em = EmConfig {
        max_iters: a.max_iters,
        tol: a.tol,
        ..Default::default()
    };
    if em.max_iters == 0 || !(em.tol >= 0.0) {
        return Err(ConfigError::new("max_iters must be at least 1 and tol non-negative").into());
    }
    let config = format!(
        "init_sigma_s1 = {:?}\ninit_sigma_s2 = {:?}\nmax_iters = {}\ntol = {:?}\nfloor = {:?}\n",
        init.sigma_s1, init.sigma_s2, em.max_iters, em.tol, em.floor
    );
    let mut manifest = Manifest::new("learn-saliency", config);

    let maps = if let Some(dir) = &a.frames {
        manifest.inputs.push(dir.clone());
        saliency_stream(dir, &mut manifest)?
    } else {
        let dir = a.maps.as_ref().expect("clap requires frames or maps");
        manifest.inputs.push(dir.clone());
        read_smap_dir(dir)?.into_iter().map(|f| f.map).collect()
    };
    manifest.frames = maps.len();

    let t = Instant::now();
    let (params, diag) = em_fit_saliency(&maps, init, &em)?;
    manifest.add_time("em", t.elapsed().as_secs_f64() * 1e3);

    ensure_parent(&a.out)?;
    write_saliency_params(&a.out, &params)?;
    manifest.outputs.push(a.out.clone());
    let report = EmReport {
        converged: diag.converged,
        sigma_s1: params.sigma_s1,
        sigma_s2: params.sigma_s2,
        iterations: diag
            .iterations
            .iter()
            .enumerate()
            .map(|(k, it)| EmRecord {
                iteration: k + 1,
                sigma_s1: it.params.sigma_s1,
                sigma_s2: it.params.sigma_s2,
                log_likelihood: it.log_likelihood,
            })
            .collect(),
    };
    let diag_path = sibling(&a.out, "em.json");
    write_json(&diag_path, &report)?;
    manifest.outputs.push(diag_path);

    manifest.finish_timings();
    manifest.total_seconds = start.elapsed().as_secs_f64();
    manifest.write(&sibling(&a.out, "manifest.json"))?;
    Ok(manifest)
}

#[derive(Serialize)]
struct TraceLog {
    iterations: usize,
    converged: bool,
    objective: Vec<f64>,
    /// Frames decoded as passive and active.
    pattern_counts: [usize; 2],
}

pub fn learn_traces(a: &LearnTracesArgs) -> Result<Manifest> {
    let start = Instant::now();
    if !(a.kappa > 0.0) || !(a.width > 0.0 && a.height > 0.0) || !(a.fps > 0.0) {
        return Err(ConfigError::new("kappa, width, height and fps must be positive").into());
    }
    let config = LearnConfig {
        kappa: a.kappa,
        max_iters: a.max_iters,
        frame_size: (a.width, a.height),
        ..Default::default()
    };
    let config = match a.rule {
        RuleArg::Exact => config,
        RuleArg::Printed => LearnConfig {
            rule: MStepRule::Printed,
            phi_pseudocount: 0.0,
            ..config
        },
    };
    let snapshot = format!(
        "kappa = {:?}\nmax_iters = {}\nrule = \"{:?}\"\nphi_pseudocount = {:?}\nsigma_floor = {:?}\nwidth = {:?}\nheight = {:?}\nfps = {:?}\n",
        config.kappa, config.max_iters, config.rule, config.phi_pseudocount, config.sigma_floor, a.width, a.height, a.fps
    );
    let mut manifest = Manifest::new("learn-traces", snapshot);
    manifest.inputs.push(a.traces.clone());

    let traces = read_traces_csv(&a.traces, a.fps)?;
    let t = Instant::now();
    let outcome = viterbi_learn(&traces, &config)?;
    manifest.add_time("viterbi_learn", t.elapsed().as_secs_f64() * 1e3);
    manifest.frames = outcome.patterns.iter().map(|p| p.len()).sum();

    ensure_parent(&a.out)?;
    write_attention_params(&a.out, &outcome.params)?;
    manifest.outputs.push(a.out.clone());
    let mut counts = [0usize; 2];
    for p in outcome.patterns.iter().flat_map(|s| &s.patterns) {
        counts[*p as usize] += 1;
    }
    let log = TraceLog {
        iterations: outcome.iterations,
        converged: outcome.converged,
        objective: outcome.objective.clone(),
        pattern_counts: counts,
    };
    let log_path = sibling(&a.out, "log.json");
    write_json(&log_path, &log)?;
    manifest.outputs.push(log_path);

    manifest.finish_timings();
    manifest.total_seconds = start.elapsed().as_secs_f64();
    manifest.write(&sibling(&a.out, "manifest.json"))?;
    Ok(manifest)
}
