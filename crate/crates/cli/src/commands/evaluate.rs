use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use satt_core::evaluation::{default_radius, evaluate_run};
use satt_core::io::{read_smap_dir, read_traces_csv};
use satt_core::Error;
use serde::Serialize;

use crate::{ConfigError, EvaluateArgs, Manifest};

#[derive(Serialize)]
struct Summary {
    mean: f64,
    stderr: f64,
    n_frames: usize,
    num_subjects: usize,
    radius: f64,
    degenerate_frames: usize,
    config_hash: String,
    /// Hash recorded in the density maps, when they all agree.
    density_config_hash: Option<String>,
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write(path: &std::path::Path, text: String) -> satt_core::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn evaluate(a: &EvaluateArgs) -> Result<Manifest> {
    let start = Instant::now();
    if a.radius.is_some_and(|r| !(r >= 0.0)) || !(a.fps > 0.0) {
        return Err(ConfigError::new("radius must be non-negative and fps positive").into());
    }
    let maps = read_smap_dir(&a.densities)?;
    let (w, h) = maps[0].map.dims();
    let density_hash = maps[0].config_hash;
    let density_config_hash = maps
        .iter()
        .all(|m| m.config_hash == density_hash)
        .then(|| format!("{density_hash:016x}"));
    let radius = a.radius.unwrap_or_else(|| default_radius(w, h));
    let mut manifest = Manifest::new("evaluate", format!("radius = {radius:?}\nfps = {:?}\n", a.fps));
    manifest.inputs.extend([a.densities.clone(), a.traces.clone()]);

    let traces = read_traces_csv(&a.traces, a.fps)?;
    let densities: Vec<(i64, satt_core::ScalarMap)> = maps.into_iter().map(|f| (f.frame as i64, f.map)).collect();
    let t = Instant::now();
    let report = evaluate_run(&densities, &traces, radius)?;
    manifest.frames = report.per_frame.len();
    manifest.add_time("nss", t.elapsed().as_secs_f64() * 1e3);

    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        super::create_dir(parent)?;
    }
    let mut csv = String::from("frame,nss\n");
    for (k, v) in &report.per_frame {
        writeln!(csv, "{k},{v:?}").expect("write to string");
    }
    let csv_path = with_suffix(&a.out, ".csv");
    write(&csv_path, csv)?;
    let summary = Summary {
        mean: report.mean,
        stderr: report.stderr,
        n_frames: report.per_frame.len(),
        num_subjects: report.num_subjects,
        radius: report.radius,
        degenerate_frames: report.degenerate_frames,
        config_hash: manifest.config_hash.clone(),
        density_config_hash,
    };
    let json_path = with_suffix(&a.out, ".json");
    write(&json_path, serde_json::to_string_pretty(&summary)? + "\n")?;
    manifest.outputs.extend([csv_path, json_path]);

    manifest.finish_timings();
    manifest.total_seconds = start.elapsed().as_secs_f64();
    manifest.write(&with_suffix(&a.out, ".manifest.json"))?;
    Ok(manifest)
}
