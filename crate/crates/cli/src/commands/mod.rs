mod evaluate;
mod learn;
mod predict;
mod synth;

use std::path::{Path, PathBuf};

use satt_core::io::{read_run_config, saliency_params_to_string, attention_params_to_string};
use satt_core::saliency::EffectiveScales;
use satt_core::{AttentionParams, PyramidConfig, RetinalConfig, RunConfig, SaliencyParams};

use crate::ConfigError;

pub use evaluate::evaluate;
pub use learn::{learn_saliency, learn_traces};
pub use predict::predict;
pub use synth::synth;

fn create_dir(dir: &Path) -> satt_core::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| satt_core::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

/// `<out>` with its extension replaced by `suffix`, e.g. `theta.em.json`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

/// Run configuration from an optional file; parse failures are
/// configuration errors.
fn load_run_config(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    let Some(p) = path else {
        return Ok(RunConfig::default());
    };
    read_run_config(p).map_err(|e| match e {
        satt_core::Error::Io { .. } => e.into(),
        other => ConfigError::in_file(p, other.to_string()).into(),
    })
}

/// Pyramid and retinal settings used by every command.
fn saliency_config() -> (PyramidConfig, RetinalConfig) {
    (PyramidConfig::default(), RetinalConfig::default())
}

/// Downsampling factor from frame pixels to the working grid.
fn working_factor(pyramid: &PyramidConfig, width: usize, height: usize) -> satt_core::Result<usize> {
    Ok(1 << EffectiveScales::for_size(pyramid, width, height)?.working_scale)
}

/// Configuration snapshot in TOML: everything the outputs depend on
/// besides the input files.
fn snapshot(
    pyramid: &PyramidConfig,
    retinal: &RetinalConfig,
    params_s: &SaliencyParams,
    params_x: &AttentionParams,
    run: &RunConfig,
) -> anyhow::Result<String> {
    Ok(format!(
        "[pyramid]\nnum_scales = {}\ncenter_scales = {:?}\nsurround_deltas = {:?}\nretinal_sigma_fraction = {:?}\n\n\
         [saliency]\n{}\n[attention]\n{}\n[run]\n{}",
        pyramid.num_scales,
        pyramid.center_scales,
        pyramid.surround_deltas,
        retinal.sigma_fraction,
        saliency_params_to_string(params_s),
        attention_params_to_string(params_x),
        toml::to_string(run)?,
    ))
}
