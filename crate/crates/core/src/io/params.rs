//! Text parameter files (`key = value`, TOML syntax) with a format version.

use std::path::Path;

use serde::Deserialize;

use crate::attention::{AttentionParams, RunConfig};
use crate::error::{Error, Result};
use crate::io::{read_text, write_file};
use crate::stochastic::SaliencyParams;

pub const PARAMS_FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SaliencyFile {
    format_version: u32,
    sigma_s1: f64,
    sigma_s2: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttentionFile {
    format_version: u32,
    gamma_x0: f64,
    sigma_x0: f64,
    gamma_x1: f64,
    sigma_x1: f64,
    phi_00: f64,
    phi_01: f64,
    phi_10: f64,
    phi_11: f64,
}

fn check_version(v: u32, path: &Path) -> Result<()> {
    if v != PARAMS_FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported format_version {v}")));
    }
    Ok(())
}

pub fn saliency_params_to_string(p: &SaliencyParams) -> String {
    format!(
        "format_version = {PARAMS_FORMAT_VERSION}\nsigma_s1 = {:?}\nsigma_s2 = {:?}\n",
        p.sigma_s1, p.sigma_s2
    )
}

pub fn parse_saliency_params(text: &str, path: &Path) -> Result<SaliencyParams> {
    let f: SaliencyFile = toml::from_str(text).map_err(|e| Error::format(path, e.message()))?;
    check_version(f.format_version, path)?;
    SaliencyParams::new(f.sigma_s1, f.sigma_s2).map_err(|e| Error::format(path, e.to_string()))
}

pub fn attention_params_to_string(p: &AttentionParams) -> String {
    format!(
        "format_version = {PARAMS_FORMAT_VERSION}\n\
         # jump length mean/std in frame pixels; pattern 0 passive, 1 active\n\
         gamma_x0 = {:?}\nsigma_x0 = {:?}\ngamma_x1 = {:?}\nsigma_x1 = {:?}\n\
         # phi_ij = P(u(t) = i | u(t-1) = j)\n\
         phi_00 = {:?}\nphi_01 = {:?}\nphi_10 = {:?}\nphi_11 = {:?}\n",
        p.gamma[0], p.sigma[0], p.gamma[1], p.sigma[1], p.phi[0][0], p.phi[0][1], p.phi[1][0], p.phi[1][1]
    )
}

pub fn parse_attention_params(text: &str, path: &Path) -> Result<AttentionParams> {
    let f: AttentionFile = toml::from_str(text).map_err(|e| Error::format(path, e.message()))?;
    check_version(f.format_version, path)?;
    let p = AttentionParams {
        gamma: [f.gamma_x0, f.gamma_x1],
        sigma: [f.sigma_x0, f.sigma_x1],
        phi: [[f.phi_00, f.phi_01], [f.phi_10, f.phi_11]],
    };
    p.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(p)
}

pub fn read_saliency_params(path: &Path) -> Result<SaliencyParams> {
    parse_saliency_params(&read_text(path)?, path)
}

pub fn write_saliency_params(path: &Path, p: &SaliencyParams) -> Result<()> {
    write_file(path, saliency_params_to_string(p).as_bytes())
}

pub fn read_attention_params(path: &Path) -> Result<AttentionParams> {
    parse_attention_params(&read_text(path)?, path)
}

pub fn write_attention_params(path: &Path, p: &AttentionParams) -> Result<()> {
    write_file(path, attention_params_to_string(p).as_bytes())
}

pub fn read_run_config(path: &Path) -> Result<RunConfig> {
    let c: RunConfig = toml::from_str(&read_text(path)?).map_err(|e| Error::format(path, e.message()))?;
    c.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(c)
}
