//! Disk-backed forward history for smoothing long sequences.
//!
//! Filtered beliefs are written frame by frame as map files with the
//! `MEAN`/`VARI` roles, then read back in reverse by the smoother so that
//! only two frames are held in memory. Values are stored as f32.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::smap::{read_smap, write_smap, MapRole, SmapFile};
use crate::map::ScalarMap;
use crate::stochastic::{GaussianMap, SaliencyParams};

fn spill_path(dir: &Path, t: usize, role: MapRole) -> PathBuf {
    let suffix = match role {
        MapRole::Mean => "mean",
        _ => "var",
    };
    dir.join(format!("filtered_{t:06}_{suffix}.smap"))
}

/// Appends filtered beliefs to a spill directory.
#[derive(Debug)]
pub struct SpillWriter {
    dir: PathBuf,
    config_hash: u64,
    len: usize,
}

impl SpillWriter {
    pub fn create(dir: impl Into<PathBuf>, config_hash: u64) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            config_hash,
            len: 0,
        })
    }

    pub fn push(&mut self, belief: &GaussianMap) -> Result<()> {
        let t = self.len;
        for (role, map) in [(MapRole::Mean, &belief.mean), (MapRole::Variance, &belief.variance)] {
            let file = SmapFile::new(t as u32, role, self.config_hash, map.clone());
            write_smap(&spill_path(&self.dir, t, role), &file)?;
        }
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn load(dir: &Path, t: usize) -> Result<(ScalarMap, ScalarMap)> {
    let m = read_smap(&spill_path(dir, t, MapRole::Mean))?;
    let v = read_smap(&spill_path(dir, t, MapRole::Variance))?;
    if m.role != MapRole::Mean || v.role != MapRole::Variance {
        return Err(Error::format(dir, format!("spill frame {t} has wrong roles")));
    }
    m.map.ensure_same_dims(&v.map)?;
    Ok((m.map, v.map))
}

/// Runs the backward smoothing pass over `len` spilled frames, calling
/// `visit(t, mean, variance, lag)` for `t = len−1` down to `0`. `lag` is
/// `σ_s2² σ²(t|t) / (σ_s2² + σ²(t|t))` and absent for the last frame.
pub fn kalman_smooth_spilled(
    dir: &Path,
    len: usize,
    params: &SaliencyParams,
    mut visit: impl FnMut(usize, &ScalarMap, &ScalarMap, Option<&ScalarMap>) -> Result<()>,
) -> Result<()> {
    if len == 0 {
        return Err(Error::InsufficientData("smoother needs at least one frame".into()));
    }
    let q = params.proc_var();
    if !(q > 0.0) {
        return Err(Error::InvalidParameter("smoothing needs a positive process noise".into()));
    }
    let (mut next_mean, mut next_var) = load(dir, len - 1)?;
    visit(len - 1, &next_mean, &next_var, None)?;
    for t in (0..len - 1).rev() {
        let (fm, fv) = load(dir, t)?;
        fm.ensure_same_dims(&next_mean)?;
        let mut mean = fm.clone();
        let mut var = fv.clone();
        let mut lag = fv.clone();
        for i in 0..fm.len() {
            let (m, v, sq) = crate::stochastic::smooth_scalar(
                fm.data()[i],
                fv.data()[i],
                next_mean.data()[i],
                next_var.data()[i],
                q,
            );
            mean.data_mut()[i] = m;
            var.data_mut()[i] = v;
            lag.data_mut()[i] = sq;
        }
        visit(t, &mean, &var, Some(&lag))?;
        next_mean = mean;
        next_var = var;
    }
    Ok(())
}
