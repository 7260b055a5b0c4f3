//! File formats: binary map files, frame sources, parameter files, run
//! configuration and gaze trace CSV.

mod frames;
mod params;
mod smap;
mod spill;
mod traces;

pub use frames::{write_frame_png, FrameSource, RawHeader};
pub use params::{
    attention_params_to_string, parse_attention_params, parse_saliency_params, read_attention_params,
    read_run_config, read_saliency_params, saliency_params_to_string, write_attention_params,
    write_saliency_params, PARAMS_FORMAT_VERSION,
};
pub use smap::{
    decode_smap, encode_smap, read_smap, read_smap_dir, write_pgm_preview, write_smap, MapRole, SmapFile, SMAP_VERSION};
pub use spill::{kalman_smooth_spilled, SpillWriter};
pub use traces::{read_traces_csv, write_traces_csv};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
