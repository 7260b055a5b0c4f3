//! Binary map files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes  | content                                   |
//! |--------|-------------------------------------------|
//! | 0..4   | magic `SMAP`                              |
//! | 4..8   | width (u32)                               |
//! | 8..12  | height (u32)                              |
//! | 12..16 | frame index (u32)                         |
//! | 16..20 | role tag, see [`MapRole`]                 |
//! | 20..24 | format version (u32)                      |
//! | 24..32 | configuration hash (u64)                  |
//! | 32..   | `width × height` f32 values, row-major    |

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{read_file, write_file};
use crate::map::ScalarMap;

pub const SMAP_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"SMAP";
const HEADER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapRole {
    Saliency,
    Mean,
    Variance,
    Density,
}

impl MapRole {
    pub fn tag(self) -> [u8; 4] {
        *match self {
            MapRole::Saliency => b"SALM",
            MapRole::Mean => b"MEAN",
            MapRole::Variance => b"VARI",
            MapRole::Density => b"EFDM",
        }
    }

    pub fn from_tag(tag: &[u8]) -> Option<Self> {
        match tag {
            b"SALM" => Some(MapRole::Saliency),
            b"MEAN" => Some(MapRole::Mean),
            b"VARI" => Some(MapRole::Variance),
            b"EFDM" => Some(MapRole::Density),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmapFile {
    pub frame: u32,
    pub role: MapRole,
    pub version: u32,
    pub config_hash: u64,
    pub map: ScalarMap,
}

impl SmapFile {
    pub fn new(frame: u32, role: MapRole, config_hash: u64, map: ScalarMap) -> Self {
        Self {
            frame,
            role,
            version: SMAP_VERSION,
            config_hash,
            map,
        }
    }
}

pub fn encode_smap(file: &SmapFile) -> Vec<u8> {
    let (w, h) = file.map.dims();
    let mut out = Vec::with_capacity(HEADER + 4 * w * h);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&file.frame.to_le_bytes());
    out.extend_from_slice(&file.role.tag());
    out.extend_from_slice(&file.version.to_le_bytes());
    out.extend_from_slice(&file.config_hash.to_le_bytes());
    for &v in file.map.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

/// Parses a map file; `path` is only used in error messages.
pub fn decode_smap(bytes: &[u8], path: &Path) -> Result<SmapFile> {
    if bytes.len() < HEADER {
        return Err(Error::format(path, "truncated header"));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::format(path, "missing SMAP magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let (w, h, frame) = (u32_at(4) as usize, u32_at(8) as usize, u32_at(12));
    let role = MapRole::from_tag(&bytes[16..20]).ok_or_else(|| Error::format(path, "unknown map role"))?;
    let version = u32_at(20);
    if version != SMAP_VERSION {
        return Err(Error::format(path, format!("unsupported format version {version}")));
    }
    let config_hash = u64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER));
    if expected != Some(bytes.len()) || w == 0 || h == 0 {
        return Err(Error::format(
            path,
            format!("{}x{} map does not match file size {}", w, h, bytes.len()),
        ));
    }
    let data = bytes[HEADER..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(SmapFile {
        frame,
        role,
        version,
        config_hash,
        map: ScalarMap::from_vec(w, h, data)?,
    })
}

pub fn write_smap(path: &Path, file: &SmapFile) -> Result<()> {
    write_file(path, &encode_smap(file))
}

pub fn read_smap(path: &Path) -> Result<SmapFile> {
    decode_smap(&read_file(path)?, path)
}

/// All `.smap` files of a directory, ordered by frame index.
pub fn read_smap_dir(dir: &Path) -> Result<Vec<SmapFile>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "smap") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(Error::format(dir, "no .smap files found"));
    }
    paths.sort();
    let mut files = paths.iter().map(|p| read_smap(p)).collect::<Result<Vec<_>>>()?;
    files.sort_by_key(|f| f.frame);
    if let Some(k) = (1..files.len()).find(|&k| files[k].frame == files[k - 1].frame) {
        return Err(Error::format(dir, format!("duplicate map for frame {}", files[k].frame)));
    }
    Ok(files)
}

/// 8-bit binary PGM scaled so that the frame maximum maps to 255.
pub fn write_pgm_preview(path: &Path, map: &ScalarMap) -> Result<()> {
    let (w, h) = map.dims();
    let max = map.max();
    let k = if max > 0.0 { 255.0 / max } else { 0.0 };
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(map.data().iter().map(|&v| (v.max(0.0) * k).round().min(255.0) as u8));
    write_file(path, &out)
}
