//! Frame sequences: numbered image files or a raw planar RGB file.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io::read_text;
use crate::map::ScalarMap;
use crate::saliency::Frame;

/// Sidecar of a raw planar RGB file, stored next to it as `<file>.hdr` in
/// `key = value` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHeader {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub depth: u32,
}

#[derive(Debug, Clone)]
pub enum FrameSource {
    /// `(index, path)` sorted by index.
    Images(Vec<(u32, PathBuf)>),
    Raw { path: PathBuf, header: RawHeader },
}

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "pgm", "ppm"];

/// Trailing decimal digits of a file stem.
fn trailing_index(stem: &str) -> Option<u32> {
    let start = stem.rfind(|c: char| !c.is_ascii_digit()).map_or(0, |i| i + 1);
    stem[start..].parse().ok()
}

/// Writes a frame as an 8-bit RGB PNG.
pub fn write_frame_png(path: &Path, frame: &Frame) -> Result<()> {
    let (w, h) = frame.dims();
    let to8 = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    let mut buf = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        buf.extend([to8(frame.red.data()[i]), to8(frame.green.data()[i]), to8(frame.blue.data()[i])]);
    }
    image::save_buffer(path, &buf, w as u32, h as u32, image::ExtendedColorType::Rgb8)
        .map_err(|e| Error::format(path, e.to_string()))
}

impl FrameSource {
    /// A directory of numbered images, or a raw file with its sidecar.
    pub fn open(path: &Path) -> Result<Self> {
        if path.is_dir() {
            Self::open_dir(path)
        } else {
            Self::open_raw(path)
        }
    }

    fn open_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut frames = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let ext = path
                .extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase);
            if !ext.is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.as_str())) {
                continue;
            }
            let Some(index) = path.file_stem().and_then(|s| s.to_str()).and_then(trailing_index) else {
                return Err(Error::format(&path, "frame file name has no trailing frame number"));
            };
            frames.push((index, path));
        }
        if frames.is_empty() {
            return Err(Error::format(dir, "no PNG/PGM/PPM frames found"));
        }
        frames.sort();
        if let Some(w) = frames.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::format(&w[1].1, format!("duplicate frame number {}", w[1].0)));
        }
        Ok(FrameSource::Images(frames))
    }

    fn open_raw(path: &Path) -> Result<Self> {
        let mut side = path.as_os_str().to_owned();
        side.push(".hdr");
        let side = PathBuf::from(side);
        let header: RawHeader = toml::from_str(&read_text(&side)?).map_err(|e| Error::format(&side, e.to_string()))?;
        if header.depth != 8 {
            return Err(Error::format(&side, "only 8-bit raw frames are supported"));
        }
        if header.width == 0 || header.height == 0 || header.frames == 0 {
            return Err(Error::format(&side, "raw header has a zero dimension"));
        }
        let len = std::fs::metadata(path).map_err(|e| Error::io(path, e))?.len();
        let want = (header.width * header.height * 3 * header.frames) as u64;
        if len != want {
            return Err(Error::format(path, format!("expected {want} bytes, found {len}")));
        }
        Ok(FrameSource::Raw {
            path: path.to_path_buf(),
            header,
        })
    }

    pub fn len(&self) -> usize {
        match self {
            FrameSource::Images(f) => f.len(),
            FrameSource::Raw { header, .. } => header.frames,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// File holding the `k`-th frame.
    pub fn path(&self, k: usize) -> &Path {
        match self {
            FrameSource::Images(f) => &f[k].1,
            FrameSource::Raw { path, .. } => path,
        }
    }

    /// Loads the `k`-th frame in sequence order.
    pub fn load(&self, k: usize) -> Result<Frame> {
        match self {
            FrameSource::Images(f) => {
                let (index, path) = &f[k];
                let img = image::open(path)
                    .map_err(|e| Error::format(path, e.to_string()))?
                    .to_rgb8();
                let (w, h) = img.dimensions();
                Frame::from_rgb8(*index, w as usize, h as usize, img.as_raw())
            }
            FrameSource::Raw { path, header } => {
                let plane = header.width * header.height;
                let mut buf = vec![0u8; plane * 3];
                let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
                file.seek(SeekFrom::Start((k * plane * 3) as u64))
                    .and_then(|_| file.read_exact(&mut buf))
                    .map_err(|e| Error::io(path, e))?;
                let to_map = |c: usize| {
                    ScalarMap::from_vec(
                        header.width,
                        header.height,
                        buf[c * plane..(c + 1) * plane].iter().map(|&b| b as f64 / 255.0).collect(),
                    )
                };
                Frame::new(k as u32, to_map(0)?, to_map(1)?, to_map(2)?)
            }
        }
    }
}
