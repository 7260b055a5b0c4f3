use crate::error::{Error, Result};
use crate::map::ScalarMap;

/// One RGB video frame with planes in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Frame number in the source sequence.
    pub index: u32,
    pub red: ScalarMap,
    pub green: ScalarMap,
    pub blue: ScalarMap,
}

impl Frame {
    pub fn new(index: u32, red: ScalarMap, green: ScalarMap, blue: ScalarMap) -> Result<Self> {
        red.ensure_same_dims(&green)?;
        red.ensure_same_dims(&blue)?;
        for plane in [&red, &green, &blue] {
            if plane.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidParameter(
                    "frame values must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(Self {
            index,
            red,
            green,
            blue,
        })
    }

    pub fn gray(index: u32, plane: ScalarMap) -> Result<Self> {
        Self::new(index, plane.clone(), plane.clone(), plane)
    }

    /// Builds a frame from interleaved 8-bit RGB.
    pub fn from_rgb8(index: u32, width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::InvalidParameter(format!(
                "expected {} bytes of RGB data, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let plane = |c: usize| {
            ScalarMap::from_vec(
                width,
                height,
                rgb.chunks_exact(3).map(|p| p[c] as f64 / 255.0).collect(),
            )
        };
        Self::new(index, plane(0)?, plane(1)?, plane(2)?)
    }

    pub fn width(&self) -> usize {
        self.red.width()
    }

    pub fn height(&self) -> usize {
        self.red.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.red.dims()
    }

    pub fn luminance(&self) -> ScalarMap {
        let mut out = self.red.clone();
        for ((o, g), b) in out
            .data_mut()
            .iter_mut()
            .zip(self.green.data())
            .zip(self.blue.data())
        {
            *o = (*o + g + b) / 3.0;
        }
        out
    }
}
