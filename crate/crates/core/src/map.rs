//! Dense row-major scalar grids.

use crate::error::{Error, Result};

/// A `width × height` grid of `f64` values stored row-major.
///
/// Used for frames planes, saliency maps, Gaussian belief moments and
/// density maps alike.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} values cannot fill a {width}x{height} map",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Reads with coordinates clamped to the border (replicate padding).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn ensure_same_dims(&self, other: &ScalarMap) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarMap {
        ScalarMap {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &ScalarMap, f: impl Fn(f64, f64) -> f64) -> Result<ScalarMap> {
        self.ensure_same_dims(other)?;
        Ok(ScalarMap {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &ScalarMap) -> Result<()> {
        self.ensure_same_dims(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|v| *v *= k);
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Position of the first maximum in raster order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Bilinear resampling with pixel-centre alignment.
    ///
    /// Pixel `i` of the output covers source coordinate
    /// `(i + 0.5) * src_w / dst_w - 0.5`. Constant maps stay exactly constant.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> ScalarMap {
        if (width, height) == self.dims() {
            return self.clone();
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let xs: Vec<(usize, usize, f64)> = (0..width)
            .map(|i| lerp_coords((i as f64 + 0.5) * sx - 0.5, self.width))
            .collect();
        let mut out = ScalarMap::zeros(width, height);
        for j in 0..height {
            let (y0, y1, ty) = lerp_coords((j as f64 + 0.5) * sy - 0.5, self.height);
            for (i, &(x0, x1, tx)) in xs.iter().enumerate() {
                let a = self.get(x0, y0);
                let b = self.get(x1, y0);
                let c = self.get(x0, y1);
                let d = self.get(x1, y1);
                let top = a + tx * (b - a);
                let bottom = c + tx * (d - c);
                out.set(i, j, top + ty * (bottom - top));
            }
        }
        out
    }

    /// Replicates every cell into a `factor × factor` block, dividing by
    /// `factor²` so that the total mass is preserved.
    pub fn upsample_mass_preserving(&self, factor: usize, width: usize, height: usize) -> ScalarMap {
        let mut out = ScalarMap::zeros(width, height);
        let k = 1.0 / (factor * factor) as f64;
        for y in 0..height {
            let sy = (y / factor).min(self.height - 1);
            for x in 0..width {
                let sx = (x / factor).min(self.width - 1);
                out.set(x, y, self.get(sx, sy) * k);
            }
        }
        if width == factor * self.width && height == factor * self.height {
            return out;
        }
        // Cropped or padded borders: restore the total.
        let total = out.sum();
        let want = self.sum();
        if total > 0.0 && want > 0.0 {
            out.scale(want / total);
        }
        out
    }

    /// Bilinear interpolation at a continuous position where cell `(i, j)`
    /// has its centre at `(i + 0.5, j + 0.5)`. Positions outside the centre
    /// lattice are clamped to the border cells.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let (x0, x1, tx) = lerp_coords(x - 0.5, self.width);
        let (y0, y1, ty) = lerp_coords(y - 0.5, self.height);
        let top = self.get(x0, y0) * (1.0 - tx) + self.get(x1, y0) * tx;
        let bottom = self.get(x0, y1) * (1.0 - tx) + self.get(x1, y1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn lerp_coords(c: f64, n: usize) -> (usize, usize, f64) {
    if n == 1 || c <= 0.0 {
        return (0, 0, 0.0);
    }
    let max = (n - 1) as f64;
    if c >= max {
        return (n - 1, n - 1, 0.0);
    }
    let i0 = c.floor() as usize;
    (i0, i0 + 1, c - i0 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resize_keeps_constants_exact() {
        let m = ScalarMap::filled(7, 5, 0.3);
        let r = m.resize_bilinear(13, 11);
        assert!(r.data().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn bilinear_at_cell_centres_reproduces_values() {
        let m = ScalarMap::from_fn(4, 3, |x, y| (x * 10 + y) as f64);
        for y in 0..3 {
            for x in 0..4 {
                assert_eq!(m.sample_bilinear(x as f64 + 0.5, y as f64 + 0.5), m.get(x, y));
            }
        }
        assert!((m.sample_bilinear(1.0, 0.5) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn mass_preserving_upsample() {
        let m = ScalarMap::from_fn(3, 2, |x, y| (x + 2 * y) as f64 / 9.0);
        let up = m.upsample_mass_preserving(4, 12, 8);
        assert!((up.sum() - m.sum()).abs() < 1e-12);
        assert_eq!(up.get(5, 6), m.get(1, 1) / 16.0);
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(ScalarMap::from_vec(2, 2, vec![0.0; 3]).is_err());
    }
}
