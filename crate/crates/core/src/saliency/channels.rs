//! The twelve feature channels.
//!
//! Kernels:
//! - colour opponency: `|r − g|` and `|b − (r + g)/2|`, divided by
//!   `max(L, 0.1)` with `L = (r + g + b)/3`;
//! - flicker: `|L(t) − L(t−1)|`;
//! - luminance contrast: `|L − blur5(L)|`;
//! - orientation θ ∈ {0°, 45°, 90°, 135°}: `|cos θ·Gx + sin θ·Gy|` where
//!   `Gx`, `Gy` are Sobel derivatives (`[-1 0 1]/2 ⊗ [1 2 1]/4`), θ measured
//!   from the image x axis with y pointing down;
//! - motion: a Reichardt correlator of the current and previous luminance
//!   along a one-pixel shift `e`,
//!   `R = L(t)(p+e)·L(t−1)(p) − L(t)(p)·L(t−1)(p+e)`.
//!   Its positive part responds to motion along `+e`, its negative part to
//!   motion along `−e`; horizontal and vertical shifts give four maps. `R`
//!   is exactly zero on static pairs.

use crate::error::Result;
use crate::map::ScalarMap;
use crate::saliency::frame::Frame;
use crate::saliency::pyramid::blur5;

pub const NUM_CHANNELS: usize = 12;

const LUMINANCE_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    RedGreen,
    BlueYellow,
    Flicker,
    Luminance,
    Orientation0,
    Orientation45,
    Orientation90,
    Orientation135,
    MotionRight,
    MotionLeft,
    MotionDown,
    MotionUp,
}

pub const CHANNELS: [Channel; NUM_CHANNELS] = [
    Channel::RedGreen,
    Channel::BlueYellow,
    Channel::Flicker,
    Channel::Luminance,
    Channel::Orientation0,
    Channel::Orientation45,
    Channel::Orientation90,
    Channel::Orientation135,
    Channel::MotionRight,
    Channel::MotionLeft,
    Channel::MotionDown,
    Channel::MotionUp,
];

impl Channel {
    pub fn is_temporal(self) -> bool {
        matches!(
            self,
            Channel::Flicker
                | Channel::MotionRight
                | Channel::MotionLeft
                | Channel::MotionDown
                | Channel::MotionUp
        )
    }
}

/// Computes the twelve channel maps in [`CHANNELS`] order, at frame
/// resolution. Temporal channels are zero when `prev` is absent.
pub fn build_feature_channels(frame: &Frame, prev: Option<&Frame>) -> Result<Vec<ScalarMap>> {
    if let Some(p) = prev {
        frame.red.ensure_same_dims(&p.red)?;
    }
    let (w, h) = frame.dims();
    let lum = frame.luminance();

    let mut rg = ScalarMap::zeros(w, h);
    let mut by = ScalarMap::zeros(w, h);
    for i in 0..w * h {
        let (r, g, b) = (frame.red.data()[i], frame.green.data()[i], frame.blue.data()[i]);
        let denom = lum.data()[i].max(LUMINANCE_FLOOR);
        rg.data_mut()[i] = (r - g).abs() / denom;
        by.data_mut()[i] = (b - 0.5 * (r + g)).abs() / denom;
    }

    let blurred = blur5(&lum);
    let contrast = lum.zip_with(&blurred, |a, b| (a - b).abs())?;

    let (gx, gy) = sobel(&lum);
    let orient = |deg: f64| {
        let (s, c) = deg.to_radians().sin_cos();
        gx.zip_with(&gy, |x, y| (c * x + s * y).abs())
    };

    let (flicker, right, left, down, up) = match prev {
        None => (
            ScalarMap::zeros(w, h),
            ScalarMap::zeros(w, h),
            ScalarMap::zeros(w, h),
            ScalarMap::zeros(w, h),
            ScalarMap::zeros(w, h),
        ),
        Some(p) => {
            let prev_lum = p.luminance();
            let flicker = lum.zip_with(&prev_lum, |a, b| (a - b).abs())?;
            let rh = reichardt(&lum, &prev_lum, 1, 0);
            let rv = reichardt(&lum, &prev_lum, 0, 1);
            (
                flicker,
                rh.map(|v| v.max(0.0)),
                rh.map(|v| (-v).max(0.0)),
                rv.map(|v| v.max(0.0)),
                rv.map(|v| (-v).max(0.0)),
            )
        }
    };

    Ok(vec![
        rg,
        by,
        flicker,
        contrast,
        orient(0.0)?,
        orient(45.0)?,
        orient(90.0)?,
        orient(135.0)?,
        right,
        left,
        down,
        up,
    ])
}

fn sobel(lum: &ScalarMap) -> (ScalarMap, ScalarMap) {
    let (w, h) = lum.dims();
    let mut gx = ScalarMap::zeros(w, h);
    let mut gy = ScalarMap::zeros(w, h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |dx: isize, dy: isize| lum.get_clamped(x + dx, y + dy);
            let dx = ((p(1, -1) - p(-1, -1)) + 2.0 * (p(1, 0) - p(-1, 0)) + (p(1, 1) - p(-1, 1))) / 8.0;
            let dy = ((p(-1, 1) - p(-1, -1)) + 2.0 * (p(0, 1) - p(0, -1)) + (p(1, 1) - p(1, -1))) / 8.0;
            gx.set(x as usize, y as usize, dx);
            gy.set(x as usize, y as usize, dy);
        }
    }
    (gx, gy)
}

fn reichardt(cur: &ScalarMap, prev: &ScalarMap, ex: isize, ey: isize) -> ScalarMap {
    let (w, h) = cur.dims();
    ScalarMap::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        cur.get_clamped(x + ex, y + ey) * prev.get_clamped(x, y)
            - cur.get_clamped(x, y) * prev.get_clamped(x + ex, y + ey)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_frame(index: u32, w: usize, h: usize, f: impl FnMut(usize, usize) -> f64) -> Frame {
        Frame::gray(index, ScalarMap::from_fn(w, h, f)).unwrap()
    }

    #[test]
    fn uniform_gray_gives_all_zero_channels() {
        let f = gray_frame(2, 32, 24, |_, _| 0.3);
        let chans = build_feature_channels(&f, Some(&f)).unwrap();
        assert_eq!(chans.len(), NUM_CHANNELS);
        for (c, m) in CHANNELS.iter().zip(&chans) {
            assert!(m.data().iter().all(|&v| v == 0.0), "{c:?} not zero");
        }
    }

    #[test]
    fn static_pair_has_no_temporal_response() {
        let f = gray_frame(2, 40, 30, |x, y| ((x * 7 + y * 13) % 17) as f64 / 16.0);
        let chans = build_feature_channels(&f, Some(&f)).unwrap();
        for (c, m) in CHANNELS.iter().zip(&chans) {
            if c.is_temporal() {
                assert!(m.data().iter().all(|&v| v == 0.0), "{c:?}");
            }
        }
        assert!(chans[3].max() > 0.0);
    }

    #[test]
    fn first_frame_has_zero_temporal_channels() {
        let f = gray_frame(1, 20, 20, |x, _| x as f64 / 19.0);
        let chans = build_feature_channels(&f, None).unwrap();
        for (c, m) in CHANNELS.iter().zip(&chans) {
            if c.is_temporal() {
                assert_eq!(m.max(), 0.0);
            }
            assert!(m.is_finite());
            assert!(m.min() >= 0.0);
        }
    }

    #[test]
    fn luminance_contrast_peaks_at_square_boundary() {
        let f = gray_frame(1, 64, 64, |x, y| {
            if (28..36).contains(&x) && (28..36).contains(&y) { 1.0 } else { 0.0 }
        });
        let chans = build_feature_channels(&f, None).unwrap();
        let (mx, my) = chans[3].argmax();
        // Within one pixel of the square's edge band.
        let in_band = |v: usize| (26..=37).contains(&v);
        assert!(in_band(mx) && in_band(my), "peak at ({mx}, {my})");
        let on_edge = [27usize, 28, 35, 36].contains(&mx) || [27usize, 28, 35, 36].contains(&my);
        assert!(on_edge, "peak at ({mx}, {my}) is not on the boundary");
    }

    #[test]
    fn motion_direction_is_resolved() {
        let dot = |cx: usize| move |x: usize, y: usize| if x == cx && y == 10 { 1.0 } else { 0.1 };
        let prev = gray_frame(1, 30, 20, dot(10));
        let cur = gray_frame(2, 30, 20, dot(11));
        let chans = build_feature_channels(&cur, Some(&prev)).unwrap();
        let right = chans[8].sum();
        let left = chans[9].sum();
        assert!(right > left, "right {right} left {left}");
        let back = build_feature_channels(&prev, Some(&cur)).unwrap();
        assert!(back[9].sum() > back[8].sum());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = gray_frame(1, 10, 10, |_, _| 0.0);
        let b = gray_frame(2, 11, 10, |_, _| 0.0);
        assert!(build_feature_channels(&b, Some(&a)).is_err());
    }
}
