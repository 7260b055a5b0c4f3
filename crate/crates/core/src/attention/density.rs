use crate::attention::ParticleSet;
use crate::error::{Error, Result};
use crate::map::ScalarMap;

/// Kernel support in bandwidths; mass beyond it is below 1e-4 per axis.
const KERNEL_RADIUS: f64 = 4.0;

/// Weighted kernel density of the particle positions, summed over both
/// patterns.
///
/// Each particle contributes a separable Gaussian of standard deviation
/// `bandwidth` cells, truncated to the grid and renormalized so that it
/// carries exactly the particle's weight. A zero bandwidth gives the
/// weighted histogram of the cells containing the particles.
pub fn density_map(particles: &ParticleSet, width: usize, height: usize, bandwidth: f64) -> Result<ScalarMap> {
    if !(bandwidth >= 0.0) || !bandwidth.is_finite() {
        return Err(Error::InvalidParameter("kernel bandwidth must be non-negative".into()));
    }
    let mut out = ScalarMap::zeros(width, height);
    let cell = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
    if bandwidth == 0.0 {
        for (s, &w) in particles.states.iter().zip(&particles.weights) {
            let (i, j) = (cell(s.x, width), cell(s.y, height));
            out.data_mut()[j * width + i] += w;
        }
        return Ok(out);
    }
    let reach = (KERNEL_RADIUS * bandwidth).ceil() as isize;
    let mut kx = Vec::new();
    let mut ky = Vec::new();
    for (s, &w) in particles.states.iter().zip(&particles.weights) {
        if w == 0.0 {
            continue;
        }
        let x0 = axis_kernel(s.x, cell(s.x, width), width, reach, bandwidth, &mut kx);
        let y0 = axis_kernel(s.y, cell(s.y, height), height, reach, bandwidth, &mut ky);
        for (dj, &vy) in ky.iter().enumerate() {
            let row = (y0 + dj) * width + x0;
            let k = vy * w;
            for (di, &vx) in kx.iter().enumerate() {
                out.data_mut()[row + di] += k * vx;
            }
        }
    }
    Ok(out)
}

/// Kernel values on the cell centres within `reach` of `c`, clipped to
/// `[0, n)` and normalized to sum to one. Returns the first cell.
fn axis_kernel(pos: f64, c: usize, n: usize, reach: isize, h: f64, out: &mut Vec<f64>) -> usize {
    let lo = (c as isize - reach).max(0) as usize;
    let hi = ((c as isize + reach) as usize).min(n - 1);
    out.clear();
    let inv = 1.0 / (2.0 * h * h);
    let mut sum = 0.0;
    for i in lo..=hi {
        let d = i as f64 + 0.5 - pos;
        let v = (-d * d * inv).exp();
        sum += v;
        out.push(v);
    }
    // A kernel much narrower than a cell underflows everywhere; its limit is
    // the particle's own cell.
    if sum == 0.0 {
        out[c - lo] = 1.0;
        sum = 1.0;
    }
    out.iter_mut().for_each(|v| *v /= sum);
    lo
}
