//! Within-map competition ("max minus mean of local maxima").

use crate::map::ScalarMap;

/// Promotes maps with a single dominant peak and suppresses maps with many
/// comparable peaks.
///
/// The map is multiplied by `(M − m̄)²`, where `M` is the global maximum and
/// `m̄` the mean of the other local maxima. A local maximum is a connected
/// plateau (8-neighbourhood) of equal positive values none of whose
/// neighbours is larger; the plateau holding the global maximum is excluded
/// from the mean. Negative inputs are clipped to zero first.
pub fn normalize_map(map: &ScalarMap) -> ScalarMap {
    let clipped = map.map(|v| v.max(0.0));
    let global = clipped.max();
    if !(global > 0.0) {
        return ScalarMap::zeros(map.width(), map.height());
    }
    let maxima = local_maxima(&clipped);
    let (gx, gy) = clipped.argmax();
    let g_label = gy * clipped.width() + gx;
    let others: Vec<f64> = maxima
        .iter()
        .filter(|m| m.representative != g_label)
        .map(|m| m.value)
        .collect();
    let mean_others = if others.is_empty() {
        0.0
    } else {
        others.iter().sum::<f64>() / others.len() as f64
    };
    let k = (global - mean_others).powi(2);
    clipped.map(|v| v * k)
}

#[derive(Debug, Clone, Copy)]
struct Maximum {
    /// Smallest raster index in the plateau.
    representative: usize,
    value: f64,
}

/// Compares `v` with the 8-neighbourhood of `(x, y)`: whether any
/// neighbour is larger, and whether any is equal.
#[inline]
fn neighbourhood(data: &[f64], w: usize, h: usize, x: usize, y: usize, v: f64) -> (bool, bool) {
    let (mut larger, mut equal) = (false, false);
    let mut check = |nv: f64| {
        larger |= nv > v;
        equal |= nv == v;
    };
    if x > 0 && y > 0 && x + 1 < w && y + 1 < h {
        let i = y * w + x;
        for j in [i - w - 1, i - w, i - w + 1, i - 1, i + 1, i + w - 1, i + w, i + w + 1] {
            check(data[j]);
        }
    } else {
        for ny in y.saturating_sub(1)..(y + 2).min(h) {
            for nx in x.saturating_sub(1)..(x + 2).min(w) {
                if nx != x || ny != y {
                    check(data[ny * w + nx]);
                }
            }
        }
    }
    (larger, equal)
}

/// Local maxima in raster order of their first pixel.
fn local_maxima(map: &ScalarMap) -> Vec<Maximum> {
    let (w, h) = map.dims();
    let data = map.data();
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        let v = data[start];
        if visited[start] || v <= 0.0 {
            continue;
        }
        visited[start] = true;
        let (larger, equal) = neighbourhood(data, w, h, start % w, start / w, v);
        if !equal {
            if !larger {
                out.push(Maximum {
                    representative: start,
                    value: v,
                });
            }
            continue;
        }
        // Flood the plateau of equal values containing `start`; raster
        // order makes `start` its smallest index.
        let mut is_max = !larger;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            for ny in y.saturating_sub(1)..(y + 2).min(h) {
                for nx in x.saturating_sub(1)..(x + 2).min(w) {
                    let j = ny * w + nx;
                    let nv = data[j];
                    if nv > v {
                        is_max = false;
                    } else if nv == v && !visited[j] {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if is_max {
            out.push(Maximum {
                representative: start,
                value: v,
            });
        }
    }
    out
}
