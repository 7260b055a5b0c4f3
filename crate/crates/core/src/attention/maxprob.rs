//! Probability that each cell holds the maximum stochastic saliency.
//!
//! For independent Gaussian beliefs `N(μ_x, σ_x²)` the probability that
//! cell `x` is the argmax is
//!
//! ```text
//! P(x) = ∫ φ_x(s) ∏_{x̃ ≠ x} Φ_x̃(s) ds
//!      = ∫ [φ_x(s) / Φ_x(s)] · ∏_{x̃} Φ_x̃(s) ds.
//! ```
//!
//! The second form moves the product over all cells out of the per-cell
//! work: it is evaluated once per quadrature node as a log-domain sum along
//! a balanced tree, after which every cell needs only its own ratio
//! `φ_x/Φ_x`. [`max_probability_map_naive`] evaluates the first form
//! directly and serves as the reference.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::ScalarMap;
use crate::numeric::{log_norm_cdf, log_norm_pdf, tree_sum, LOG_UNDERFLOW};
use crate::stochastic::GaussianMap;

/// Integration grid for the probability-of-maximum integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes: usize,
    /// The grid spans `[min μ − k σ_max, max μ + k σ_max]`.
    pub span_sigmas: f64,
    /// Normalization defect above which the result is flagged as coarse.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: 256,
            span_sigmas: 6.0,
            tolerance: 1e-6,
        }
    }
}

/// Per-cell probabilities of holding the maximum; sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxProbMap {
    pub probs: ScalarMap,
}

impl MaxProbMap {
    pub fn uniform(width: usize, height: usize) -> Self {
        Self {
            probs: ScalarMap::filled(width, height, 1.0 / (width * height) as f64),
        }
    }

    /// Likelihood at a continuous position, by bilinear interpolation of the
    /// cell values.
    pub fn at(&self, x: f64, y: f64) -> f64 {
        self.probs.sample_bilinear(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProbDiagnostics {
    /// `1 − Σ P(x)` before renormalization.
    pub normalization_defect: f64,
    /// Quadrature nodes whose product over all cells did not underflow.
    pub active_nodes: usize,
    /// Set when `|normalization_defect|` exceeds the configured tolerance.
    pub coarse: bool,
}

struct Grid {
    start: f64,
    step: f64,
    nodes: usize,
}

fn validate(belief: &GaussianMap, quad: &QuadratureConfig) -> Result<Grid> {
    if quad.nodes < 2 {
        return Err(Error::InvalidParameter("quadrature needs at least 2 nodes".into()));
    }
    if belief.is_empty() {
        return Err(Error::InvalidParameter("empty belief".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sd_max: f64 = 0.0;
    for (&m, &v) in belief.mean.data().iter().zip(belief.variance.data()) {
        if !(v > 0.0) || !v.is_finite() || !m.is_finite() {
            return Err(Error::InvalidParameter(
                "probability of maximum needs finite means and positive variances".into(),
            ));
        }
        lo = lo.min(m);
        hi = hi.max(m);
        sd_max = sd_max.max(v.sqrt());
    }
    let start = lo - quad.span_sigmas * sd_max;
    let end = hi + quad.span_sigmas * sd_max;
    Ok(Grid {
        start,
        step: (end - start) / (quad.nodes - 1) as f64,
        nodes: quad.nodes,
    })
}

fn finish(raw: Vec<f64>, belief: &GaussianMap, quad: &QuadratureConfig, active_nodes: usize) -> Result<(MaxProbMap, MaxProbDiagnostics)> {
    let total: f64 = tree_sum(&raw);
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Numerical(format!(
            "probability-of-maximum integral degenerated (sum {total})"
        )));
    }
    let defect = 1.0 - total;
    let probs = ScalarMap::from_vec(
        belief.width(),
        belief.height(),
        raw.into_iter().map(|p| p / total).collect(),
    )?;
    Ok((
        MaxProbMap { probs },
        MaxProbDiagnostics {
            normalization_defect: defect,
            active_nodes,
            coarse: defect.abs() > quad.tolerance,
        },
    ))
}

/// `Σ_x ln Φ_x(s)` along a balanced tree; `-∞` once it drops below the
/// underflow threshold.
fn log_product(s: f64, mean: &[f64], inv_sd: &[f64], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(
        mean.iter()
            .zip(inv_sd)
            .map(|(&m, &k)| log_norm_cdf((s - m) * k)),
    );
    let l = tree_sum(scratch);
    if l < LOG_UNDERFLOW {
        f64::NEG_INFINITY
    } else {
        l
    }
}

/// Cells per parallel work item in the accumulation pass.
const CELL_CHUNK: usize = 1024;

/// Probability-of-maximum map via the factored integrand.
pub fn max_probability_map(belief: &GaussianMap, quad: &QuadratureConfig) -> Result<(MaxProbMap, MaxProbDiagnostics)> {
    let grid = validate(belief, quad)?;
    let mean = belief.mean.data();
    let inv_sd: Vec<f64> = belief.variance.data().iter().map(|v| 1.0 / v.sqrt()).collect();
    let node = |k: usize| grid.start + grid.step * k as f64;

    // The product is non-decreasing in s: find the first node whose
    // product survives underflow by bisection, then only evaluate above it.
    let mut scratch = Vec::with_capacity(mean.len());
    let first_active = {
        let (mut lo, mut hi) = (0usize, grid.nodes);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if log_product(node(mid), mean, &inv_sd, &mut scratch).is_finite() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    };
    let active: Vec<usize> = (first_active..grid.nodes).collect();

    // ln Φ for every active node and cell, plus the node's tree product.
    let rows: Vec<(Vec<f64>, f64)> = active
        .par_iter()
        .map(|&k| {
            let s = node(k);
            let row: Vec<f64> = mean
                .iter()
                .zip(&inv_sd)
                .map(|(&m, &kk)| log_norm_cdf((s - m) * kk))
                .collect();
            let l = tree_sum(&row);
            (row, if l < LOG_UNDERFLOW { f64::NEG_INFINITY } else { l })
        })
        .collect();

    let live: Vec<(f64, &[f64], f64)> = active
        .iter()
        .zip(&rows)
        .filter(|(_, r)| r.1.is_finite())
        .map(|(&k, r)| (node(k), r.0.as_slice(), r.1))
        .collect();
    let log_inv_sd: Vec<f64> = inv_sd.iter().map(|k| k.ln()).collect();
    // Terms below e^-750 vanish in double precision.
    const NEGLIGIBLE: f64 = -750.0;
    let mut raw = vec![0.0; mean.len()];
    raw.par_chunks_mut(CELL_CHUNK).enumerate().for_each(|(c, out)| {
        let base = c * CELL_CHUNK;
        for &(s, row, l) in &live {
            for (o, acc) in out.iter_mut().enumerate() {
                let i = base + o;
                let z = (s - mean[i]) * inv_sd[i];
                let bound = -0.5 * z * z + log_inv_sd[i];
                if bound < NEGLIGIBLE {
                    continue;
                }
                // φ/Φ evaluated in logs; Φ never underflows here because
                // the total product is above the threshold.
                *acc += (log_norm_pdf(z) + log_inv_sd[i] - row[i] + l).exp();
            }
        }
        for v in out {
            *v *= grid.step;
        }
    });
    finish(raw, belief, quad, rows.iter().filter(|r| r.1.is_finite()).count())
}

/// Reference evaluation of `∫ φ_x(s) ∏_{x̃≠x} Φ_x̃(s) ds` that recomputes the
/// product over all other cells for every cell and node: `O(|I|² · nodes)`.
pub fn max_probability_map_naive(belief: &GaussianMap, quad: &QuadratureConfig) -> Result<(MaxProbMap, MaxProbDiagnostics)> {
    let grid = validate(belief, quad)?;
    let raw: Vec<f64> = (0..belief.len()).map(|i| naive_cell(belief, &grid, i)).collect();
    finish(raw, belief, quad, grid.nodes)
}

/// The reference integrand for one cell, exposed so timing can sample a
/// subset of cells.
pub fn max_probability_naive_cells(belief: &GaussianMap, quad: &QuadratureConfig, cells: &[usize]) -> Result<Vec<f64>> {
    let grid = validate(belief, quad)?;
    Ok(cells.iter().map(|&i| naive_cell(belief, &grid, i)).collect())
}

fn naive_cell(belief: &GaussianMap, grid: &Grid, i: usize) -> f64 {
    let mean = belief.mean.data();
    let var = belief.variance.data();
    let mut total = 0.0;
    for k in 0..grid.nodes {
        let s = grid.start + grid.step * k as f64;
        let sd_i = var[i].sqrt();
        let mut log_p = log_norm_pdf((s - mean[i]) / sd_i) - sd_i.ln();
        for j in 0..mean.len() {
            if j != i {
                log_p += log_norm_cdf((s - mean[j]) / var[j].sqrt());
            }
        }
        total += log_p.exp();
    }
    total * grid.step
}
