//! Local quadratic regression smoother with tricube weights.
//!
//! At each grid point a quadratic is fitted by weighted least squares to the
//! `trunc(lambda * K)` nearest profile points, so points lying exactly on a
//! quadratic are reproduced exactly. Smoothed values are computed by a direct
//! fit at every grid point; no interpolation between anchor vertices.

use crate::error::{McapError, Result};
use crate::linalg;
use crate::profile::ProfilePoints;

/// Span and grid resolution for the smoother.
#[derive(Debug, Clone, Copy)]
pub struct SmootherConfig {
    pub lambda: f64,
    pub ngrid: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            lambda: 0.75,
            ngrid: 1000,
        }
    }
}

impl SmootherConfig {
    pub fn new(lambda: f64, ngrid: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) || !lambda.is_finite() {
            return Err(McapError::InvalidLambda(lambda));
        }
        if ngrid < 2 {
            return Err(McapError::InvalidGrid(ngrid));
        }
        Ok(SmootherConfig { lambda, ngrid })
    }

    /// Neighborhood size `q = trunc(lambda * K)`; errors when a quadratic
    /// would not be identifiable.
    pub fn neighborhood_size(&self, k: usize) -> Result<usize> {
        let q = (self.lambda * k as f64).trunc() as usize;
        if q < 3 {
            return Err(McapError::SpanTooSmall(q));
        }
        Ok(q)
    }
}

/// Smoothed profile over an evaluation grid spanning the observed
/// parameter range, plus its argmax.
#[derive(Debug, Clone)]
pub struct SmoothFit {
    pub grid: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub argmax: f64,
}

impl SmoothFit {
    pub fn max_smoothed(&self) -> f64 {
        self.smoothed
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmax_index(&self) -> usize {
        // Ties break toward the smallest grid parameter.
        let mut best = 0;
        for (i, &v) in self.smoothed.iter().enumerate() {
            if v > self.smoothed[best] {
                best = i;
            }
        }
        best
    }
}

/// Tricube neighborhood weights at `eval_point`.
///
/// With `q = trunc(lambda * K)`, the cut is the q-th smallest distance;
/// points strictly inside the cut get weight `(1 - (d/maxdist)^3)^3` where
/// `maxdist` is the largest included distance. When every included point
/// coincides with `eval_point` the weights degenerate to 1 on the
/// neighborhood.
pub fn tricube_weights(eval_point: f64, parameters: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let k = parameters.len();
    let q = (lambda * k as f64).trunc() as usize;
    if q < 3 {
        return Err(McapError::SpanTooSmall(q));
    }
    let dist: Vec<f64> = parameters.iter().map(|p| (p - eval_point).abs()).collect();
    let mut sorted = dist.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[q - 1];

    let mut included: Vec<bool> = dist.iter().map(|&d| d < cut).collect();
    if !included.iter().any(|&b| b) {
        // All of the q nearest distances are tied; fall back to the closed
        // neighborhood so the replicated-design limit is defined.
        included = dist.iter().map(|&d| d <= cut).collect();
    }
    let maxdist = dist
        .iter()
        .zip(&included)
        .filter(|(_, &inc)| inc)
        .map(|(&d, _)| d)
        .fold(0.0f64, f64::max);

    let weights = dist
        .iter()
        .zip(&included)
        .map(|(&d, &inc)| {
            if !inc {
                0.0
            } else if maxdist == 0.0 {
                1.0
            } else {
                let u = d / maxdist;
                (1.0 - u * u * u).powi(3)
            }
        })
        .collect();
    Ok(weights)
}

fn distinct_positive_weight(parameters: &[f64], weights: &[f64]) -> usize {
    let mut seen: Vec<f64> = Vec::new();
    for (&p, &w) in parameters.iter().zip(weights) {
        if w > 0.0 && !seen.contains(&p) {
            seen.push(p);
        }
    }
    seen.len()
}

/// Weighted quadratic fit centered at `x0`; returns the fitted value at `x0`.
fn local_fit_at(x0: f64, parameters: &[f64], loglik: &[f64], weights: &[f64]) -> Option<f64> {
    // Centering the response keeps the constant-input case exact.
    let mut y_sum = 0.0;
    let mut count = 0usize;
    for (&l, &w) in loglik.iter().zip(weights) {
        if w > 0.0 {
            y_sum += l;
            count += 1;
        }
    }
    let y_center = y_sum / count as f64;

    let mut xtwx = [[0.0f64; 3]; 3];
    let mut xtwy = [0.0f64; 3];
    for ((&p, &l), &w) in parameters.iter().zip(loglik).zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let x = p - x0;
        let row = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                xtwx[i][j] += w * row[i] * row[j];
            }
            xtwy[i] += w * row[i] * (l - y_center);
        }
    }
    // Intercept of the centered fit is the smoothed value at x0.
    linalg::solve3(&xtwx, &xtwy).map(|beta| y_center + beta[0])
}

/// Smooth the profile points over an `ngrid`-point grid.
pub fn smooth(points: &ProfilePoints, config: &SmootherConfig) -> Result<SmoothFit> {
    let parameters = points.parameters();
    let loglik = points.loglik();
    config.neighborhood_size(points.len())?;

    let (lo, hi) = points.param_range();
    let n = config.ngrid;
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();

    let mut smoothed = Vec::with_capacity(n);
    for &g in &grid {
        let weights = tricube_weights(g, parameters, config.lambda)?;
        if distinct_positive_weight(parameters, &weights) < 3 {
            return Err(McapError::SingularLocalFit(g));
        }
        let value =
            local_fit_at(g, parameters, loglik, &weights).ok_or(McapError::SingularLocalFit(g))?;
        smoothed.push(value);
    }

    let fit = SmoothFit {
        argmax: 0.0,
        grid,
        smoothed,
    };
    let idx = fit.argmax_index();
    Ok(SmoothFit {
        argmax: fit.grid[idx],
        ..fit
    })
}
