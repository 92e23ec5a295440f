//! The Monte Carlo adjusted profile pipeline: smooth the noisy profile,
//! fit the quadratic metamodel at the smoothed maximum, inflate the
//! likelihood-ratio cutoff for Monte Carlo error, and read the confidence
//! interval off the smoothed curve.

use crate::error::Result;
use crate::metamodel::{
    cutoff_delta, quadratic_max, se_mc_squared, weighted_quadratic_fit, ErrorBudget, QuadraticFit,
};
use crate::profile::ProfilePoints;
use crate::smoother::{smooth, tricube_weights, SmoothFit, SmootherConfig};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_LAMBDA: f64 = 0.75;
pub const DEFAULT_NGRID: usize = 1000;

/// One row of the plot-ready fit table.
#[derive(Debug, Clone, Copy)]
pub struct FitRow {
    pub parameter: f64,
    pub smoothed: f64,
    pub quadratic: f64,
}

#[derive(Debug, Clone)]
pub struct McapResult {
    pub smooth_fit: SmoothFit,
    pub quadratic_fit: QuadraticFit,
    pub budget: ErrorBudget,
    /// Smoothed-profile argmax.
    pub mle: f64,
    /// Metamodel maximizer `b/(2a)`.
    pub quadratic_max: f64,
    pub ci: (f64, f64),
    pub fit_table: Vec<FitRow>,
    pub warnings: Vec<String>,
    pub lambda: f64,
    pub ngrid: usize,
}

/// Run the full adjusted-profile procedure with explicit settings.
pub fn mcap(
    points: &ProfilePoints,
    confidence: f64,
    lambda: f64,
    ngrid: usize,
) -> Result<McapResult> {
    let config = SmootherConfig::new(lambda, ngrid)?;
    let smooth_fit = smooth(points, &config)?;
    let mle = smooth_fit.argmax;

    let mut warnings = Vec::new();
    let argmax_idx = smooth_fit.argmax_index();
    if argmax_idx == 0 || argmax_idx == smooth_fit.grid.len() - 1 {
        warnings.push(
            "smoothed maximum at grid boundary; metamodel weights cover a one-sided neighborhood"
                .to_string(),
        );
    }

    let weights = tricube_weights(mle, points.parameters(), lambda)?;
    let quadratic_fit = weighted_quadratic_fit(points.parameters(), points.loglik(), &weights)?;
    let q_max = quadratic_max(&quadratic_fit)?;
    let budget = cutoff_delta(&quadratic_fit, se_mc_squared(&quadratic_fit)?, confidence)?;

    // CI: outer range of grid points strictly within delta of the smoothed
    // maximum.
    let max_smoothed = smooth_fit.max_smoothed();
    let passing: Vec<usize> = smooth_fit
        .smoothed
        .iter()
        .enumerate()
        .filter(|(_, &s)| max_smoothed - s < budget.delta)
        .map(|(i, _)| i)
        .collect();
    debug_assert!(!passing.is_empty());
    let lo_idx = passing[0];
    let hi_idx = *passing.last().unwrap();
    let ci = (smooth_fit.grid[lo_idx], smooth_fit.grid[hi_idx]);

    if passing.len() != hi_idx - lo_idx + 1 {
        warnings.push("multimodal smoothed profile; CI reported as outer range".to_string());
    }
    if lo_idx == 0 || hi_idx == smooth_fit.grid.len() - 1 {
        warnings.push("profile range may not cover the interval".to_string());
    }

    let fit_table = smooth_fit
        .grid
        .iter()
        .zip(&smooth_fit.smoothed)
        .map(|(&g, &s)| FitRow {
            parameter: g,
            smoothed: s,
            quadratic: quadratic_fit.value(g),
        })
        .collect();

    Ok(McapResult {
        quadratic_fit,
        budget,
        mle,
        quadratic_max: q_max,
        ci,
        fit_table,
        warnings,
        lambda,
        ngrid,
        smooth_fit,
    })
}

/// `mcap` with the default settings (confidence 0.95, lambda 0.75, ngrid 1000).
pub fn mcap_default(points: &ProfilePoints) -> Result<McapResult> {
    mcap(points, DEFAULT_CONFIDENCE, DEFAULT_LAMBDA, DEFAULT_NGRID)
}
