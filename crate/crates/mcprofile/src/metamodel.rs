//! Quadratic metamodel for noisy profile evaluations and the standard-error
//! algebra built on it.
//!
//! The profile points near the smoothed maximum are modelled as
//! `loglik = -a*phi^2 + b*phi + c + noise` and fitted by weighted least
//! squares. The coefficient covariance feeds the delta-method Monte Carlo
//! standard error of the maximizer `b/(2a)`, which in turn inflates the
//! likelihood-ratio cutoff.

use crate::error::{McapError, Result};
use crate::linalg;
use crate::stats::chisq1_quantile;

/// Weighted quadratic regression result for `-a*phi^2 + b*phi + c`.
/// Sign convention: `a` is the coefficient on `-phi^2`, so `a > 0` means a
/// concave (well-behaved) profile.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
    pub dof: usize,
}

impl QuadraticFit {
    /// Evaluate the fitted quadratic.
    pub fn value(&self, phi: f64) -> f64 {
        -self.a * phi * phi + self.b * phi + self.c
    }
}

/// The error decomposition and the resulting profile cutoff.
#[derive(Debug, Clone, Copy)]
pub struct ErrorBudget {
    pub se_stat: f64,
    pub se_mc: f64,
    pub se_total: f64,
    pub delta: f64,
    pub confidence: f64,
}

/// Weighted least squares on design columns `(1, phi, -phi^2)`, restricted to
/// points with strictly positive weight. Residual variance uses `m - 3`
/// degrees of freedom where `m` counts the positive-weight points.
pub fn weighted_quadratic_fit(
    parameters: &[f64],
    loglik: &[f64],
    weights: &[f64],
) -> Result<QuadraticFit> {
    assert_eq!(parameters.len(), loglik.len());
    assert_eq!(parameters.len(), weights.len());

    let mut distinct: Vec<f64> = Vec::new();
    let mut m = 0usize;
    for (&p, &w) in parameters.iter().zip(weights) {
        if w > 0.0 {
            m += 1;
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
    }
    if distinct.len() < 3 {
        return Err(McapError::SingularDesign);
    }
    if m < 4 {
        return Err(McapError::InsufficientDof(m));
    }

    // Center the response for conditioning; only the intercept shifts back.
    let y_center = parameters
        .iter()
        .zip(loglik)
        .zip(weights)
        .filter(|((_, _), &w)| w > 0.0)
        .map(|((_, &l), _)| l)
        .sum::<f64>()
        / m as f64;

    // Columns: intercept, phi, -phi^2 -> coefficients (c, b, a).
    let mut xtwx = [[0.0f64; 3]; 3];
    let mut xtwy = [0.0f64; 3];
    for ((&p, &l), &w) in parameters.iter().zip(loglik).zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let row = [1.0, p, -p * p];
        for i in 0..3 {
            for j in 0..3 {
                xtwx[i][j] += w * row[i] * row[j];
            }
            xtwy[i] += w * row[i] * (l - y_center);
        }
    }
    let beta = linalg::solve3(&xtwx, &xtwy).ok_or(McapError::SingularDesign)?;
    let inv = linalg::inv3(&xtwx).ok_or(McapError::SingularDesign)?;

    let dof = m - 3;
    let mut wrss = 0.0;
    for ((&p, &l), &w) in parameters.iter().zip(loglik).zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let fitted = beta[0] + beta[1] * p + beta[2] * (-p * p);
        let e = (l - y_center) - fitted;
        wrss += w * e * e;
    }
    let sigma2 = wrss / dof as f64;

    Ok(QuadraticFit {
        c: beta[0] + y_center,
        b: beta[1],
        a: beta[2],
        var_b: sigma2 * inv[1][1],
        var_a: sigma2 * inv[2][2],
        cov_ab: sigma2 * inv[2][1],
        dof,
    })
}

/// Maximizer of the fitted quadratic, `b / (2a)`.
pub fn quadratic_max(fit: &QuadraticFit) -> Result<f64> {
    if fit.a <= 0.0 {
        return Err(McapError::NonConcaveFit(fit.a));
    }
    Ok(fit.b / (2.0 * fit.a))
}

/// Statistical standard error implied by the fitted curvature, `1/sqrt(2a)`.
pub fn se_stat(fit: &QuadraticFit) -> Result<f64> {
    if fit.a <= 0.0 {
        return Err(McapError::NonConcaveFit(fit.a));
    }
    Ok(1.0 / (2.0 * fit.a).sqrt())
}

/// Delta-method variance of the maximizer `b/(2a)` given the coefficient
/// covariance estimates.
pub fn se_mc_squared(fit: &QuadraticFit) -> Result<f64> {
    if fit.a == 0.0 {
        return Err(McapError::ZeroCurvature);
    }
    let a = fit.a;
    let b = fit.b;
    Ok((1.0 / (4.0 * a * a))
        * (fit.var_b - (2.0 * b / a) * fit.cov_ab + (b * b / (a * a)) * fit.var_a))
}

/// Monte Carlo adjusted cutoff: `delta = chisq_1(confidence) * (a*se_mc^2 + 1/2)`,
/// together with the full error budget.
pub fn cutoff_delta(
    fit: &QuadraticFit,
    se_mc_squared: f64,
    confidence: f64,
) -> Result<ErrorBudget> {
    if fit.a <= 0.0 {
        return Err(McapError::NonConcaveFit(fit.a));
    }
    let q = chisq1_quantile(confidence)?;
    let se_stat = 1.0 / (2.0 * fit.a).sqrt();
    let se_mc_sq = se_mc_squared.max(0.0);
    Ok(ErrorBudget {
        se_stat,
        se_mc: se_mc_sq.sqrt(),
        se_total: (se_mc_sq + se_stat * se_stat).sqrt(),
        delta: q * (fit.a * se_mc_sq + 0.5),
        confidence,
    })
}
