//! Profile evaluation input: the `(parameter, loglik)` point sets the rest of
//! the pipeline consumes.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{McapError, Result};
use crate::mcap::McapResult;

pub const MIN_POINTS: usize = 5;

/// Monte Carlo profile evaluations: `loglik[k]` is the noisy profile
/// log likelihood observed at `parameters[k]`. Order is preserved from the
/// source for reporting; the fit itself is permutation-invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoints {
    parameters: Vec<f64>,
    loglik: Vec<f64>,
}

impl ProfilePoints {
    pub fn new(parameters: Vec<f64>, loglik: Vec<f64>) -> Result<Self> {
        if parameters.len() != loglik.len() {
            return Err(McapError::DomainError(format!(
                "parameter/loglik length mismatch: {} vs {}",
                parameters.len(),
                loglik.len()
            )));
        }
        if parameters.len() < MIN_POINTS {
            return Err(McapError::TooFewPoints(parameters.len()));
        }
        if let Some(i) = parameters
            .iter()
            .chain(loglik.iter())
            .position(|v| !v.is_finite())
        {
            return Err(McapError::DomainError(format!(
                "non-finite value at index {}",
                i % parameters.len()
            )));
        }
        Ok(ProfilePoints { parameters, loglik })
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn parameters(&self) -> &[f64] {
        &self.parameters
    }

    pub fn loglik(&self) -> &[f64] {
        &self.loglik
    }

    pub fn param_range(&self) -> (f64, f64) {
        let lo = self
            .parameters
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .parameters
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Read profile points from CSV with header `parameter,loglik`.
///
/// Line numbers in errors are 1-based file lines (header is line 1).
pub fn read_profile_csv<P: AsRef<Path>>(path: P) -> Result<ProfilePoints> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut parameters = Vec::new();
    let mut loglik = Vec::new();
    let mut lines = reader.lines();

    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(McapError::MissingHeader),
    };
    let header = header.trim_end_matches('\r');
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["parameter", "loglik"] {
        return Err(McapError::MissingHeader);
    }

    for (idx, line) in lines.enumerate() {
        let line_no = idx as u64 + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(McapError::MalformedRow(line_no));
        }
        let p: f64 = fields[0]
            .parse()
            .map_err(|_| McapError::MalformedRow(line_no))?;
        let l: f64 = fields[1]
            .parse()
            .map_err(|_| McapError::MalformedRow(line_no))?;
        if !p.is_finite() || !l.is_finite() {
            return Err(McapError::NonFiniteValue(line_no));
        }
        parameters.push(p);
        loglik.push(l);
    }

    if parameters.len() < MIN_POINTS {
        return Err(McapError::TooFewPoints(parameters.len()));
    }
    ProfilePoints::new(parameters, loglik)
}

/// Write profile points back out in the canonical CSV format.
pub fn write_profile_csv<P: AsRef<Path>>(points: &ProfilePoints, path: P) -> Result<()> {
    let mut file = File::create(path)?;
    writeln!(file, "parameter,loglik")?;
    for (p, l) in points.parameters.iter().zip(&points.loglik) {
        writeln!(file, "{p},{l}")?;
    }
    Ok(())
}

/// Flat JSON form of an MCAP result; field set is fixed regardless of input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultJson {
    pub confidence: f64,
    pub lambda: f64,
    pub ngrid: usize,
    pub mle: f64,
    pub quadratic_max: f64,
    pub ci: [f64; 2],
    pub delta: f64,
    pub se_stat: f64,
    pub se_mc: f64,
    pub se_total: f64,
    pub warnings: Vec<String>,
}

impl From<&McapResult> for ResultJson {
    fn from(result: &McapResult) -> Self {
        ResultJson {
            confidence: result.budget.confidence,
            lambda: result.lambda,
            ngrid: result.ngrid,
            mle: result.mle,
            quadratic_max: result.quadratic_max,
            ci: [result.ci.0, result.ci.1],
            delta: result.budget.delta,
            se_stat: result.budget.se_stat,
            se_mc: result.budget.se_mc,
            se_total: result.budget.se_total,
            warnings: result.warnings.clone(),
        }
    }
}

/// Serialize an MCAP result to its JSON schema.
pub fn write_result<P: AsRef<Path>>(result: &McapResult, path: P) -> Result<()> {
    let json = ResultJson::from(result);
    let mut file = File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &json)?;
    writeln!(file)?;
    Ok(())
}

pub fn read_result<P: AsRef<Path>>(path: P) -> Result<ResultJson> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Write the per-grid-point fit table CSV (`parameter,smoothed,quadratic`).
pub fn write_fit_table<P: AsRef<Path>>(result: &McapResult, path: P) -> Result<()> {
    let mut file = File::create(path)?;
    writeln!(file, "parameter,smoothed,quadratic")?;
    for row in &result.fit_table {
        writeln!(file, "{},{},{}", row.parameter, row.smoothed, row.quadratic)?;
    }
    Ok(())
}
