use crate::error::{Error, Result};

/// Empirical cumulative distribution of a list of errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCdf {
    /// Sorted distinct error values.
    pub thresholds: Vec<f64>,
    /// Fraction of errors at or below the matching threshold.
    pub cumulative_fraction: Vec<f64>,
}

impl ErrorCdf {
    /// Fraction of the sample at or below `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.thresholds.partition_point(|&t| t <= x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative_fraction[idx - 1]
        }
    }
}

pub fn error_cdf(errors: &[f64]) -> Result<ErrorCdf> {
    if errors.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::Domain(format!(
            "error value {e} is not a finite non-negative number"
        )));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut thresholds = Vec::new();
    let mut cumulative_fraction = Vec::new();
    for (i, &e) in sorted.iter().enumerate() {
        // last occurrence of each value carries its count
        if sorted.get(i + 1) != Some(&e) {
            thresholds.push(e);
            cumulative_fraction.push((i + 1) as f64 / n);
        }
    }
    Ok(ErrorCdf {
        thresholds,
        cumulative_fraction,
    })
}
