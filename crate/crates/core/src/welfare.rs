//! Welfare measures over residual donor supplies.
//!
//! The core measure is an equally-distributed-equivalent welfare: for
//! residuals r_1..r_n and inequality aversion `eps >= 0`,
//!
//! ```text
//! W = ( (1/n) * sum_i r_i^(1 - eps) )^(1 / (1 - eps))
//! ```
//!
//! `eps = 0` is the arithmetic mean, `eps = 1` the geometric mean (taken as
//! the continuous limit), and larger `eps` penalizes uneven residuals harder.
//! With any zero residual and `eps >= 1` the measure is 0, again the limit
//! value. Per-type welfare values are blended into a single score by convex
//! plate-share weights.

use serde::{Deserialize, Serialize};

/// Convex weights must sum to 1 within this absolute tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WelfareError {
    #[error("residual vector is empty")]
    EmptyResiduals,
    #[error("residual[{index}] = {value} must be a finite number >= 0")]
    InvalidResidual { index: usize, value: f64 },
    #[error("inequality aversion must be a finite number >= 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("{values} welfare values vs {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOLERANCE}")]
    BadWeightSum { sum: f64 },
    #[error("population is zero")]
    ZeroPopulation,
    #[error("poor count {poor} exceeds population {total}")]
    PoorExceedsTotal { poor: u64, total: u64 },
}

/// Residual pounds left at each donor after a (tentative) allocation.
/// Construction rejects empty vectors and negative or non-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualProfile(Vec<f64>);

impl ResidualProfile {
    pub fn new(residuals: Vec<f64>) -> Result<Self, WelfareError> {
        if residuals.is_empty() {
            return Err(WelfareError::EmptyResiduals);
        }
        for (index, &value) in residuals.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(WelfareError::InvalidResidual { index, value });
            }
        }
        Ok(ResidualProfile(residuals))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty vectors
    }
}

/// Equally-distributed-equivalent welfare of a residual profile.
///
/// Symmetric, scale-homogeneous of degree 1, non-increasing in `epsilon`,
/// and never above the arithmetic mean.
pub fn atkinson_welfare(residuals: &ResidualProfile, epsilon: f64) -> Result<f64, WelfareError> {
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(WelfareError::InvalidEpsilon(epsilon));
    }
    let r = residuals.as_slice();
    let n = r.len() as f64;
    if epsilon == 0.0 {
        return Ok(r.iter().sum::<f64>() / n);
    }
    if epsilon >= 1.0 && r.contains(&0.0) {
        return Ok(0.0);
    }
    if epsilon == 1.0 {
        // geometric mean, the analytic limit of the power mean at eps = 1
        return Ok((r.iter().map(|&v| v.ln()).sum::<f64>() / n).exp());
    }
    let power = 1.0 - epsilon;
    let mean = r.iter().map(|&v| v.powf(power)).sum::<f64>() / n;
    Ok(mean.powf(1.0 / power))
}

/// Blends per-type welfare values with convex plate-share weights.
pub fn combined_welfare(per_type: &[f64], weights: &[f64]) -> Result<f64, WelfareError> {
    if per_type.len() != weights.len() {
        return Err(WelfareError::LengthMismatch {
            values: per_type.len(),
            weights: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if sum.is_nan() || (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(WelfareError::BadWeightSum { sum });
    }
    Ok(per_type.iter().zip(weights).map(|(v, w)| v * w).sum())
}

/// Fraction of an agency's population living in poverty.
pub fn head_count_ratio(poor: u64, total: u64) -> Result<f64, WelfareError> {
    if total == 0 {
        return Err(WelfareError::ZeroPopulation);
    }
    if poor > total {
        return Err(WelfareError::PoorExceedsTotal { poor, total });
    }
    Ok(poor as f64 / total as f64)
}

/// Per-type welfare values and their weighted blend for one allocation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub per_type: Vec<f64>,
    pub combined: f64,
}

impl WelfareReport {
    pub fn new(per_type: Vec<f64>, weights: &[f64]) -> Result<Self, WelfareError> {
        let combined = combined_welfare(&per_type, weights)?;
        Ok(WelfareReport { per_type, combined })
    }
}
