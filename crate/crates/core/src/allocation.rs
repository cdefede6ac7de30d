//! Splitting a fixed revenue in proportion to modified Shapley values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::ShapleyTriple;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocationError {
    #[error("revenue must be positive and finite, got {0}")]
    Revenue(f64),
    #[error("Shapley value {value} of DMU {dmu} is not positive")]
    NonPositiveShapley { dmu: usize, value: f64 },
    #[error("no DMUs to allocate to")]
    Empty,
}

/// Central allocation with optimistic and pessimistic bounds per DMU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub revenue: f64,
    pub central: Vec<f64>,
    pub optimistic: Vec<f64>,
    pub pessimistic: Vec<f64>,
}

impl AllocationPlan {
    pub fn shares(&self) -> Vec<f64> {
        self.central.iter().map(|t| t / self.revenue).collect()
    }
}

fn check(phis: &ShapleyTriple, revenue: f64) -> Result<(), AllocationError> {
    if !(revenue > 0.0 && revenue.is_finite()) {
        return Err(AllocationError::Revenue(revenue));
    }
    if phis.is_empty() {
        return Err(AllocationError::Empty);
    }
    for row in [&phis.phi_lower, &phis.phi, &phis.phi_upper] {
        if let Some((dmu, &value)) = row.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(AllocationError::NonPositiveShapley { dmu, value });
        }
    }
    Ok(())
}

/// `T_i = R·φ_i / Σ φ_k`.
pub fn central_allocation(phis: &ShapleyTriple, revenue: f64) -> Result<Vec<f64>, AllocationError> {
    check(phis, revenue)?;
    let total: f64 = phis.phi.iter().sum();
    Ok(phis.phi.iter().map(|p| revenue * p / total).collect())
}

/// Own upper value set against everyone else's lower value.
pub fn optimistic_allocation(phis: &ShapleyTriple, revenue: f64) -> Result<Vec<f64>, AllocationError> {
    check(phis, revenue)?;
    Ok(against_others(&phis.phi_upper, &phis.phi_lower, revenue))
}

/// Own lower value set against everyone else's upper value.
pub fn pessimistic_allocation(phis: &ShapleyTriple, revenue: f64) -> Result<Vec<f64>, AllocationError> {
    check(phis, revenue)?;
    Ok(against_others(&phis.phi_lower, &phis.phi_upper, revenue))
}

fn against_others(own: &[f64], others: &[f64], revenue: f64) -> Vec<f64> {
    (0..own.len())
        .map(|i| {
            let rest: f64 = others.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v).sum();
            revenue * own[i] / (own[i] + rest)
        })
        .collect()
}

pub fn allocate(phis: &ShapleyTriple, revenue: f64) -> Result<AllocationPlan, AllocationError> {
    Ok(AllocationPlan {
        revenue,
        central: central_allocation(phis, revenue)?,
        optimistic: optimistic_allocation(phis, revenue)?,
        pessimistic: pessimistic_allocation(phis, revenue)?,
    })
}
