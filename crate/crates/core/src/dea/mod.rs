//! DEA self- and peer-appraisal: CCR efficiencies, ally grouping and the
//! cross-efficiency matrix from the ally/adversary secondary goal.

mod ccr;
mod cluster;
mod cross;

pub use ccr::{ccr_all, ccr_efficiency, CcrResult, Weights};
pub use cluster::cluster_groups;
pub use cross::{
    cross_efficiency_matrix, evaluate_cross, fit_cluster_count, secondary_goal_weights, CrossEfficiencyMatrix,
    CrossEvaluation, GroupingFit,
};

use thiserror::Error;

use crate::simplex::{LpError, LpStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeaError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("{model} program for DMU {dmu} ended {status:?}; {detail}")]
    Solver { model: &'static str, dmu: usize, status: LpStatus, detail: String },
    #[error("evaluator {evaluator} gives target {target} a zero virtual input; its cross-efficiency is undefined")]
    ZeroVirtualInput { evaluator: usize, target: usize },
    #[error("DMU index {index} out of range for {n} DMUs")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("cluster count {h} must lie in 1..={n}")]
    ClusterCount { h: usize, n: usize },
    #[error("group assignment covers {groups} DMUs but the dataset has {n}")]
    GroupSize { groups: usize, n: usize },
    #[error("invalid cross-efficiency matrix: {0}")]
    Matrix(String),
}
