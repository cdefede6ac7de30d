//! Fair allocation of a common revenue among decision-making units.
//!
//! The pipeline normalizes DMU data, scores every DMU with the CCR model,
//! derives a cross-efficiency matrix from an ally/adversary secondary goal,
//! turns the matrix into a coalitional game, evaluates a modified Shapley value
//! with optimistic and pessimistic bounds, and splits the revenue accordingly.

pub mod allocation;
pub mod dataset;
pub mod dea;
pub mod game;
pub mod simplex;

pub use allocation::{allocate, AllocationError, AllocationPlan};
pub use dataset::{load_dataset, load_groups, load_matrix, write_matrix, Dataset, DatasetError, GroupAssignment};
pub use dea::{CcrResult, CrossEfficiencyMatrix, DeaError};
pub use game::{CoalitionTable, EmptyCoalition, GameError, ShapleyTriple};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Dea(#[from] DeaError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}
