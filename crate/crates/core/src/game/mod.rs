//! Coalitional game built on a cross-efficiency matrix and the modified
//! Shapley value with its optimistic and pessimistic bounds.

mod shapley;
mod table;

pub use shapley::{
    calibrate_empty_coalition, coalition_weights, modified_shapley, shapley_bounds, shapley_triple, BoundKind,
    Calibration, EmptyCoalition, ShapleyTriple, DEGENERATE_TOL,
};
pub use table::{characteristic_value, coalition_bounds, CoalitionTable, MAX_PLAYERS, STORE_MEMBERS_UP_TO};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("{n} players exceeds the cap of {cap}")]
    TooManyPlayers { n: usize, cap: usize },
    #[error("player {player} is not a member of coalition {coalition:#b}")]
    NotMember { player: usize, coalition: u32 },
    #[error("degenerate {bound:?} denominator {value:e} for player {player} joining coalition {coalition:?}")]
    DegenerateDenominator { player: usize, coalition: Vec<usize>, bound: BoundKind, value: f64 },
    #[error("reference row has {got} entries, expected {expected}")]
    ReferenceLength { got: usize, expected: usize },
}

/// Member indices of `mask`, ascending.
pub fn members(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        (rest != 0).then(|| {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            j
        })
    })
}
