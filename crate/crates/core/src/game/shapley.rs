use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::CoalitionTable;
use super::{members, GameError};
use crate::dea::CrossEfficiencyMatrix;

/// Term denominators at or below this are reported as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// How the empty coalition enters the Shapley sum. Its ratio term is 0/0, so
/// it is either skipped or credited with the classic marginal value
/// `v({i}) − v(∅) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmptyCoalition {
    Exclude,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Central,
    Upper,
}

/// Per-player pessimistic, central and optimistic modified Shapley values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleyTriple {
    pub phi_lower: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_upper: Vec<f64>,
}

impl ShapleyTriple {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn row(&self, kind: BoundKind) -> &[f64] {
        match kind {
            BoundKind::Lower => &self.phi_lower,
            BoundKind::Central => &self.phi,
            BoundKind::Upper => &self.phi_upper,
        }
    }

    /// Computes all three rows for every player from a prebuilt table.
    pub fn from_table(table: &CoalitionTable, convention: EmptyCoalition) -> Result<Self, GameError> {
        let n = table.num_players();
        let rows: Vec<[f64; 3]> =
            (0..n).into_par_iter().map(|i| player_sums(table, i, convention)).collect::<Result<_, _>>()?;
        Ok(ShapleyTriple {
            phi_lower: rows.iter().map(|r| r[0]).collect(),
            phi: rows.iter().map(|r| r[1]).collect(),
            phi_upper: rows.iter().map(|r| r[2]).collect(),
        })
    }
}

/// `s!(n−s−1)!/n!` for `s = 0..n`, evaluated as `1 / (n·C(n−1, s))`; the
/// binomial is exact in `f64` for every size under the player cap.
pub fn coalition_weights(n: usize) -> Vec<f64> {
    let mut binom = 1.0_f64;
    (0..n)
        .map(|s| {
            if s > 0 {
                binom = binom * (n - s) as f64 / s as f64;
            }
            1.0 / (n as f64 * binom)
        })
        .collect()
}

fn player_sums(table: &CoalitionTable, i: usize, convention: EmptyCoalition) -> Result<[f64; 3], GameError> {
    let n = table.num_players();
    let weights = coalition_weights(n);
    let bit = 1u32 << i;
    let mut sums = match convention {
        EmptyCoalition::Exclude => [0.0; 3],
        EmptyCoalition::Unit => [weights[0]; 3],
    };
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let rest = all & !bit;
    // Subsets of `rest` in ascending numeric order.
    let mut s_mask = 0u32;
    loop {
        s_mask = s_mask.wrapping_sub(rest) & rest;
        if s_mask == 0 {
            break;
        }
        let joined = s_mask | bit;
        let s = s_mask.count_ones() as usize;
        let w = weights[s];
        let (hi_i, lo_i) = table.bounds(joined, i);
        let joined_upper = table.upper_sum(joined) - hi_i;
        let joined_lower = table.lower_sum(joined) - lo_i;
        let before_upper = table.upper_sum(s_mask);
        let before_lower = table.lower_sum(s_mask);
        let sf = s as f64;

        let terms = [
            (BoundKind::Lower, lo_i, sf + joined_upper - before_lower),
            (BoundKind::Central, hi_i, sf + joined_upper - before_upper),
            (BoundKind::Upper, hi_i, sf + joined_lower - before_upper),
        ];
        for (k, (bound, num, den)) in terms.into_iter().enumerate() {
            if den <= DEGENERATE_TOL {
                return Err(GameError::DegenerateDenominator {
                    player: i,
                    coalition: members(s_mask).collect(),
                    bound,
                    value: den,
                });
            }
            sums[k] += w * num / den;
        }
    }
    Ok(sums)
}

pub fn shapley_triple(e: &CrossEfficiencyMatrix, convention: EmptyCoalition) -> Result<ShapleyTriple, GameError> {
    ShapleyTriple::from_table(&CoalitionTable::build(e)?, convention)
}

/// Central modified Shapley value per player.
pub fn modified_shapley(e: &CrossEfficiencyMatrix, convention: EmptyCoalition) -> Result<Vec<f64>, GameError> {
    shapley_triple(e, convention).map(|t| t.phi)
}

/// `(upper, lower)` modified Shapley bounds per player.
pub fn shapley_bounds(
    e: &CrossEfficiencyMatrix,
    convention: EmptyCoalition,
) -> Result<(Vec<f64>, Vec<f64>), GameError> {
    shapley_triple(e, convention).map(|t| (t.phi_upper, t.phi_lower))
}

/// Outcome of fitting the empty-coalition convention to a reference row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub chosen: EmptyCoalition,
    /// Largest absolute deviation of the central row under each convention.
    pub exclude_deviation: f64,
    pub unit_deviation: f64,
}

/// Picks the convention whose central row lies closest (max-abs) to
/// `reference`. Ties go to `Exclude`.
pub fn calibrate_empty_coalition(table: &CoalitionTable, reference: &[f64]) -> Result<Calibration, GameError> {
    let n = table.num_players();
    if reference.len() != n {
        return Err(GameError::ReferenceLength { got: reference.len(), expected: n });
    }
    let dev = |c| -> Result<f64, GameError> {
        let t = ShapleyTriple::from_table(table, c)?;
        Ok(t.phi.iter().zip(reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    };
    let exclude_deviation = dev(EmptyCoalition::Exclude)?;
    let unit_deviation = dev(EmptyCoalition::Unit)?;
    let chosen = if unit_deviation < exclude_deviation { EmptyCoalition::Unit } else { EmptyCoalition::Exclude };
    Ok(Calibration { chosen, exclude_deviation, unit_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> CrossEfficiencyMatrix {
        let names = (0..rows.len()).map(|i| format!("D{i}")).collect();
        CrossEfficiencyMatrix::from_values(names, rows.concat()).unwrap()
    }

    #[test]
    fn weights_sum_to_one_over_orderings() {
        for n in 1..=24 {
            let w = coalition_weights(n);
            // Σ_s C(n−1, s)·w_s = 1
            let mut binom = 1.0;
            let mut total = 0.0;
            for (s, ws) in w.iter().enumerate() {
                if s > 0 {
                    binom = binom * (n - s) as f64 / s as f64;
                }
                total += binom * ws;
            }
            assert!((total - 1.0).abs() < 1e-12, "n = {n}");
        }
        assert_eq!(coalition_weights(3), [1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0]);
    }

    #[test]
    fn symmetric_pair() {
        let e = matrix(&[&[1.0, 0.7], &[0.7, 1.0]]);
        let t = shapley_triple(&e, EmptyCoalition::Exclude).unwrap();
        assert_eq!(t.phi[0], t.phi[1]);
    }

    #[test]
    fn pairs_have_collapsed_bounds() {
        let e = matrix(&[&[1.0, 0.3], &[0.8, 1.0]]);
        for c in [EmptyCoalition::Exclude, EmptyCoalition::Unit] {
            let t = shapley_triple(&e, c).unwrap();
            assert_eq!(t.phi_lower, t.phi);
            assert_eq!(t.phi_upper, t.phi);
        }
        // Player 0 joins {1}: numerator E[1][0] = 0.8, denominator 1 + E[0][1] − 1.
        let t = shapley_triple(&e, EmptyCoalition::Exclude).unwrap();
        assert!((t.phi[0] - 0.5 * 0.8 / 0.3).abs() < 1e-12);
        let u = shapley_triple(&e, EmptyCoalition::Unit).unwrap();
        assert!((u.phi[0] - t.phi[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_denominator_names_the_coalition() {
        let e = matrix(&[&[1.0, 0.0], &[0.5, 1.0]]);
        let err = shapley_triple(&e, EmptyCoalition::Exclude).unwrap_err();
        assert_eq!(
            err,
            GameError::DegenerateDenominator { player: 0, coalition: vec![1], bound: BoundKind::Lower, value: 0.0 }
        );
    }

    #[test]
    fn singleton_game() {
        let e = matrix(&[&[1.0]]);
        let t = shapley_triple(&e, EmptyCoalition::Unit).unwrap();
        assert_eq!(t.phi, [1.0]);
        let t = shapley_triple(&e, EmptyCoalition::Exclude).unwrap();
        assert_eq!(t.phi, [0.0]);
    }

    #[test]
    fn calibration_prefers_the_closer_row() {
        let e = matrix(&[&[1.0, 0.3, 0.6], &[0.8, 1.0, 0.5], &[0.4, 0.9, 1.0]]);
        let table = CoalitionTable::build(&e).unwrap();
        let unit = ShapleyTriple::from_table(&table, EmptyCoalition::Unit).unwrap();
        let cal = calibrate_empty_coalition(&table, &unit.phi).unwrap();
        assert_eq!(cal.chosen, EmptyCoalition::Unit);
        assert_eq!(cal.unit_deviation, 0.0);
        assert!((cal.exclude_deviation - 1.0 / 3.0).abs() < 1e-12);
        assert!(calibrate_empty_coalition(&table, &[0.1]).is_err());
    }
}
