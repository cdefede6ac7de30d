use super::{members, GameError};
use crate::dea::CrossEfficiencyMatrix;

/// Hard cap on players; the table has `2^n` entries.
pub const MAX_PLAYERS: usize = 24;
/// Per-member bounds are kept in memory only up to this many players.
pub const STORE_MEMBERS_UP_TO: usize = 20;

fn check_member(n: usize, mask: u32, j: usize) -> Result<(), GameError> {
    if n > MAX_PLAYERS {
        return Err(GameError::TooManyPlayers { n, cap: MAX_PLAYERS });
    }
    if j >= n || mask >> j & 1 == 0 || (n < 32 && mask >> n != 0) {
        return Err(GameError::NotMember { player: j, coalition: mask });
    }
    Ok(())
}

fn column_bounds(e: &CrossEfficiencyMatrix, mask: u32, j: usize) -> (f64, f64) {
    let others = mask & !(1 << j);
    if others == 0 {
        return (1.0, 1.0);
    }
    members(others).fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), d| {
        let v = e.get(d, j);
        (hi.max(v), lo.min(v))
    })
}

/// Best and worst score that member `j` of coalition `mask` receives from the
/// other members. A lone member scores (1, 1).
pub fn coalition_bounds(e: &CrossEfficiencyMatrix, mask: u32, j: usize) -> Result<(f64, f64), GameError> {
    check_member(e.len(), mask, j)?;
    Ok(column_bounds(e, mask, j))
}

/// Worth of a coalition: the sum of its members' best peer scores.
pub fn characteristic_value(e: &CrossEfficiencyMatrix, mask: u32) -> f64 {
    members(mask).map(|j| column_bounds(e, mask, j).0).sum()
}

/// Per-coalition aggregates of the peer-score bounds, indexed by bitmask.
pub struct CoalitionTable {
    n: usize,
    matrix: CrossEfficiencyMatrix,
    upper_sum: Vec<f64>,
    lower_sum: Vec<f64>,
    member_bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl CoalitionTable {
    /// Fills every coalition by extending smaller ones one member at a time:
    /// each extension costs one max/min per existing member plus one column
    /// scan for the newcomer.
    pub fn build(e: &CrossEfficiencyMatrix) -> Result<Self, GameError> {
        let n = e.len();
        if n > MAX_PLAYERS {
            return Err(GameError::TooManyPlayers { n, cap: MAX_PLAYERS });
        }
        let size = 1usize << n;
        let mut table = CoalitionTable {
            n,
            matrix: e.clone(),
            upper_sum: vec![0.0; size],
            lower_sum: vec![0.0; size],
            member_bounds: (n <= STORE_MEMBERS_UP_TO).then(|| (vec![0.0; size * n], vec![0.0; size * n])),
        };
        // One scratch frame of per-member bounds per depth of the subset tree.
        let mut upper = vec![0.0; (n + 1) * n];
        let mut lower = vec![0.0; (n + 1) * n];
        for first in 0..n {
            upper[n + first] = 1.0;
            lower[n + first] = 1.0;
            table.record(1 << first, &upper[n..2 * n], &lower[n..2 * n]);
            table.extend(1 << first, first, 1, &mut upper, &mut lower);
        }
        Ok(table)
    }

    fn record(&mut self, mask: u32, upper: &[f64], lower: &[f64]) {
        let (mut us, mut ls) = (0.0, 0.0);
        for j in members(mask) {
            us += upper[j];
            ls += lower[j];
        }
        self.upper_sum[mask as usize] = us;
        self.lower_sum[mask as usize] = ls;
        if let Some((mu, ml)) = self.member_bounds.as_mut() {
            let base = mask as usize * self.n;
            for j in members(mask) {
                mu[base + j] = upper[j];
                ml[base + j] = lower[j];
            }
        }
    }

    fn extend(&mut self, mask: u32, last: usize, depth: usize, upper: &mut [f64], lower: &mut [f64]) {
        let n = self.n;
        for k in last + 1..n {
            let next = mask | 1 << k;
            let (cur, new) = (depth * n, (depth + 1) * n);
            let lone = mask.count_ones() == 1;
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for j in members(mask) {
                let to_j = self.matrix.get(k, j);
                let (u, l) = if lone { (to_j, to_j) } else { (upper[cur + j].max(to_j), lower[cur + j].min(to_j)) };
                upper[new + j] = u;
                lower[new + j] = l;
                let to_k = self.matrix.get(j, k);
                hi = hi.max(to_k);
                lo = lo.min(to_k);
            }
            upper[new + k] = hi;
            lower[new + k] = lo;
            self.record(next, &upper[new..new + n], &lower[new..new + n]);
            if depth + 1 < n {
                self.extend(next, k, depth + 1, upper, lower);
            }
        }
    }

    pub fn num_players(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CrossEfficiencyMatrix {
        &self.matrix
    }

    /// Number of nonempty coalitions.
    pub fn num_coalitions(&self) -> usize {
        (1usize << self.n) - 1
    }

    /// Sum of members' upper bounds, i.e. the characteristic value. Zero for ∅.
    #[inline]
    pub fn upper_sum(&self, mask: u32) -> f64 {
        self.upper_sum[mask as usize]
    }

    #[inline]
    pub fn lower_sum(&self, mask: u32) -> f64 {
        self.lower_sum[mask as usize]
    }

    /// `(upper, lower)` bound for member `j` of `mask`; served from the stored
    /// table when present, otherwise recomputed from the matrix column.
    #[inline]
    pub fn bounds(&self, mask: u32, j: usize) -> (f64, f64) {
        match &self.member_bounds {
            Some((mu, ml)) => {
                let k = mask as usize * self.n + j;
                (mu[k], ml[k])
            }
            None => column_bounds(&self.matrix, mask, j),
        }
    }

    pub fn checked_bounds(&self, mask: u32, j: usize) -> Result<(f64, f64), GameError> {
        check_member(self.n, mask, j)?;
        Ok(self.bounds(mask, j))
    }

    pub fn stores_members(&self) -> bool {
        self.member_bounds.is_some()
    }
}
