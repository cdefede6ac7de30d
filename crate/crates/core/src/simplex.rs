//! Dense two-phase primal simplex.
//!
//! Every program handled here is small (a few dozen columns at most), so the
//! solver keeps a full tableau and pivots with Bland's rule. The pivot order is
//! a pure function of the input, which makes the returned vertex reproducible
//! when a program has several optimal vertices.

use thiserror::Error;

/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-10;
/// Feasibility and optimality tolerance.
pub const FEAS_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
    GreaterEq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::LessEq => Relation::GreaterEq,
            Relation::Equal => Relation::Equal,
            Relation::GreaterEq => Relation::LessEq,
        }
    }

    /// Whether `lhs rel rhs` holds within `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::LessEq => lhs <= rhs + tol,
            Relation::Equal => (lhs - rhs).abs() <= tol,
            Relation::GreaterEq => lhs >= rhs - tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program over nonnegative (optionally upper-bounded) variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), lower: vec![0.0; n], upper: vec![None; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: Option<f64>) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, x);
            let v = match c.relation {
                Relation::LessEq => lhs - c.rhs,
                Relation::GreaterEq => c.rhs - lhs,
                Relation::Equal => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &xj) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - xj);
            if let Some(ub) = self.upper[j] {
                worst = worst.max(xj - ub);
            }
        }
        worst
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors do not match the objective length".into()));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("objective has a non-finite coefficient".into()));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {k} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::Malformed(format!("constraint {k} has a non-finite value")));
            }
        }
        for j in 0..n {
            let lb = self.lower[j];
            if !lb.is_finite() || lb < 0.0 {
                return Err(LpError::NegativeLowerBound { var: j, bound: lb });
            }
            if let Some(ub) = self.upper[j] {
                if !ub.is_finite() {
                    return Err(LpError::Malformed(format!("variable {j} has a non-finite upper bound")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective at `x` in the program's own sense; NaN unless optimal.
    pub objective: f64,
    /// Primal point; empty unless optimal.
    pub x: Vec<f64>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        LpSolution { status, objective: f64::NAN, x: Vec::new() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("variable {var} has lower bound {bound}; only nonnegative lower bounds are supported")]
    NegativeLowerBound { var: usize, bound: f64 },
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-major dense tableau. The last column holds the right-hand side and the
/// last row holds reduced costs of the current phase objective, stored as a
/// maximization: a positive entry marks an improving column.
struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.data[pr * w + pc];
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        self.data[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.data[pr * w + c];
                if v != 0.0 {
                    self.data[r * w + c] -= f * v;
                }
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Loads `cost` (maximization sense) into the objective row, priced out
    /// against the current basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let obj = self.rows * w;
        for c in 0..w {
            self.data[obj + c] = 0.0;
        }
        for (c, &v) in cost.iter().enumerate() {
            self.data[obj + c] = v;
        }
        for r in 0..self.rows {
            let b = self.basis[r];
            let f = self.data[obj + b];
            if f != 0.0 {
                for c in 0..w {
                    self.data[obj + c] -= f * self.data[r * w + c];
                }
            }
        }
    }

    /// Bland's rule: lowest-index improving column, then the minimum ratio
    /// with ties broken by the lowest basic variable index.
    fn run(&mut self, allowed: usize, pivots: &mut usize) -> Result<PhaseOutcome, LpError> {
        loop {
            let entering = (0..allowed).find(|&c| self.at(self.rows, c) > FEAS_TOL);
            let Some(pc) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - PIVOT_TOL
                                || (ratio <= bratio + PIVOT_TOL && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Ok(PhaseOutcome::Unbounded);
            };
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit(MAX_PIVOTS));
            }
            self.pivot(pr, pc);
        }
    }
}

/// Solves `lp` to a vertex optimum.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Shift x = lower + x' so every structural variable is bounded below by 0;
    // finite upper bounds become explicit rows.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &lp.constraints {
        let shift = dot(&c.coeffs, &lp.lower);
        rows.push((c.coeffs.clone(), c.relation, c.rhs - shift));
    }
    for j in 0..n {
        if let Some(ub) = lp.upper[j] {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, Relation::LessEq, ub - lp.lower[j]));
        }
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            for v in row.0.iter_mut() {
                *v = -*v;
            }
            row.1 = row.1.flipped();
            row.2 = -row.2;
        }
    }

    // Column layout: structural | slack/surplus | artificial.
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Equal).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::LessEq).count();
    let art_start = n + n_slack;
    let cols = art_start + n_art;
    let mut tab = Tableau { rows: m, cols, data: vec![0.0; (m + 1) * (cols + 1)], basis: vec![0; m] };
    let w = cols + 1;
    let (mut next_slack, mut next_art) = (n, art_start);
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        tab.data[r * w..r * w + n].copy_from_slice(coeffs);
        tab.data[r * w + cols] = *rhs;
        match rel {
            Relation::LessEq => {
                tab.data[r * w + next_slack] = 1.0;
                tab.basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::GreaterEq => {
                tab.data[r * w + next_slack] = -1.0;
                next_slack += 1;
                tab.data[r * w + next_art] = 1.0;
                tab.basis[r] = next_art;
                next_art += 1;
            }
            Relation::Equal => {
                tab.data[r * w + next_art] = 1.0;
                tab.basis[r] = next_art;
                next_art += 1;
            }
        }
    }

    let mut pivots = 0;
    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(art_start) {
            *c = -1.0;
        }
        tab.set_objective(&phase1);
        // Phase 1 is bounded below by zero, so it cannot report unbounded.
        tab.run(cols, &mut pivots)?;
        let infeasibility: f64 = (0..m).filter(|&r| tab.basis[r] >= art_start).map(|r| tab.rhs(r)).sum();
        if infeasibility > FEAS_TOL {
            return Ok(LpSolution::without_point(LpStatus::Infeasible));
        }
        // Drive remaining (zero-valued) artificials out of the basis; a row
        // with no usable pivot is redundant and is dropped.
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&c| tab.at(r, c).abs() > PIVOT_TOL) {
                    Some(c) => {
                        tab.pivot(r, c);
                        r += 1;
                    }
                    None => remove_row(&mut tab, r),
                }
            } else {
                r += 1;
            }
        }
    }

    let mut phase2 = vec![0.0; cols];
    for (j, &c) in lp.objective.iter().enumerate() {
        phase2[j] = match lp.sense {
            Sense::Maximize => c,
            Sense::Minimize => -c,
        };
    }
    tab.set_objective(&phase2);
    match tab.run(art_start, &mut pivots)? {
        PhaseOutcome::Unbounded => Ok(LpSolution::without_point(LpStatus::Unbounded)),
        PhaseOutcome::Optimal => {
            let mut x = lp.lower.clone();
            for r in 0..tab.rows {
                let b = tab.basis[r];
                if b < n {
                    x[b] += tab.rhs(r).max(0.0);
                }
            }
            Ok(LpSolution { status: LpStatus::Optimal, objective: lp.objective_value(&x), x })
        }
    }
}

fn remove_row(tab: &mut Tableau, r: usize) {
    let w = tab.width();
    tab.data.drain(r * w..(r + 1) * w);
    tab.basis.remove(r);
    tab.rows -= 1;
}
