use rayon::prelude::*;

use super::DeaError;
use crate::dataset::Dataset;
use crate::simplex::{self, LinearProgram, Relation, Sense};

/// Multiplier weights for outputs (`u`) and inputs (`v`).
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub outputs: Vec<f64>,
    pub inputs: Vec<f64>,
}

impl Weights {
    pub fn virtual_output(&self, y: &[f64]) -> f64 {
        self.outputs.iter().zip(y).map(|(u, y)| u * y).sum()
    }

    pub fn virtual_input(&self, x: &[f64]) -> f64 {
        self.inputs.iter().zip(x).map(|(v, x)| v * x).sum()
    }

    /// Efficiency of DMU `j` of `data` under these weights.
    pub fn efficiency(&self, data: &Dataset, j: usize) -> Option<f64> {
        let den = self.virtual_input(&data.norm_inputs[j]);
        (den > 0.0).then(|| self.virtual_output(&data.norm_outputs[j]) / den)
    }
}

/// Optimal CCR efficiency and weights for every DMU.
#[derive(Debug, Clone, PartialEq)]
pub struct CcrResult {
    pub theta: Vec<f64>,
    pub weights: Vec<Weights>,
}

/// Solves the Charnes–Cooper form of the CCR ratio model for DMU `d`:
/// maximize `u·y_d` subject to `v·x_d = 1` and `u·y_j − v·x_j ≤ 0` for all `j`.
pub fn ccr_efficiency(data: &Dataset, d: usize) -> Result<(f64, Weights), DeaError> {
    let n = data.len();
    if d >= n {
        return Err(DeaError::IndexOutOfRange { index: d, n });
    }
    let (s, m) = (data.num_outputs(), data.num_inputs());
    let mut objective = data.norm_outputs[d].clone();
    objective.resize(s + m, 0.0);
    let mut lp = LinearProgram::new(Sense::Maximize, objective);

    let mut norm = vec![0.0; s];
    norm.extend_from_slice(&data.norm_inputs[d]);
    lp.add_constraint(norm, Relation::Equal, 1.0);
    for j in 0..n {
        let mut row = data.norm_outputs[j].clone();
        row.extend(data.norm_inputs[j].iter().map(|x| -x));
        lp.add_constraint(row, Relation::LessEq, 0.0);
    }

    let sol = simplex::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(DeaError::Solver {
            model: "CCR",
            dmu: d,
            status: sol.status,
            detail: "the dataset should always admit a bounded CCR optimum".into(),
        });
    }
    let weights = Weights { outputs: sol.x[..s].to_vec(), inputs: sol.x[s..].to_vec() };
    Ok((sol.objective, weights))
}

/// CCR scores for all DMUs, solved in parallel and collected in index order.
pub fn ccr_all(data: &Dataset) -> Result<CcrResult, DeaError> {
    let solved: Vec<(f64, Weights)> =
        (0..data.len()).into_par_iter().map(|d| ccr_efficiency(data, d)).collect::<Result<_, _>>()?;
    let (theta, weights) = solved.into_iter().unzip();
    Ok(CcrResult { theta, weights })
}
