use rayon::prelude::*;

use super::ccr::{ccr_efficiency, CcrResult, Weights};
use super::DeaError;
use crate::dataset::{Dataset, GroupAssignment, MATRIX_ENTRY_TOL};
use crate::simplex::{self, LinearProgram, Relation, Sense};

/// Peer-appraisal scores: entry (d, j) is evaluator d's score of target j.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossEfficiencyMatrix {
    names: Vec<String>,
    values: Vec<f64>,
}

impl CrossEfficiencyMatrix {
    /// Builds a matrix from row-major values (rows are evaluators).
    pub fn from_values(names: Vec<String>, values: Vec<f64>) -> Result<Self, DeaError> {
        let n = names.len();
        if n == 0 {
            return Err(DeaError::Matrix("matrix has no DMUs".into()));
        }
        if values.len() != n * n {
            return Err(DeaError::Matrix(format!("{} values for a {n}x{n} matrix", values.len())));
        }
        if let Some(k) = values.iter().position(|v| !(0.0..=1.0 + MATRIX_ENTRY_TOL).contains(v)) {
            return Err(DeaError::Matrix(format!("entry ({}, {}) = {} lies outside [0, 1]", k / n, k % n, values[k])));
        }
        Ok(CrossEfficiencyMatrix { names, values })
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, DeaError> {
        Self::from_values(names, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    pub fn get(&self, evaluator: usize, target: usize) -> f64 {
        self.values[evaluator * self.len() + target]
    }

    pub fn row(&self, evaluator: usize) -> &[f64] {
        let n = self.len();
        &self.values[evaluator * n..(evaluator + 1) * n]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|d| self.get(d, d)).collect()
    }

    pub fn max_abs_diff(&self, other: &CrossEfficiencyMatrix) -> Option<f64> {
        (self.len() == other.len())
            .then(|| self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Everything produced while building a cross-efficiency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossEvaluation {
    pub ccr: CcrResult,
    /// Secondary-goal weights per evaluator.
    pub weights: Vec<Weights>,
    pub matrix: CrossEfficiencyMatrix,
}

/// Solves the ally/adversary secondary-goal program for evaluator `d`.
///
/// Among weights that keep `d` at its CCR score `theta_d`, picks those that
/// minimize the allies' total slack minus the adversaries' total slack, where
/// the slack of target `j` is `v·x_j − u·y_j`. The evaluator's virtual input
/// is fixed to 1; without it the objective scales freely with the weights.
pub fn secondary_goal_weights(
    data: &Dataset,
    d: usize,
    groups: &GroupAssignment,
    theta_d: f64,
) -> Result<Weights, DeaError> {
    let n = data.len();
    if d >= n {
        return Err(DeaError::IndexOutOfRange { index: d, n });
    }
    if groups.len() != n {
        return Err(DeaError::GroupSize { groups: groups.len(), n });
    }
    let (s, m) = (data.num_outputs(), data.num_inputs());
    let peers: Vec<usize> = (0..n).filter(|&j| j != d).collect();
    let width = s + m + peers.len();

    let mut objective = vec![0.0; width];
    for (k, &j) in peers.iter().enumerate() {
        objective[s + m + k] = if groups.same_group(d, j) { 1.0 } else { -1.0 };
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);

    let weight_row = |j: usize, input_scale: f64| {
        let mut row = Vec::with_capacity(width);
        row.extend_from_slice(&data.norm_outputs[j]);
        row.extend(data.norm_inputs[j].iter().map(|x| -input_scale * x));
        row.resize(width, 0.0);
        row
    };
    for (k, &j) in peers.iter().enumerate() {
        let mut row = weight_row(j, 1.0);
        row[s + m + k] = 1.0;
        lp.add_constraint(row, Relation::Equal, 0.0);
    }
    lp.add_constraint(weight_row(d, theta_d), Relation::Equal, 0.0);
    let mut norm = vec![0.0; width];
    norm[s..s + m].copy_from_slice(&data.norm_inputs[d]);
    lp.add_constraint(norm, Relation::Equal, 1.0);

    let sol = simplex::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(DeaError::Solver {
            model: "secondary-goal",
            dmu: d,
            status: sol.status,
            detail: format!("theta = {theta_d:.12}; an inconsistent score or a zero input cell can cause this"),
        });
    }
    Ok(Weights { outputs: sol.x[..s].to_vec(), inputs: sol.x[s..s + m].to_vec() })
}

fn evaluate_row(
    data: &Dataset,
    d: usize,
    groups: &GroupAssignment,
) -> Result<(f64, Weights, Weights, Vec<f64>), DeaError> {
    let (theta, ccr_w) = ccr_efficiency(data, d)?;
    let w = secondary_goal_weights(data, d, groups, theta)?;
    let row = (0..data.len())
        .map(|j| {
            if j == d {
                Ok(theta)
            } else {
                w.efficiency(data, j).ok_or(DeaError::ZeroVirtualInput { evaluator: d, target: j })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((theta, ccr_w, w, row))
}

/// CCR scores, secondary-goal weights and the resulting matrix. Evaluators are
/// processed in parallel and merged by index.
pub fn evaluate_cross(data: &Dataset, groups: &GroupAssignment) -> Result<CrossEvaluation, DeaError> {
    let n = data.len();
    if groups.len() != n {
        return Err(DeaError::GroupSize { groups: groups.len(), n });
    }
    let rows: Vec<_> = (0..n).into_par_iter().map(|d| evaluate_row(data, d, groups)).collect::<Result<_, _>>()?;
    let mut ccr = CcrResult { theta: Vec::with_capacity(n), weights: Vec::with_capacity(n) };
    let mut weights = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * n);
    for (theta, ccr_w, w, row) in rows {
        ccr.theta.push(theta);
        ccr.weights.push(ccr_w);
        weights.push(w);
        values.extend(row);
    }
    let matrix = CrossEfficiencyMatrix::from_values(data.names.clone(), values)?;
    Ok(CrossEvaluation { ccr, weights, matrix })
}

pub fn cross_efficiency_matrix(data: &Dataset, groups: &GroupAssignment) -> Result<CrossEfficiencyMatrix, DeaError> {
    evaluate_cross(data, groups).map(|e| e.matrix)
}

/// How closely the matrix built from one clustering matches a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingFit {
    pub clusters: usize,
    pub groups: GroupAssignment,
    pub max_abs_deviation: f64,
}

/// Rebuilds the matrix for every cluster count `1..=n` and measures the
/// largest entry-wise deviation from `reference`. Fits come back ordered by
/// deviation, best first; ties keep the smaller cluster count first.
pub fn fit_cluster_count(data: &Dataset, reference: &CrossEfficiencyMatrix) -> Result<Vec<GroupingFit>, DeaError> {
    let n = data.len();
    if reference.len() != n {
        return Err(DeaError::Matrix(format!("reference is {}x{0}, dataset has {n} DMUs", reference.len())));
    }
    let mut fits = (1..=n)
        .map(|h| {
            let groups = super::cluster_groups(data, h)?;
            let m = cross_efficiency_matrix(data, &groups)?;
            let max_abs_deviation = m.max_abs_diff(reference).expect("sizes checked");
            Ok(GroupingFit { clusters: h, groups, max_abs_deviation })
        })
        .collect::<Result<Vec<_>, DeaError>>()?;
    fits.sort_by(|a, b| a.max_abs_deviation.total_cmp(&b.max_abs_deviation));
    Ok(fits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;

    #[test]
    fn single_ratio_pair_closed_form() {
        let ds = load_dataset("dmu,x:a,y:b\nA,1,1\nB,1,2\n".as_bytes()).unwrap();
        for groups in [GroupAssignment::single(2), GroupAssignment::new(vec![1, 2]).unwrap()] {
            let m = cross_efficiency_matrix(&ds, &groups).unwrap();
            let expect = [[0.5, 1.0], [0.5, 1.0]];
            for (d, row) in expect.iter().enumerate() {
                for (j, want) in row.iter().enumerate() {
                    assert!((m.get(d, j) - want).abs() < 1e-12, "({d},{j}) = {}", m.get(d, j));
                }
            }
        }
    }

    #[test]
    fn matrix_rejects_out_of_range() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(CrossEfficiencyMatrix::from_values(names.clone(), vec![1.0, 0.5, 0.2]).is_err());
        assert!(CrossEfficiencyMatrix::from_values(names.clone(), vec![1.0, 1.2, 0.2, 1.0]).is_err());
        assert!(CrossEfficiencyMatrix::from_values(names, vec![1.0, -0.1, 0.2, 1.0]).is_err());
    }

    #[test]
    fn group_size_must_match() {
        let ds = load_dataset("dmu,x:a,y:b\nA,1,1\nB,1,2\n".as_bytes()).unwrap();
        assert!(matches!(
            evaluate_cross(&ds, &GroupAssignment::single(3)),
            Err(DeaError::GroupSize { groups: 3, n: 2 })
        ));
    }
}
