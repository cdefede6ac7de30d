//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::fs::File;
use std::path::PathBuf;

use crossalloc::simplex::{LinearProgram, LpStatus, Relation, Sense};
use crossalloc::{load_dataset, load_matrix, CrossEfficiencyMatrix, Dataset};
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn dataset(name: &str) -> Dataset {
    load_dataset(File::open(data_path(name)).unwrap()).unwrap()
}

pub fn matrix(name: &str) -> CrossEfficiencyMatrix {
    load_matrix(File::open(data_path(name)).unwrap()).unwrap()
}

/// Columns of a `dmu,<col>,...` reference table, keyed by header.
pub fn reference(name: &str) -> HashMap<String, Vec<f64>> {
    let mut rdr = csv::Reader::from_path(data_path(name)).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let mut cols: HashMap<String, Vec<f64>> = header.iter().skip(1).map(|h| (h.clone(), Vec::new())).collect();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        for (k, h) in header.iter().enumerate().skip(1) {
            cols.get_mut(h).unwrap().push(rec[k].parse().unwrap());
        }
    }
    cols
}

pub fn max_abs_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Entries uniform in (0, 1], unit diagonal.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CrossEfficiencyMatrix {
    let mut values = Vec::with_capacity(n * n);
    for d in 0..n {
        for j in 0..n {
            values.push(if d == j { 1.0 } else { 1.0 - rng.gen::<f64>() });
        }
    }
    CrossEfficiencyMatrix::from_values((0..n).map(|i| format!("R{i}")).collect(), values).unwrap()
}

// ---------------------------------------------------------------------------
// Coalition game oracles: every quantity recomputed from matrix entries.

pub fn naive_bounds(e: &CrossEfficiencyMatrix, coalition: &[usize], j: usize) -> (f64, f64) {
    let scores: Vec<f64> = coalition.iter().filter(|&&d| d != j).map(|&d| e.get(d, j)).collect();
    if scores.is_empty() {
        return (1.0, 1.0);
    }
    let hi = scores.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scores.iter().cloned().fold(f64::MAX, f64::min);
    (hi, lo)
}

pub fn mask_members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

pub fn naive_sums(e: &CrossEfficiencyMatrix, coalition: &[usize]) -> (f64, f64) {
    coalition.iter().fold((0.0, 0.0), |(u, l), &j| {
        let (hi, lo) = naive_bounds(e, coalition, j);
        (u + hi, l + lo)
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Brute-force triple `(lower, central, upper)` by explicit enumeration of
/// every sub-coalition of the other players. `unit_empty` credits the empty
/// coalition with weight·1.
pub fn brute_force_shapley(e: &CrossEfficiencyMatrix, unit_empty: bool) -> Vec<(f64, f64, f64)> {
    let n = e.len();
    (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let mut acc = (0.0, 0.0, 0.0);
            for pick in 0u32..(1 << others.len()) {
                let s_set: Vec<usize> =
                    others.iter().enumerate().filter(|(k, _)| pick >> k & 1 == 1).map(|(_, &p)| p).collect();
                let s = s_set.len();
                let w = factorial(s) * factorial(n - s - 1) / factorial(n);
                if s == 0 {
                    if unit_empty {
                        acc.0 += w;
                        acc.1 += w;
                        acc.2 += w;
                    }
                    continue;
                }
                let mut joined = s_set.clone();
                joined.push(i);
                let (hi_i, lo_i) = naive_bounds(e, &joined, i);
                let (mut ju, mut jl, mut bu, mut bl) = (0.0, 0.0, 0.0, 0.0);
                for &j in &s_set {
                    let (a, b) = naive_bounds(e, &joined, j);
                    let (c, d) = naive_bounds(e, &s_set, j);
                    ju += a;
                    jl += b;
                    bu += c;
                    bl += d;
                }
                let sf = s as f64;
                acc.0 += w * lo_i / (sf + ju - bl);
                acc.1 += w * hi_i / (sf + ju - bu);
                acc.2 += w * hi_i / (sf + jl - bu);
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Average-linkage clustering oracle: recomputes every cluster distance as the
// mean over point pairs instead of updating a distance matrix.

pub fn naive_average_linkage(points: &[Vec<f64>], h: usize) -> Vec<usize> {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    while clusters.len() > h {
        let mut best = (0, 1, f64::INFINITY);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let mut total = 0.0;
                for &p in &clusters[a] {
                    for &q in &clusters[b] {
                        total += dist(&points[p], &points[q]);
                    }
                }
                let avg = total / (clusters[a].len() * clusters[b].len()) as f64;
                if avg < best.2 {
                    best = (a, b, avg);
                }
            }
        }
        let merged = clusters.remove(best.1);
        clusters[best.0].extend(merged);
    }
    // Clusters stay ordered by their smallest member.
    let mut labels = vec![0; points.len()];
    for (id, c) in clusters.iter().enumerate() {
        for &p in c {
            labels[p] = id + 1;
        }
    }
    labels
}

// ---------------------------------------------------------------------------
// Linear programming oracle by vertex enumeration.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-11 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                        *x -= f * p;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Hyperplanes `a·x = b` that can bound a vertex, plus the full row list for
/// feasibility checks.
fn rows_of(lp: &LinearProgram) -> Vec<(Vec<f64>, Relation, f64)> {
    let n = lp.num_vars();
    let mut rows: Vec<(Vec<f64>, Relation, f64)> =
        lp.constraints.iter().map(|c| (c.coeffs.clone(), c.relation, c.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e.clone(), Relation::GreaterEq, lp.lower[j]));
        if let Some(ub) = lp.upper[j] {
            rows.push((e, Relation::LessEq, ub));
        }
    }
    rows
}

fn best_vertex(rows: &[(Vec<f64>, Relation, f64)], objective: &[f64], n: usize) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn combos(k: usize, start: usize, total: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == pick.len() {
            f(pick);
            return;
        }
        for i in start..total {
            pick[k] = i;
            combos(k + 1, i + 1, total, pick, f);
        }
    }
    combos(0, 0, rows.len(), &mut pick, &mut |sel| {
        let a = sel.iter().map(|&r| rows[r].0.clone()).collect();
        let b = sel.iter().map(|&r| rows[r].2).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = rows.iter().all(|(a, rel, rhs)| {
                let lhs: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
                rel.holds(lhs, *rhs, 1e-8 * (1.0 + rhs.abs()))
            });
            if feasible {
                let v: f64 = objective.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    });
    best
}

/// Optimal value (in the program's own sense) or status, by enumerating
/// every basis of the constraint and bound hyperplanes.
pub fn vertex_oracle(lp: &LinearProgram) -> OracleOutcome {
    let n = lp.num_vars();
    let sign = if lp.sense == Sense::Maximize { 1.0 } else { -1.0 };
    let c: Vec<f64> = lp.objective.iter().map(|v| sign * v).collect();
    let rows = rows_of(lp);
    let Some(best) = best_vertex(&rows, &c, n) else {
        return OracleOutcome::Infeasible;
    };
    // Recession directions d ≥ 0 with Σd = 1; any improving one means unbounded.
    let mut cone: Vec<(Vec<f64>, Relation, f64)> = rows.iter().map(|(a, rel, _)| (a.clone(), *rel, 0.0)).collect();
    cone.push((vec![1.0; n], Relation::Equal, 1.0));
    match best_vertex(&cone, &c, n) {
        Some(ray) if ray > 1e-9 => OracleOutcome::Unbounded,
        _ => OracleOutcome::Optimal(sign * best),
    }
}

/// Random program with up to six variables and six rows. When `boxed`, every
/// variable gets an upper bound so the feasible region is bounded.
pub fn random_lp<R: Rng>(rng: &mut R, boxed: bool) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let rows = rng.gen_range(1..=6);
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let objective = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let mut lp = LinearProgram::new(sense, objective);
    for _ in 0..rows {
        let coeffs = (0..n).map(|_| rng.gen_range(-4..=6) as f64).collect();
        let relation = match rng.gen_range(0..6) {
            0 => Relation::Equal,
            1 | 2 => Relation::GreaterEq,
            _ => Relation::LessEq,
        };
        lp.add_constraint(coeffs, relation, rng.gen_range(-3..=12) as f64);
    }
    if boxed {
        for j in 0..n {
            lp.set_bounds(j, 0.0, Some(rng.gen_range(1..=10) as f64));
        }
    }
    lp
}

pub fn status_of(outcome: OracleOutcome) -> LpStatus {
    match outcome {
        OracleOutcome::Optimal(_) => LpStatus::Optimal,
        OracleOutcome::Infeasible => LpStatus::Infeasible,
        OracleOutcome::Unbounded => LpStatus::Unbounded,
    }
}
