use super::DeaError;
use crate::dataset::{Dataset, GroupAssignment};

/// Average-linkage agglomerative clustering of DMUs cut at `h` clusters.
///
/// Each DMU is represented by its normalized inputs followed by its normalized
/// outputs; distances are Euclidean. Among equally close pairs the one with the
/// lowest (first, second) representative index merges first. A cluster's
/// representative is its lowest DMU index, and group ids are assigned in order
/// of representatives, so DMU 0 is always in group 1.
pub fn cluster_groups(data: &Dataset, h: usize) -> Result<GroupAssignment, DeaError> {
    let n = data.len();
    if h == 0 || h > n {
        return Err(DeaError::ClusterCount { h, n });
    }
    let features: Vec<Vec<f64>> =
        (0..n).map(|i| data.norm_inputs[i].iter().chain(&data.norm_outputs[i]).copied().collect()).collect();

    let mut dist = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let d = features[a].iter().zip(&features[b]).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }

    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    for _ in 0..n - h {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in (0..n).filter(|&a| active[a]) {
            for b in (a + 1..n).filter(|&b| active[b]) {
                if best.is_none_or(|(_, _, d)| dist[a][b] < d) {
                    best = Some((a, b, dist[a][b]));
                }
            }
        }
        let (a, b, _) = best.expect("at least two active clusters");
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for k in (0..n).filter(|&k| active[k] && k != a && k != b) {
            let merged = (sa * dist[a][k] + sb * dist[b][k]) / (sa + sb);
            dist[a][k] = merged;
            dist[k][a] = merged;
        }
        size[a] += size[b];
        active[b] = false;
        for o in owner.iter_mut().filter(|o| **o == b) {
            *o = a;
        }
    }

    let mut id_of = vec![0usize; n];
    let mut next = 0;
    for rep in (0..n).filter(|&r| active[r]) {
        next += 1;
        id_of[rep] = next;
    }
    let groups = owner.iter().map(|&rep| id_of[rep]).collect();
    Ok(GroupAssignment::new(groups).expect("cluster ids are contiguous"))
}
