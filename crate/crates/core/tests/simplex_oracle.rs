mod common;

use common::{random_lp, status_of, vertex_oracle, OracleOutcome};
use crossalloc::simplex::{solve, LpStatus, FEAS_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bounded_programs_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut optimal = 0;
    let mut tried = 0;
    while optimal < 50 {
        tried += 1;
        let lp = random_lp(&mut rng, true);
        let sol = solve(&lp).unwrap();
        let oracle = vertex_oracle(&lp);
        assert_eq!(sol.status, status_of(oracle), "program {tried}: {lp:?}");
        if let OracleOutcome::Optimal(best) = oracle {
            optimal += 1;
            assert!((sol.objective - best).abs() <= 1e-7, "program {tried}: {} vs {best}", sol.objective);
        }
    }
    assert!(tried < 500, "generator produced too few feasible programs");
}

#[test]
fn unboxed_statuses_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut seen = [0usize; 3];
    for k in 0..300 {
        let lp = random_lp(&mut rng, false);
        let sol = solve(&lp).unwrap();
        let oracle = vertex_oracle(&lp);
        assert_eq!(sol.status, status_of(oracle), "program {k}: {lp:?}");
        if let OracleOutcome::Optimal(best) = oracle {
            assert!((sol.objective - best).abs() <= 1e-7, "program {k}");
        }
        seen[sol.status as usize] += 1;
    }
    assert!(seen.iter().all(|&c| c > 10), "status mix too thin: {seen:?}");
}

#[test]
fn optimal_points_are_feasible_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..300 {
        let boxed = rng.gen_bool(0.5);
        let lp = random_lp(&mut rng, boxed);
        let sol = solve(&lp).unwrap();
        if sol.status == LpStatus::Optimal {
            assert!(lp.max_violation(&sol.x) <= FEAS_TOL, "violation {}", lp.max_violation(&sol.x));
            assert!((lp.objective_value(&sol.x) - sol.objective).abs() <= 1e-9);
        }
        let again = solve(&lp).unwrap();
        assert_eq!(again.status, sol.status);
        assert_eq!(again.x, sol.x);
        assert_eq!(again.objective.to_bits(), sol.objective.to_bits());
    }
}
