//! Feasibility repair: turn an arbitrary annealer state into one that
//! decodes to a valid *maximal* matching in every block.

use crate::error::{Error, Result};
use crate::qubo::{BinaryState, QuboProblem};

/// Repair a state block by block.
///
/// Within each block, selected edges are kept greedily in descending gain
/// order (ties broken by `(left, right)` position), which drops the worse
/// edge of every conflicting pair; afterwards any still-compatible edges
/// are added in the same order until the block's matching is maximal. The
/// result is deterministic and idempotent, and a state that already
/// decodes to feasible maximal matchings passes through unchanged.
pub fn repair_feasibility(problem: &QuboProblem, state: &BinaryState) -> Result<BinaryState> {
    if state.len() != problem.num_vars() {
        return Err(Error::StateLength {
            got: state.len(),
            want: problem.num_vars(),
        });
    }
    let mut out = BinaryState::zeros(problem.num_vars());
    for meta in problem.blocks() {
        let by_preference = |vars: &mut Vec<usize>| {
            vars.sort_by(|&a, &b| {
                let (ga, gb) = (problem.gain_of_var(a), problem.gain_of_var(b));
                gb.partial_cmp(&ga)
                    .expect("gains are finite")
                    .then_with(|| {
                        let (ka, kb) = (problem.var_index()[a], problem.var_index()[b]);
                        (ka.left, ka.right).cmp(&(kb.left, kb.right))
                    })
            });
        };

        let mut used_left = vec![false; meta.n_left];
        let mut used_right = vec![false; meta.n_right];
        let mut claim = |var: usize, out: &mut BinaryState| {
            let key = problem.var_index()[var];
            if !used_left[key.left] && !used_right[key.right] {
                used_left[key.left] = true;
                used_right[key.right] = true;
                out.set(var, true);
            }
        };

        // Pass 1: resolve conflicts among the selected edges, best first.
        let mut selected: Vec<usize> = (meta.var_start..meta.var_end)
            .filter(|&v| state.get(v))
            .collect();
        by_preference(&mut selected);
        for v in selected {
            claim(v, &mut out);
        }
        // Pass 2: extend to a maximal matching with the remaining edges.
        let mut rest: Vec<usize> = (meta.var_start..meta.var_end)
            .filter(|&v| !out.get(v))
            .collect();
        by_preference(&mut rest);
        for v in rest {
            claim(v, &mut out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_maximal, WeightConvention, WeightedBipartiteGraph};
    use crate::qubo::{build_matching_qubo, build_multiplexed_qubo};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn star_problem() -> QuboProblem {
        let g = WeightedBipartiteGraph::new(
            1,
            2,
            [(0, 0, 0.8), (0, 1, 0.6)],
            WeightConvention::Similarity,
        )
        .unwrap();
        build_matching_qubo(&g, 0.7).unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng) -> WeightedBipartiteGraph {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let mut triples = Vec::new();
        for l in 0..n {
            for r in 0..m {
                if rng.gen_bool(0.6) {
                    triples.push((l, r, rng.gen_range(0.0..=1.0)));
                }
            }
        }
        if triples.is_empty() {
            triples.push((0, 0, 0.3));
        }
        WeightedBipartiteGraph::new(n, m, triples, WeightConvention::Similarity).unwrap()
    }

    #[test]
    fn conflicting_pair_keeps_the_heavier_edge() {
        let q = star_problem();
        let both = BinaryState::from_bits(vec![true, true]);
        let repaired = repair_feasibility(&q, &both).unwrap();
        assert_eq!(repaired.bits(), &[true, false]);
    }

    #[test]
    fn feasible_but_non_maximal_states_gain_edges() {
        let g = WeightedBipartiteGraph::new(
            2,
            2,
            [(0, 0, 0.9), (1, 1, 0.2)],
            WeightConvention::Similarity,
        )
        .unwrap();
        let q = build_matching_qubo(&g, 0.7).unwrap();
        let only_first = BinaryState::from_bits(vec![true, false]);
        let repaired = repair_feasibility(&q, &only_first).unwrap();
        assert_eq!(repaired.bits(), &[true, true]);
    }

    #[test]
    fn feasible_maximal_states_pass_through_unchanged() {
        let q = star_problem();
        // Selecting the *lighter* edge is feasible and maximal; repair must
        // respect the selection rather than swap in the heavier edge.
        let lighter = BinaryState::from_bits(vec![false, true]);
        let repaired = repair_feasibility(&q, &lighter).unwrap();
        assert_eq!(repaired, lighter);
    }

    #[test]
    fn repair_rejects_mismatched_lengths() {
        let q = star_problem();
        assert!(matches!(
            repair_feasibility(&q, &BinaryState::zeros(5)),
            Err(Error::StateLength { got: 5, want: 2 })
        ));
    }

    #[test]
    fn random_states_repair_to_feasible_maximal_matchings() {
        // Deterministic sweep over plenty of random (graph, state) pairs;
        // every repaired block must decode to a feasible maximal matching
        // and repairing twice must change nothing.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut checked = 0;
        while checked < 10_000 {
            let g0 = random_graph(&mut rng);
            let g1 = random_graph(&mut rng);
            let problem = if g1.n_left() == g0.n_left() && g1.n_right() == g0.n_right() {
                build_multiplexed_qubo(&[g0.clone(), g1.clone()], 0.7).unwrap()
            } else {
                build_matching_qubo(&g0, 0.7).unwrap()
            };
            for _ in 0..20 {
                let bits: Vec<bool> = (0..problem.num_vars()).map(|_| rng.gen_bool(0.4)).collect();
                let state = BinaryState::from_bits(bits);
                let repaired = repair_feasibility(&problem, &state).unwrap();
                for decoded in problem.decode(&repaired).unwrap() {
                    assert!(decoded.is_feasible(), "violations after repair");
                    let block = decoded.block;
                    let m = decoded.into_matching().unwrap();
                    let graph = if block == 0 { &g0 } else { &g1 };
                    assert!(
                        is_maximal(graph, &m).unwrap(),
                        "block {block} not maximal after repair"
                    );
                }
                let again = repair_feasibility(&problem, &repaired).unwrap();
                assert_eq!(again, repaired, "repair is not idempotent");
                checked += 1;
            }
        }
    }
}
