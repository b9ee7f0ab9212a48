//! Randomized invariant checks over the core algebra: QUBO energies,
//! encode/decode, repair, exact solving, ensemble integration, and
//! metric symmetries.

use annealmot::ensemble::{integrate_cyclic, integrate_majority, SolutionSet};
use annealmot::graph::{
    is_maximal, oracle_solve, Matching, WeightConvention, WeightedBipartiteGraph,
};
use annealmot::metrics::{compute_idf1, compute_mota, Trajectories};
use annealmot::qubo::{build_matching_qubo, BinaryState};
use annealmot::solvers::{repair_feasibility, tts};
use annealmot::tracking::{iou, BoundingBox};

use proptest::prelude::*;

/// A random bipartite graph description: side sizes, an edge subset, and
/// unit-interval weight draws (mapped into the convention's band).
#[derive(Debug, Clone)]
struct GraphSpec {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
    raws: Vec<f64>,
    similarity: bool,
}

impl GraphSpec {
    fn build(&self) -> WeightedBipartiteGraph {
        let convention = if self.similarity {
            WeightConvention::Similarity
        } else {
            WeightConvention::NegativeCost
        };
        let triples = self.edges.iter().zip(&self.raws).map(|(&(l, r), &w)| {
            let weight = if self.similarity { w } else { w - 1.0 };
            (l, r, weight)
        });
        WeightedBipartiteGraph::new(self.n_left, self.n_right, triples, convention)
            .expect("generated spec is structurally valid")
    }
}

/// Strategy for graphs with `min_edges..=max_edges` edges on sides of at
/// most 4 nodes, in either weight convention.
fn arb_graph(min_edges: usize, max_edges: usize) -> impl Strategy<Value = GraphSpec> {
    (1usize..=4, 1usize..=4, any::<bool>())
        .prop_flat_map(move |(n_left, n_right, similarity)| {
            let cap = (n_left * n_right).min(max_edges);
            let lo = min_edges.min(cap);
            (
                Just(n_left),
                Just(n_right),
                Just(similarity),
                proptest::collection::btree_set((0..n_left, 0..n_right), lo..=cap),
            )
        })
        .prop_flat_map(|(n_left, n_right, similarity, edge_set)| {
            let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
            let count = edges.len();
            (
                Just(GraphSpec {
                    n_left,
                    n_right,
                    edges,
                    raws: Vec::new(),
                    similarity,
                }),
                // Open below, closed above: keeps NegativeCost weights in
                // band after the w - 1 shift and avoids duplicate-free-zero
                // ambiguity in similarity graphs.
                proptest::collection::vec(0.05f64..=1.0, count),
            )
        })
        .prop_map(|(mut spec, raws)| {
            spec.raws = raws;
            spec
        })
}

/// Deterministically select a conflict-free edge subset from selection
/// bits, greedy in edge order.
fn greedy_matching(graph: &WeightedBipartiteGraph, picks: &[bool]) -> Matching {
    let mut used_left = vec![false; graph.n_left()];
    let mut used_right = vec![false; graph.n_right()];
    let mut pairs = Vec::new();
    for (i, e) in graph.edges().iter().enumerate() {
        if picks.get(i).copied().unwrap_or(false) && !used_left[e.left] && !used_right[e.right] {
            used_left[e.left] = true;
            used_right[e.right] = true;
            pairs.push((e.left, e.right));
        }
    }
    Matching::new(pairs).expect("greedy selection never conflicts")
}

/// Count set-bit pairs that share a node (the QUBO's penalized pairs).
fn violating_pairs(graph: &WeightedBipartiteGraph, state: &BinaryState) -> usize {
    let edges = graph.edges();
    let mut count = 0;
    for i in 0..edges.len() {
        if !state.get(i) {
            continue;
        }
        for j in (i + 1)..edges.len() {
            if !state.get(j) {
                continue;
            }
            if edges[i].left == edges[j].left || edges[i].right == edges[j].right {
                count += 1;
            }
        }
    }
    count
}

proptest! {
    /// On feasible states every penalty term vanishes: the energy is
    /// exactly the negated sum of selected gains.
    #[test]
    fn feasible_states_cost_their_negated_gain(
        spec in arb_graph(1, 10),
        picks in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let graph = spec.build();
        let problem = build_matching_qubo(&graph, 0.7).unwrap();
        let matching = greedy_matching(&graph, &picks);
        let state = problem.encode(std::slice::from_ref(&matching)).unwrap();
        let energy = problem.energy(&state).unwrap();
        let gain_sum: f64 = matching
            .pairs()
            .map(|(l, r)| graph.convention().gain(graph.weight(l, r).unwrap()))
            .sum();
        prop_assert!((energy + gain_sum).abs() < 1e-9, "energy {energy} vs gain {gain_sum}");
    }

    /// On arbitrary states the energy decomposes into the feasible part
    /// plus exactly lambda per same-node selected pair.
    #[test]
    fn penalties_count_violating_pairs_exactly(
        spec in arb_graph(1, 10),
        bits in proptest::collection::vec(any::<bool>(), 10),
        lambda in 0.1f64..=2.0,
    ) {
        let graph = spec.build();
        let problem = build_matching_qubo(&graph, lambda).unwrap();
        let n = problem.num_vars();
        let state = BinaryState::from_bits(bits.iter().copied().take(n).chain(
            std::iter::repeat_n(false, n.saturating_sub(bits.len()))
        ).collect());
        let energy = problem.energy(&state).unwrap();
        let gain_sum: f64 = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| state.get(*i))
            .map(|(_, e)| graph.convention().gain(e.weight))
            .sum();
        let expected = -gain_sum + lambda * violating_pairs(&graph, &state) as f64;
        prop_assert!(
            (energy - expected).abs() < 1e-9,
            "energy {energy} vs decomposition {expected}"
        );
    }

    /// encode and decode are inverse on feasible matchings.
    #[test]
    fn encode_decode_round_trips(
        spec in arb_graph(1, 10),
        picks in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let graph = spec.build();
        let problem = build_matching_qubo(&graph, 0.7).unwrap();
        let matching = greedy_matching(&graph, &picks);
        let state = problem.encode(std::slice::from_ref(&matching)).unwrap();
        let decoded = problem.decode(&state).unwrap();
        prop_assert_eq!(decoded.len(), 1);
        prop_assert!(decoded[0].is_feasible());
        let back = decoded.into_iter().next().unwrap().into_matching().unwrap();
        let a: Vec<_> = matching.pairs().collect();
        let b: Vec<_> = back.pairs().collect();
        prop_assert_eq!(a, b);
    }

    /// Repair turns any state into a feasible, maximal matching.
    #[test]
    fn repair_yields_feasible_maximal_states(
        spec in arb_graph(1, 10),
        bits in proptest::collection::vec(any::<bool>(), 10),
    ) {
        let graph = spec.build();
        let problem = build_matching_qubo(&graph, 0.7).unwrap();
        let n = problem.num_vars();
        let state = BinaryState::from_bits(bits.iter().copied().take(n).chain(
            std::iter::repeat_n(false, n.saturating_sub(bits.len()))
        ).collect());
        let repaired = repair_feasibility(&problem, &state).unwrap();
        let decoded = problem.decode(&repaired).unwrap();
        prop_assert!(decoded[0].is_feasible());
        let m = decoded.into_iter().next().unwrap().into_matching().unwrap();
        prop_assert!(is_maximal(&graph, &m).unwrap());
    }

    /// The exact solver's result matches brute-force enumeration of every
    /// maximal matching, and is itself maximal and deterministic.
    #[test]
    fn oracle_matches_brute_force(spec in arb_graph(0, 8)) {
        let graph = spec.build();
        let (best, weight) = oracle_solve(&graph).unwrap();
        prop_assert!(is_maximal(&graph, &best).unwrap());
        let (again, weight2) = oracle_solve(&graph).unwrap();
        prop_assert_eq!(weight, weight2);
        let a: Vec<_> = best.pairs().collect();
        let b: Vec<_> = again.pairs().collect();
        prop_assert_eq!(a, b);

        let edges = graph.edges();
        let mut best_gain = f64::NEG_INFINITY;
        for mask in 0u32..(1 << edges.len()) {
            let picks: Vec<bool> = (0..edges.len()).map(|i| mask >> i & 1 == 1).collect();
            // Reject masks where the greedy filter dropped a conflicting
            // pick: those are not subsets chosen by this mask.
            let m = greedy_matching(&graph, &picks);
            if m.len() != picks.iter().filter(|&&b| b).count() {
                continue;
            }
            if !is_maximal(&graph, &m).unwrap() {
                continue;
            }
            let gain: f64 = m
                .pairs()
                .map(|(l, r)| graph.convention().gain(graph.weight(l, r).unwrap()))
                .sum();
            best_gain = best_gain.max(gain);
        }
        let oracle_gain: f64 = best
            .pairs()
            .map(|(l, r)| graph.convention().gain(graph.weight(l, r).unwrap()))
            .sum();
        prop_assert!((oracle_gain - best_gain).abs() < 1e-9,
            "oracle gain {oracle_gain} vs enumerated best {best_gain}");
    }

    /// Both integrators return valid matchings over the shared edge set;
    /// the cyclic one is additionally maximal.
    #[test]
    fn integrators_return_valid_matchings(
        spec in arb_graph(1, 10),
        seeds in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 10), 2..=4),
    ) {
        let graph = spec.build();
        let problem = build_matching_qubo(&graph, 0.7).unwrap();
        let inputs: Vec<Matching> = seeds
            .iter()
            .map(|bits| {
                let n = problem.num_vars();
                let state = BinaryState::from_bits(bits.iter().copied().take(n).chain(
                    std::iter::repeat_n(false, n.saturating_sub(bits.len()))
                ).collect());
                let repaired = repair_feasibility(&problem, &state).unwrap();
                problem
                    .decode(&repaired)
                    .unwrap()
                    .into_iter()
                    .next()
                    .unwrap()
                    .into_matching()
                    .unwrap()
            })
            .collect();
        let p = inputs.len();
        let set = SolutionSet::new(vec![graph.clone(); p], inputs.clone()).unwrap();

        let cyclic = integrate_cyclic(&set);
        prop_assert!(is_maximal(&graph, &cyclic).unwrap());
        for (l, r) in cyclic.pairs() {
            prop_assert!(graph.has_edge(l, r));
        }
        // The integrated gain never falls below the best input's,
        // whichever weight convention the graph uses.
        let gain_of = |m: &Matching| -> f64 {
            m.pairs()
                .map(|(l, r)| graph.convention().gain(graph.weight(l, r).unwrap()))
                .sum()
        };
        let best_input = inputs.iter().map(&gain_of).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(
            gain_of(&cyclic) >= best_input - 1e-9,
            "integrated gain {} below best input {best_input}",
            gain_of(&cyclic)
        );

        let majority = integrate_majority(&set);
        for (l, r) in majority.pairs() {
            prop_assert!(graph.has_edge(l, r));
        }
    }

    /// MOTA and IDF1 do not change when hypothesis track ids are renamed.
    #[test]
    fn metrics_ignore_hypothesis_id_labels(
        boxes in proptest::collection::vec(
            (1i64..=4, 0i64..=3, 0u8..=6, 0u8..=6),
            1..=14,
        ),
        offset in 10i64..=1000,
    ) {
        // (frame, raw id, grid x, grid y) -> disjoint 10x10 boxes on a grid.
        let mut gt = Trajectories::new();
        let mut hyp = Trajectories::new();
        let mut relabeled = Trajectories::new();
        let mut seen = std::collections::BTreeSet::new();
        for &(frame, id, gx, gy) in &boxes {
            if !seen.insert((frame, id)) {
                continue; // one box per (frame, id)
            }
            let bbox = BoundingBox::new(20.0 * gx as f64, 20.0 * gy as f64, 10.0, 10.0).unwrap();
            gt.push(frame, id, bbox);
            hyp.push(frame, id, bbox);
            relabeled.push(frame, offset - id, bbox);
        }
        let a = compute_mota(&gt, &hyp, 0.5).unwrap();
        let b = compute_mota(&gt, &relabeled, 0.5).unwrap();
        prop_assert_eq!(a.mota, b.mota);
        prop_assert_eq!(a.id_switches, b.id_switches);
        let ia = compute_idf1(&gt, &hyp, 0.5).unwrap();
        let ib = compute_idf1(&gt, &relabeled, 0.5).unwrap();
        prop_assert!((ia.idf1 - ib.idf1).abs() < 1e-12);
    }

    /// Overlap is symmetric, bounded, and exact on self-comparison.
    #[test]
    fn overlap_is_a_bounded_symmetric_similarity(
        ax in -50.0f64..50.0, ay in -50.0f64..50.0,
        aw in 0.5f64..40.0, ah in 0.5f64..40.0,
        bx in -50.0f64..50.0, by in -50.0f64..50.0,
        bw in 0.5f64..40.0, bh in 0.5f64..40.0,
    ) {
        let a = BoundingBox::new(ax, ay, aw, ah).unwrap();
        let b = BoundingBox::new(bx, by, bw, bh).unwrap();
        let ab = iou(&a, &b);
        let ba = iou(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
    }

    /// More reliable runs never need more repetition time.
    #[test]
    fn time_to_solution_decreases_with_reliability(
        t in 0.1f64..1000.0,
        p_lo in 0.01f64..=0.98,
        bump in 0.001f64..=0.01,
    ) {
        let p_hi = (p_lo + bump).min(0.99);
        let slow = tts(t, p_lo, 0.99).unwrap();
        let fast = tts(t, p_hi, 0.99).unwrap();
        prop_assert!(fast <= slow + 1e-9, "tts({p_hi}) = {fast} > tts({p_lo}) = {slow}");
    }
}
