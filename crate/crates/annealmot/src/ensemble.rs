//! Integrating several matchings of the same node sets into one.
//!
//! Multiplexed solving produces one matching per tracker, all over the same
//! edge set but scored by different weight functions. Two integrators are
//! provided: [`integrate_majority`], a vote-then-greedy scheme that is
//! simple but can return a non-maximal matching, and [`integrate_cyclic`],
//! which walks the solutions pairwise, resolves each alternating component
//! (path or cycle) of the pairwise union toward lower average cost, and
//! finishes with a maximality repair. Average cost here means the edge's
//! cost averaged across all weight functions, with cost = negated gain, so
//! both weight conventions integrate identically.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{matching_weight, Matching, NodeId, WeightedBipartiteGraph};

/// `P` matchings over `P` graphs that share node sets and edge sets
/// (weights may differ per graph). Construction validates the sharing and
/// that every solution only uses shared edges.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    graphs: Vec<WeightedBipartiteGraph>,
    solutions: Vec<Matching>,
}

impl SolutionSet {
    pub fn new(graphs: Vec<WeightedBipartiteGraph>, solutions: Vec<Matching>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::InvalidParameter(
                "a solution set needs at least one graph".into(),
            ));
        }
        if graphs.len() != solutions.len() {
            return Err(Error::GraphMismatch(format!(
                "{} graphs but {} solutions",
                graphs.len(),
                solutions.len()
            )));
        }
        let first = &graphs[0];
        for (p, g) in graphs.iter().enumerate().skip(1) {
            if g.n_left() != first.n_left() || g.n_right() != first.n_right() {
                return Err(Error::GraphMismatch(format!(
                    "graph {p} has {}x{} nodes, graph 0 has {}x{}",
                    g.n_left(),
                    g.n_right(),
                    first.n_left(),
                    first.n_right()
                )));
            }
            if g.edges().len() != first.edges().len()
                || g.edges()
                    .iter()
                    .zip(first.edges())
                    .any(|(a, b)| (a.left, a.right) != (b.left, b.right))
            {
                return Err(Error::GraphMismatch(format!(
                    "graph {p} does not share graph 0's edge set"
                )));
            }
        }
        for m in &solutions {
            for (left, right) in m.pairs() {
                if !first.has_edge(left, right) {
                    return Err(Error::UnknownEdge { left, right });
                }
            }
        }
        Ok(SolutionSet { graphs, solutions })
    }

    pub fn graphs(&self) -> &[WeightedBipartiteGraph] {
        &self.graphs
    }

    pub fn solutions(&self) -> &[Matching] {
        &self.solutions
    }

    /// Number of multiplexed solutions.
    pub fn multiplicity(&self) -> usize {
        self.solutions.len()
    }

    /// Gain of an edge averaged across all weight functions.
    fn avg_gain(&self, left: usize, right: usize) -> f64 {
        let total: f64 = self
            .graphs
            .iter()
            .map(|g| {
                g.convention()
                    .gain(g.weight(left, right).expect("shared edge"))
            })
            .sum();
        total / self.graphs.len() as f64
    }
}

/// Majority-vote integration: an edge qualifies when at least half of the
/// solutions contain it (⌈P/2⌉ votes); qualifying edges are ranked by vote
/// count (then combined gain, then position) and added greedily while they
/// stay disjoint.
///
/// At P = 2 every voted edge qualifies and the ranking does the work; from
/// P = 3 on, edges the solutions disagree about fall below the bar and the
/// result thins out — often to a non-maximal matching. That failure mode
/// is inherent to vote thresholding and is the reason [`integrate_cyclic`]
/// exists.
pub fn integrate_majority(set: &SolutionSet) -> Matching {
    let mut votes: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for m in set.solutions() {
        for pair in m.pairs() {
            *votes.entry(pair).or_insert(0) += 1;
        }
    }
    let quorum = set.multiplicity().div_ceil(2);
    let mut candidates: Vec<((usize, usize), usize)> =
        votes.into_iter().filter(|&(_, v)| v >= quorum).collect();
    candidates.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| {
                let (ga, gb) = (set.avg_gain(a.0 .0, a.0 .1), set.avg_gain(b.0 .0, b.0 .1));
                gb.partial_cmp(&ga).expect("gains are finite")
            })
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for ((left, right), _) in candidates {
        if chosen.iter().all(|&(l, r)| l != left && r != right) {
            chosen.push((left, right));
        }
    }
    Matching::new(chosen).expect("greedy selection keeps edges disjoint")
}

/// Cyclic pairwise integration.
///
/// Starting from the first solution `K`, integrate `K` with each next
/// solution in turn (wrapping around to the first again at the end). Each
/// pairwise union decomposes into shared edges, single stray edges, and
/// alternating paths/cycles; in every component that contains a node of
/// degree two, the cheaper of the component's two alternating sides (by
/// average cost across all weight functions) replaces `K`'s share. A cycle
/// is resolved the same way, by comparing its two full alternating sides.
/// The final `K` is topped up to maximality against the shared edge set.
///
/// A single-solution set is a fixed point: the result is that solution
/// (repaired to maximal if it was not already).
pub fn integrate_cyclic(set: &SolutionSet) -> Matching {
    let p = set.multiplicity();
    let mut k: BTreeSet<(usize, usize)> = set.solutions()[0].pairs().collect();

    for i in 0..p {
        let partner = &set.solutions()[(i + 1) % p];
        integrate_pair(set, &mut k, partner);
    }

    // Maximality repair against the shared edge set, best edges first.
    let shared = set.graphs()[0].edges();
    let mut order: Vec<(usize, usize)> = shared.iter().map(|e| (e.left, e.right)).collect();
    order.sort_by(|&a, &b| {
        let (ga, gb) = (set.avg_gain(a.0, a.1), set.avg_gain(b.0, b.1));
        gb.partial_cmp(&ga)
            .expect("gains are finite")
            .then_with(|| a.cmp(&b))
    });
    let mut used_left: BTreeSet<usize> = k.iter().map(|&(l, _)| l).collect();
    let mut used_right: BTreeSet<usize> = k.iter().map(|&(_, r)| r).collect();
    for (left, right) in order {
        if !used_left.contains(&left) && !used_right.contains(&right) {
            used_left.insert(left);
            used_right.insert(right);
            k.insert((left, right));
        }
    }
    Matching::new(k).expect("component replacement keeps edges disjoint")
}

/// One pairwise integration step: resolve every alternating component of
/// `K ∪ M` that contains a degree-2 node toward the side with the lower
/// average cost (higher average gain).
fn integrate_pair(set: &SolutionSet, k: &mut BTreeSet<(usize, usize)>, m: &Matching) {
    #[derive(Clone, Copy)]
    struct Membership {
        in_k: bool,
        in_m: bool,
    }
    let mut union: BTreeMap<(usize, usize), Membership> = BTreeMap::new();
    for &pair in k.iter() {
        union.insert(
            pair,
            Membership {
                in_k: true,
                in_m: false,
            },
        );
    }
    for pair in m.pairs() {
        union
            .entry(pair)
            .and_modify(|mem| mem.in_m = true)
            .or_insert(Membership {
                in_k: false,
                in_m: true,
            });
    }

    let mut adjacency: HashMap<NodeId, Vec<(usize, usize)>> = HashMap::new();
    for &(left, right) in union.keys() {
        adjacency
            .entry(NodeId::left(left))
            .or_default()
            .push((left, right));
        adjacency
            .entry(NodeId::right(right))
            .or_default()
            .push((left, right));
    }

    let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
    let component_roots: Vec<(usize, usize)> = union.keys().copied().collect();
    for root in component_roots {
        if visited.contains(&root) {
            continue;
        }
        // Breadth-first walk of the component through shared nodes.
        let mut component = Vec::new();
        let mut queue = vec![root];
        visited.insert(root);
        while let Some(edge) = queue.pop() {
            component.push(edge);
            for node in [NodeId::left(edge.0), NodeId::right(edge.1)] {
                for &next in &adjacency[&node] {
                    if visited.insert(next) {
                        queue.push(next);
                    }
                }
            }
        }
        let has_degree_two = component.iter().any(|&(l, r)| {
            adjacency[&NodeId::left(l)].len() == 2 || adjacency[&NodeId::right(r)].len() == 2
        });
        if !has_degree_two {
            // Shared edges and single stray edges stay as they are; in
            // particular an M-only stray is not adopted.
            continue;
        }
        // A degree-2 component of a matching union is an alternating path
        // or cycle, so no edge of it belongs to both sides.
        let k_side: Vec<(usize, usize)> = component
            .iter()
            .copied()
            .filter(|e| union[e].in_k)
            .collect();
        let m_side: Vec<(usize, usize)> = component
            .iter()
            .copied()
            .filter(|e| union[e].in_m)
            .collect();
        let gain_of = |side: &[(usize, usize)]| -> f64 {
            side.iter().map(|&(l, r)| set.avg_gain(l, r)).sum()
        };
        let (kg, mg) = (gain_of(&k_side), gain_of(&m_side));
        let take_m = if mg > kg {
            true
        } else if mg < kg {
            false
        } else {
            // Tie: keep the side holding the lexicographically smallest edge.
            m_side.iter().min() < k_side.iter().min()
        };
        if take_m {
            for e in &k_side {
                k.remove(e);
            }
            for &e in &m_side {
                k.insert(e);
            }
        }
    }
}

/// Tolerance under which two matching weights count as equal.
pub const WEIGHT_MATCH_TOL: f64 = 1e-9;

/// Fraction of `results` whose total weight differs from the oracle
/// matching's weight by more than [`WEIGHT_MATCH_TOL`].
///
/// Weight equality, not edge-set equality, is the success test: degenerate
/// optima with different edges but the same weight count as solved.
pub fn error_rate(
    results: &[Matching],
    oracle: &Matching,
    graph: &WeightedBipartiteGraph,
) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::InvalidParameter(
            "error rate over zero results is undefined".into(),
        ));
    }
    let target = matching_weight(graph, oracle)?;
    let mut errors = 0usize;
    for m in results {
        let w = matching_weight(graph, m)?;
        if (w - target).abs() > WEIGHT_MATCH_TOL {
            errors += 1;
        }
    }
    Ok(errors as f64 / results.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_maximal, oracle_solve, WeightConvention, WeightedBipartiteGraph};
    use crate::qubo::{build_matching_qubo, BinaryState};
    use crate::solvers::repair_feasibility;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, m: usize, edges: &[(usize, usize, f64)]) -> WeightedBipartiteGraph {
        WeightedBipartiteGraph::new(n, m, edges.iter().copied(), WeightConvention::Similarity)
            .unwrap()
    }

    fn replicate(g: &WeightedBipartiteGraph, p: usize) -> Vec<WeightedBipartiteGraph> {
        std::iter::repeat_with(|| g.clone()).take(p).collect()
    }

    fn m(pairs: &[(usize, usize)]) -> Matching {
        Matching::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn identical_solutions_pass_through_both_integrators() {
        let g = graph(2, 2, &[(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)]);
        let sol = m(&[(0, 1), (1, 0)]);
        let set = SolutionSet::new(replicate(&g, 3), vec![sol.clone(); 3]).unwrap();
        assert_eq!(integrate_majority(&set), sol);
        assert_eq!(integrate_cyclic(&set), sol);
    }

    #[test]
    fn single_solution_is_a_fixed_point_of_cyclic_integration() {
        let g = graph(2, 2, &[(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)]);
        let sol = m(&[(0, 0), (1, 1)]);
        let set = SolutionSet::new(vec![g], vec![sol.clone()]).unwrap();
        assert_eq!(integrate_cyclic(&set), sol);
    }

    #[test]
    fn majority_follows_the_vote_count() {
        let g = graph(2, 2, &[(0, 0, 0.5), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.5)]);
        let a = m(&[(0, 0), (1, 1)]);
        let b = m(&[(0, 1), (1, 0)]);
        let set = SolutionSet::new(replicate(&g, 3), vec![a.clone(), a.clone(), b]).unwrap();
        assert_eq!(integrate_majority(&set), a);
    }

    /// Two maximal inputs whose strongest edges interlock: vote-greedy
    /// takes the two heavy edges and every remaining voted edge conflicts,
    /// leaving the (unvoted) edge between the two free nodes unreachable.
    fn interlocking_case() -> (WeightedBipartiteGraph, Matching, Matching) {
        let g = graph(
            3,
            3,
            &[
                (0, 0, 0.1),
                (0, 1, 0.2),
                (1, 0, 0.2),
                (1, 2, 0.9),
                (2, 1, 0.9),
            ],
        );
        let m1 = m(&[(1, 0), (2, 1)]);
        let m2 = m(&[(0, 1), (1, 2)]);
        assert!(is_maximal(&g, &m1).unwrap());
        assert!(is_maximal(&g, &m2).unwrap());
        (g, m1, m2)
    }

    #[test]
    fn majority_quorum_thins_out_at_triple_multiplicity() {
        let g = graph(4, 4, &[(0, 0, 0.5), (1, 1, 0.5), (2, 2, 0.5), (3, 3, 0.5)]);
        let a = m(&[(0, 0), (1, 1)]);
        let b = m(&[(0, 0), (2, 2)]);
        let c = m(&[(0, 0), (3, 3)]);

        // Two solutions: every voted edge qualifies, disagreements and all.
        let pair = SolutionSet::new(replicate(&g, 2), vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(integrate_majority(&pair), m(&[(0, 0), (1, 1), (2, 2)]));

        // Three solutions: the strays each hold one vote of three and
        // fall below the quorum, although they would not even conflict.
        let triple = SolutionSet::new(replicate(&g, 3), vec![a, b, c]).unwrap();
        let result = integrate_majority(&triple);
        assert_eq!(result, m(&[(0, 0)]));
        assert!(!is_maximal(&g, &result).unwrap());
    }

    #[test]
    fn majority_can_return_a_non_maximal_matching() {
        let (g, m1, m2) = interlocking_case();
        let set = SolutionSet::new(replicate(&g, 2), vec![m1, m2]).unwrap();
        let result = integrate_majority(&set);
        assert_eq!(result, m(&[(1, 2), (2, 1)]));
        assert!(
            !is_maximal(&g, &result).unwrap(),
            "the failure mode disappeared"
        );
    }

    #[test]
    fn cyclic_integration_repairs_the_interlocking_case_to_maximal() {
        let (g, m1, m2) = interlocking_case();
        let set = SolutionSet::new(replicate(&g, 2), vec![m1.clone(), m2.clone()]).unwrap();
        let result = integrate_cyclic(&set);
        assert_eq!(result, m(&[(0, 0), (1, 2), (2, 1)]));
        assert!(is_maximal(&g, &result).unwrap());
        let best_input = matching_weight(&g, &m1)
            .unwrap()
            .max(matching_weight(&g, &m2).unwrap());
        assert!(matching_weight(&g, &result).unwrap() >= best_input - 1e-9);
    }

    #[test]
    fn cyclic_integration_keeps_the_heavier_side_of_a_cycle() {
        // The union of the two perfect matchings is one 4-cycle; the first
        // pair is heavier in total and must survive.
        let g = graph(2, 2, &[(0, 0, 0.9), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.2)]);
        let heavy = m(&[(0, 0), (1, 1)]);
        let light = m(&[(0, 1), (1, 0)]);
        let set = SolutionSet::new(replicate(&g, 2), vec![heavy.clone(), light]).unwrap();
        assert_eq!(integrate_cyclic(&set), heavy);
    }

    #[test]
    fn cyclic_integration_mixes_components_from_different_solutions() {
        // Two disjoint 2x2 blocks. Each input is right in one block and
        // wrong in the other; the integration should combine the two right
        // halves, which neither input holds on its own.
        let g = graph(
            4,
            4,
            &[
                (0, 0, 0.9),
                (0, 1, 0.5),
                (1, 0, 0.5),
                (1, 1, 0.2),
                (2, 2, 0.2),
                (2, 3, 0.5),
                (3, 2, 0.5),
                (3, 3, 0.9),
            ],
        );
        let m1 = m(&[(0, 0), (1, 1), (2, 3), (3, 2)]); // right in block A only
        let m2 = m(&[(0, 1), (1, 0), (2, 2), (3, 3)]); // right in block B only
        let expected = m(&[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let set = SolutionSet::new(replicate(&g, 2), vec![m1.clone(), m2.clone()]).unwrap();
        let result = integrate_cyclic(&set);
        assert_eq!(result, expected);
        let best_input = matching_weight(&g, &m1)
            .unwrap()
            .max(matching_weight(&g, &m2).unwrap());
        assert!(matching_weight(&g, &result).unwrap() > best_input);
    }

    #[test]
    fn integrated_weight_dominates_the_best_input_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for p in [2usize, 3, 5] {
            let mut integrated_sum = 0.0;
            let mut best_input_sum = 0.0;
            for _ in 0..60 {
                let n = rng.gen_range(2..=5);
                let mut triples = Vec::new();
                for l in 0..n {
                    for r in 0..n {
                        if rng.gen_bool(0.5) {
                            triples.push((l, r, rng.gen_range(0.0..=1.0)));
                        }
                    }
                }
                if triples.is_empty() {
                    triples.push((0, 0, 0.5));
                }
                let g = graph(n, n, &triples);
                let q = build_matching_qubo(&g, 0.7).unwrap();
                // Random maximal matchings via the repair pass.
                let solutions: Vec<Matching> = (0..p)
                    .map(|_| {
                        let bits: Vec<bool> =
                            (0..q.num_vars()).map(|_| rng.gen_bool(0.3)).collect();
                        let state = repair_feasibility(&q, &BinaryState::from_bits(bits)).unwrap();
                        q.decode(&state).unwrap().remove(0).into_matching().unwrap()
                    })
                    .collect();
                let best_input = solutions
                    .iter()
                    .map(|s| matching_weight(&g, s).unwrap())
                    .fold(f64::NEG_INFINITY, f64::max);
                let set = SolutionSet::new(replicate(&g, p), solutions).unwrap();
                let result = integrate_cyclic(&set);
                assert!(is_maximal(&g, &result).unwrap());
                integrated_sum += matching_weight(&g, &result).unwrap();
                best_input_sum += best_input;
            }
            assert!(
                integrated_sum >= best_input_sum - 1e-9,
                "P={p}: mean integrated weight {integrated_sum} fell below {best_input_sum}"
            );
        }
    }

    #[test]
    fn error_rate_counts_weight_mismatches_only() {
        let g = graph(2, 2, &[(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)]);
        let (oracle, _) = oracle_solve(&g).unwrap();
        let optimal = m(&[(0, 1), (1, 0)]);
        let suboptimal = m(&[(0, 0), (1, 1)]);
        let rate = error_rate(&[optimal.clone(), suboptimal, optimal], &oracle, &g).unwrap();
        assert!((rate - 1.0 / 3.0).abs() < 1e-12);

        // Degenerate optimum: different edges, identical weight, no error.
        let tie = graph(2, 2, &[(0, 0, 0.5), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.5)]);
        let (tie_oracle, _) = oracle_solve(&tie).unwrap();
        let other = m(&[(0, 1), (1, 0)]);
        assert_ne!(tie_oracle, other);
        assert_eq!(error_rate(&[other], &tie_oracle, &tie).unwrap(), 0.0);
    }

    #[test]
    fn error_rate_requires_at_least_one_result() {
        let g = graph(1, 1, &[(0, 0, 0.5)]);
        let (oracle, _) = oracle_solve(&g).unwrap();
        assert!(matches!(
            error_rate(&[], &oracle, &g),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn solution_sets_validate_their_inputs() {
        let g = graph(2, 2, &[(0, 0, 0.5), (1, 1, 0.5)]);
        let other_edges = graph(2, 2, &[(0, 0, 0.5), (1, 0, 0.5)]);
        let sol = m(&[(0, 0)]);
        assert!(matches!(
            SolutionSet::new(vec![], vec![]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            SolutionSet::new(vec![g.clone()], vec![sol.clone(), sol.clone()]),
            Err(Error::GraphMismatch(_))
        ));
        assert!(matches!(
            SolutionSet::new(vec![g.clone(), other_edges], vec![sol.clone(), sol.clone()]),
            Err(Error::GraphMismatch(_))
        ));
        assert!(matches!(
            SolutionSet::new(vec![g.clone()], vec![m(&[(0, 1)])]),
            Err(Error::UnknownEdge { .. })
        ));
        let weights_differ = graph(2, 2, &[(0, 0, 0.1), (1, 1, 0.9)]);
        assert!(SolutionSet::new(vec![g, weights_differ], vec![sol.clone(), sol]).is_ok());
    }
}
