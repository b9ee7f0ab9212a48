//! Solve one assignment problem end to end.
//!
//! Builds a small weighted bipartite graph from its text form, finds the
//! max-weight maximal matching exactly, then solves the same instance
//! through the QUBO route with simulated annealing and checks that the
//! two answers agree.
//!
//! Run with: `cargo run --example solve_graph`

use annealmot::graph::{matching_weight, oracle_solve, WeightedBipartiteGraph};
use annealmot::qubo::{build_matching_qubo, DEFAULT_LAMBDA};
use annealmot::solvers::{simulated_anneal, AnnealSchedule};

fn main() -> annealmot::Result<()> {
    // `left right weight` per line after an `n_left n_right n_edges`
    // header. Weights in [0, 1] are similarities (higher is better);
    // weights in [-1, 0] would be negated costs.
    let text = "\
# three trackers, three detections
3 3 5
0 0 0.9
0 1 0.4
1 0 0.3
1 2 0.8
2 1 0.7
";
    let graph = WeightedBipartiteGraph::from_text(text)?;
    println!(
        "graph: {} left nodes, {} right nodes, {} edges ({:?} weights)",
        graph.n_left(),
        graph.n_right(),
        graph.edges().len(),
        graph.convention(),
    );

    // Exact answer by enumerating maximal matchings.
    let (exact, exact_weight) = oracle_solve(&graph)?;
    println!("\nexact matcher:");
    for (l, r) in exact.pairs() {
        println!("  {l} -> {r}  (weight {})", graph.weight(l, r)?);
    }
    println!("  total weight {exact_weight:.4}");

    // Same instance as a QUBO: one bit per edge, a gain term that rewards
    // picking heavy edges, and a penalty that punishes two chosen edges
    // sharing a node.
    let problem = build_matching_qubo(&graph, DEFAULT_LAMBDA)?;
    println!(
        "\nQUBO: {} binary variables, penalty strength {}",
        problem.num_vars(),
        problem.lambda()
    );

    let schedule = AnnealSchedule::forward(200);
    let result = simulated_anneal(&problem, &schedule, 50, 7)?;
    let decoded = problem.decode(&result.best_state)?.remove(0);
    let annealed = decoded.into_matching()?;
    let annealed_weight = matching_weight(&graph, &annealed)?;

    println!("simulated annealing ({} trials):", result.trial_count());
    for (l, r) in annealed.pairs() {
        println!("  {l} -> {r}");
    }
    println!(
        "  best energy {:.4}, total weight {annealed_weight:.4}",
        result.best_energy
    );

    assert!(
        (annealed_weight - exact_weight).abs() < 1e-9,
        "annealer should reach the exact optimum on a toy instance"
    );
    println!("\nannealed matching weight equals the exact optimum");
    Ok(())
}
