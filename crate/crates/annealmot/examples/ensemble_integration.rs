//! Merge several annealed matchings into one better answer.
//!
//! Part 1 runs a deliberately under-budgeted annealer several times on
//! the same instance and integrates 1, 2, or 3 samples per answer with
//! the cyclic integrator: the merged error rate falls as the ensemble
//! grows. Part 2 shows why plain majority voting cannot do the same job:
//! with three or more samples only edges backed by a strict majority
//! survive, so disagreeing-but-valid samples thin the result below
//! maximality instead of improving it.
//!
//! Run with: `cargo run --example ensemble_integration`

use annealmot::bench::gen_benchmark_graph;
use annealmot::ensemble::{error_rate, integrate_cyclic, integrate_majority, SolutionSet};
use annealmot::graph::{is_maximal, oracle_solve_with_cap, Matching, WeightedBipartiteGraph};
use annealmot::qubo::{build_matching_qubo, DEFAULT_LAMBDA};
use annealmot::solvers::{simulated_anneal, AnnealSchedule};

fn main() -> annealmot::Result<()> {
    let graph = gen_benchmark_graph(8, 4, (-1.0, 0.0), 11)?;
    let problem = build_matching_qubo(&graph, DEFAULT_LAMBDA)?;
    let (oracle, _) = oracle_solve_with_cap(&graph, graph.edges().len())?;

    // 12 cheap, error-prone samples: 25 sweeps is far too few for this
    // size, which is exactly when integration earns its keep.
    let schedule = AnnealSchedule::forward(25);
    let mut samples = Vec::new();
    for trial_seed in 0..12 {
        let result = simulated_anneal(&problem, &schedule, 1, 1000 + trial_seed)?;
        samples.push(
            problem
                .decode(&result.best_state)?
                .remove(0)
                .into_matching()?,
        );
    }

    println!("cyclic integration of under-budgeted samples:");
    for multiplicity in [1usize, 2, 3] {
        let mut wrong = 0usize;
        let mut groups = 0usize;
        for chunk in samples.chunks_exact(multiplicity) {
            let set = SolutionSet::new(vec![graph.clone(); multiplicity], chunk.to_vec())?;
            let merged = integrate_cyclic(&set);
            if error_rate(std::slice::from_ref(&merged), &oracle, &graph)? > 0.5 {
                wrong += 1;
            }
            groups += 1;
        }
        println!(
            "  {multiplicity} sample(s) per answer: {wrong}/{groups} merged answers miss the optimum"
        );
    }

    // Majority voting on a graph where each sample is valid but they
    // overlap on only one edge. With 2 samples every voted edge
    // qualifies; with 3, only the unanimous edge reaches the quorum of 2
    // votes, and the merged result is no longer maximal.
    let diag = WeightedBipartiteGraph::from_text("4 4 4\n0 0 0.5\n1 1 0.5\n2 2 0.5\n3 3 0.5\n")?;
    let a = Matching::new([(0, 0), (1, 1)])?;
    let b = Matching::new([(0, 0), (2, 2)])?;
    let c = Matching::new([(0, 0), (3, 3)])?;

    let pair = SolutionSet::new(vec![diag.clone(); 2], vec![a.clone(), b.clone()])?;
    let triple = SolutionSet::new(vec![diag.clone(); 3], vec![a, b, c])?;
    let merged2 = integrate_majority(&pair);
    let merged3 = integrate_majority(&triple);

    println!("\nmajority voting on three disagreeing-but-valid samples:");
    println!(
        "  2 samples -> {:?} (maximal: {})",
        merged2.pairs().collect::<Vec<_>>(),
        is_maximal(&diag, &merged2)?
    );
    println!(
        "  3 samples -> {:?} (maximal: {})",
        merged3.pairs().collect::<Vec<_>>(),
        is_maximal(&diag, &merged3)?
    );
    println!(
        "\nthe cyclic integrator walks the union graph instead, keeps the\n\
         better side of every overlap component, and tops the result up to\n\
         maximality, so it never returns less than its best input"
    );
    Ok(())
}
