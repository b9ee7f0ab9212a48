//! Look inside a matching QUBO.
//!
//! Shows how an assignment instance compiles to binary variables: the
//! linear gain per edge bit, the pairwise penalties between conflicting
//! bits, the energy split `E = -gain + lambda * violations`, and how
//! several weight models multiplex into one block-diagonal problem that
//! one annealer pass can solve for all models at once.
//!
//! Run with: `cargo run --example qubo_anatomy`

use annealmot::graph::WeightedBipartiteGraph;
use annealmot::qubo::{build_matching_qubo, build_multiplexed_qubo, BinaryState, DEFAULT_LAMBDA};

fn main() -> annealmot::Result<()> {
    let graph = WeightedBipartiteGraph::from_text(
        "2 2 3\n\
         0 0 0.9\n\
         0 1 0.5\n\
         1 1 0.8\n",
    )?;
    let problem = build_matching_qubo(&graph, DEFAULT_LAMBDA)?;

    println!("variables (one bit per edge):");
    for (i, key) in problem.var_index().iter().enumerate() {
        println!(
            "  x{} = edge {} -> {}   linear coefficient {:+.2}",
            i,
            key.left,
            key.right,
            problem.linear()[i]
        );
    }

    println!("\nquadratic couplings (same-node conflicts):");
    for (&(i, j), &coeff) in problem.quadratic() {
        let (a, b) = (&problem.var_index()[i], &problem.var_index()[j]);
        println!(
            "  x{i} * x{j}  ({}-{} vs {}-{})  {:+.2}",
            a.left, a.right, b.left, b.right, coeff
        );
    }

    // Energy of an infeasible state decomposes into gain and penalty:
    // picking both edges of left node 0 pays lambda once.
    let mut state = BinaryState::zeros(problem.num_vars());
    state.set(problem.var_of(0, 0, 0).unwrap(), true);
    state.set(problem.var_of(0, 0, 1).unwrap(), true); // conflicts on left node 0
    let energy = problem.energy(&state)?;
    println!(
        "\nstate {{0->0, 0->1}}: energy {energy:.2} = -(0.9 + 0.5) + {} * 1 violation",
        problem.lambda()
    );

    // The standalone text form round-trips through external tooling.
    println!("\nportable text form:\n{}", problem.to_text());

    // Two weight models over the same node sets share one block-diagonal
    // problem: each model gets its own block of bits and its own
    // penalties, no term couples two blocks, and one annealer pass yields
    // one matching per model, ready for ensemble integration.
    let appearance = WeightedBipartiteGraph::from_text(
        "2 2 3\n\
         0 0 0.7\n\
         0 1 0.2\n\
         1 1 0.9\n",
    )?;
    let multi = build_multiplexed_qubo(&[graph, appearance], DEFAULT_LAMBDA)?;
    println!(
        "multiplexed over 2 models: {} variables in {} blocks, {} couplings",
        multi.num_vars(),
        multi.blocks().len(),
        multi.quadratic().len()
    );
    Ok(())
}
