//! Compiling matching problems into quadratic unconstrained binary
//! optimization (QUBO) form.
//!
//! One binary variable per graph edge: `x[u,v] = 1` selects the edge. The
//! objective rewards selected edges through the linear terms, and a
//! positive penalty `lambda` is added for every pair of selected edges that
//! shares a node, so constraint violations raise the energy by exactly
//! `lambda` per violating pair. Several graphs over the same node sets can
//! be compiled side by side into one block-diagonal problem
//! ([`build_multiplexed_qubo`]); the blocks share no quadratic terms, so a
//! single anneal relaxes all of them at once.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Matching, NodeId, WeightConvention, WeightedBipartiteGraph};

/// Default conflict penalty: large enough that dropping a unit-gain edge
/// beats keeping a violating pair, small enough to leave the landscape
/// crossable at annealing temperatures.
pub const DEFAULT_LAMBDA: f64 = 0.7;

/// The `(block, left, right)` coordinates of one QUBO variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarKey {
    pub block: usize,
    pub left: usize,
    pub right: usize,
}

/// Shape of one block (one source graph) inside a compiled problem.
#[derive(Debug, Clone, Copy)]
pub struct BlockMeta {
    pub n_left: usize,
    pub n_right: usize,
    pub convention: WeightConvention,
    /// Variables `var_start..var_end` belong to this block.
    pub var_start: usize,
    pub var_end: usize,
}

/// An assignment of 0/1 values to every variable of a problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryState {
    bits: Vec<bool>,
}

impl BinaryState {
    pub fn zeros(len: usize) -> Self {
        BinaryState {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinaryState { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of bits that differ from `other`.
    pub fn hamming_distance(&self, other: &BinaryState) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
            + self.bits.len().abs_diff(other.bits.len())
    }
}

impl fmt::Display for BinaryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// States serialize as compact `"0101"` strings in result dumps.
impl serde::Serialize for BinaryState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The edges selected by a state within one block, together with any nodes
/// that ended up covered by more than one selected edge. Violations are
/// reported, never silently repaired; see
/// [`crate::solvers::repair_feasibility`] for the repair pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedMatching {
    pub block: usize,
    /// Selected edges in canonical `(left, right)` order.
    pub edges: Vec<(usize, usize)>,
    /// Nodes covered by two or more selected edges, in sorted order.
    pub violated_nodes: Vec<NodeId>,
}

impl DecodedMatching {
    pub fn is_feasible(&self) -> bool {
        self.violated_nodes.is_empty()
    }

    /// Convert into a validated [`Matching`]; errors if infeasible.
    pub fn into_matching(self) -> Result<Matching> {
        Matching::new(self.edges)
    }
}

/// A compiled QUBO: minimize
/// `E(x) = sum_i linear[i]*x[i] + sum_{i<j} quadratic[(i,j)]*x[i]*x[j]`.
#[derive(Debug, Clone)]
pub struct QuboProblem {
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    var_index: Vec<VarKey>,
    var_lookup: HashMap<(usize, usize, usize), usize>,
    lambda: f64,
    blocks: Vec<BlockMeta>,
    /// Quadratic neighbors of each variable, for O(degree) flip deltas.
    adjacency: Vec<Vec<(usize, f64)>>,
    max_abs_coeff: f64,
    min_abs_nonzero_coeff: f64,
}

impl QuboProblem {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// Linear coefficients indexed by variable.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Quadratic coefficients keyed by `(i, j)` with `i < j`.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    /// The `(block, left, right)` key of each variable, in variable order.
    pub fn var_index(&self) -> &[VarKey] {
        &self.var_index
    }

    /// The variable selecting edge `(left, right)` in `block`, if any.
    pub fn var_of(&self, block: usize, left: usize, right: usize) -> Option<usize> {
        self.var_lookup.get(&(block, left, right)).copied()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn blocks(&self) -> &[BlockMeta] {
        &self.blocks
    }

    /// Largest absolute coefficient; `1.0` for an all-zero problem so the
    /// annealers always get a usable temperature scale.
    pub fn max_abs_coeff(&self) -> f64 {
        self.max_abs_coeff
    }

    /// Smallest nonzero absolute coefficient (same `1.0` fallback).
    pub fn min_abs_nonzero_coeff(&self) -> f64 {
        self.min_abs_nonzero_coeff
    }

    /// The gain (objective improvement) of selecting the edge behind
    /// variable `i`, i.e. the negated linear coefficient.
    pub(crate) fn gain_of_var(&self, i: usize) -> f64 {
        -self.linear[i]
    }

    /// Exact energy of a state: the dot product of the stored coefficients
    /// with the selected bits.
    pub fn energy(&self, state: &BinaryState) -> Result<f64> {
        if state.len() != self.num_vars() {
            return Err(Error::StateLength {
                got: state.len(),
                want: self.num_vars(),
            });
        }
        let mut e = 0.0;
        for (i, &b) in self.linear.iter().enumerate() {
            if state.get(i) {
                e += b;
            }
        }
        for (&(i, j), &a) in &self.quadratic {
            if state.get(i) && state.get(j) {
                e += a;
            }
        }
        Ok(e)
    }

    /// Energy change from flipping variable `i` in `state`, in O(degree).
    pub(crate) fn flip_delta(&self, state: &BinaryState, i: usize) -> f64 {
        let mut field = self.linear[i];
        for &(j, a) in &self.adjacency[i] {
            if state.get(j) {
                field += a;
            }
        }
        if state.get(i) {
            -field
        } else {
            field
        }
    }

    /// Split a state into per-block edge selections, flagging any node that
    /// is covered by more than one selected edge.
    pub fn decode(&self, state: &BinaryState) -> Result<Vec<DecodedMatching>> {
        if state.len() != self.num_vars() {
            return Err(Error::StateLength {
                got: state.len(),
                want: self.num_vars(),
            });
        }
        let mut out = Vec::with_capacity(self.blocks.len());
        for (b, meta) in self.blocks.iter().enumerate() {
            let mut edges = Vec::new();
            let mut left_count: BTreeMap<usize, usize> = BTreeMap::new();
            let mut right_count: BTreeMap<usize, usize> = BTreeMap::new();
            for v in meta.var_start..meta.var_end {
                if state.get(v) {
                    let key = self.var_index[v];
                    edges.push((key.left, key.right));
                    *left_count.entry(key.left).or_insert(0) += 1;
                    *right_count.entry(key.right).or_insert(0) += 1;
                }
            }
            let mut violated: Vec<NodeId> = left_count
                .iter()
                .filter(|(_, &c)| c > 1)
                .map(|(&n, _)| NodeId::left(n))
                .chain(
                    right_count
                        .iter()
                        .filter(|(_, &c)| c > 1)
                        .map(|(&n, _)| NodeId::right(n)),
                )
                .collect();
            violated.sort();
            out.push(DecodedMatching {
                block: b,
                edges,
                violated_nodes: violated,
            });
        }
        Ok(out)
    }

    /// Inverse of [`Self::decode`] for feasible selections: set the bit of
    /// every edge in the per-block matchings, one matching per block.
    pub fn encode(&self, matchings: &[Matching]) -> Result<BinaryState> {
        if matchings.len() != self.blocks.len() {
            return Err(Error::GraphMismatch(format!(
                "{} matchings supplied for {} blocks",
                matchings.len(),
                self.blocks.len()
            )));
        }
        let mut state = BinaryState::zeros(self.num_vars());
        for (b, m) in matchings.iter().enumerate() {
            for (left, right) in m.pairs() {
                let var = self
                    .var_of(b, left, right)
                    .ok_or(Error::UnknownEdge { left, right })?;
                state.set(var, true);
            }
        }
        Ok(state)
    }

    /// Serialize to the plain-text export format: a `vars K` header, then
    /// one `i j coeff` line per nonzero coefficient in sorted order, with
    /// `i == j` marking linear terms.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "vars {}", self.num_vars());
        let mut entries: Vec<(usize, usize, f64)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(i, &b)| (i, i, b))
            .collect();
        entries.extend(self.quadratic.iter().map(|(&(i, j), &a)| (i, j, a)));
        entries.sort_by_key(|a| (a.0, a.1));
        for (i, j, c) in entries {
            let _ = writeln!(out, "{i} {j} {c}");
        }
        out
    }
}

/// Compile one graph into a QUBO whose minimum-energy feasible states are
/// its best maximal matchings.
///
/// Linear terms reward each edge by its gain (similarities enter negated,
/// negative costs enter as-is), and every same-node edge pair contributes a
/// `+lambda` quadratic penalty. `lambda` must be strictly positive and the
/// graph must have at least one edge.
///
/// # Examples
///
/// ```
/// use annealmot::graph::{WeightConvention, WeightedBipartiteGraph};
/// use annealmot::qubo::build_matching_qubo;
///
/// // One node on the left, two alternative partners on the right.
/// let star = WeightedBipartiteGraph::new(
///     1,
///     2,
///     [(0, 0, 0.8), (0, 1, 0.6)],
///     WeightConvention::Similarity,
/// )
/// .unwrap();
/// let q = build_matching_qubo(&star, 0.7).unwrap();
/// assert_eq!(q.linear(), &[-0.8, -0.6]);
/// assert_eq!(q.quadratic().get(&(0, 1)), Some(&0.7));
/// ```
pub fn build_matching_qubo(graph: &WeightedBipartiteGraph, lambda: f64) -> Result<QuboProblem> {
    build_multiplexed_qubo(std::slice::from_ref(graph), lambda)
}

/// Compile several graphs over the same node sets into one block-diagonal
/// QUBO; block `p`'s variables decode to a matching for graph `p`.
///
/// The graphs must agree on the node counts per side (their edge sets and
/// weights may differ). No quadratic term ever couples two blocks.
pub fn build_multiplexed_qubo(
    graphs: &[WeightedBipartiteGraph],
    lambda: f64,
) -> Result<QuboProblem> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::NonPositivePenalty(lambda));
    }
    if graphs.is_empty() {
        return Err(Error::EmptyProblem);
    }
    let (n_left, n_right) = (graphs[0].n_left(), graphs[0].n_right());
    for (p, g) in graphs.iter().enumerate() {
        if g.n_left() != n_left || g.n_right() != n_right {
            return Err(Error::GraphMismatch(format!(
                "block {p} has {}x{} nodes, block 0 has {n_left}x{n_right}",
                g.n_left(),
                g.n_right()
            )));
        }
        if g.edges().is_empty() {
            return Err(Error::EmptyProblem);
        }
    }

    let mut linear = Vec::new();
    let mut quadratic: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut var_index = Vec::new();
    let mut var_lookup = HashMap::new();
    let mut blocks = Vec::with_capacity(graphs.len());

    for (p, g) in graphs.iter().enumerate() {
        let var_start = linear.len();
        for e in g.edges() {
            let var = linear.len();
            var_index.push(VarKey {
                block: p,
                left: e.left,
                right: e.right,
            });
            var_lookup.insert((p, e.left, e.right), var);
            linear.push(-g.convention().gain(e.weight));
        }
        let var_end = linear.len();
        // One +lambda penalty per same-node pair within the block.
        let mut by_left: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut by_right: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (offset, e) in g.edges().iter().enumerate() {
            by_left.entry(e.left).or_default().push(var_start + offset);
            by_right
                .entry(e.right)
                .or_default()
                .push(var_start + offset);
        }
        for vars in by_left.values().chain(by_right.values()) {
            for i in 0..vars.len() {
                for j in (i + 1)..vars.len() {
                    *quadratic.entry((vars[i], vars[j])).or_insert(0.0) += lambda;
                }
            }
        }
        blocks.push(BlockMeta {
            n_left,
            n_right,
            convention: g.convention(),
            var_start,
            var_end,
        });
    }

    let mut adjacency = vec![Vec::new(); linear.len()];
    for (&(i, j), &a) in &quadratic {
        adjacency[i].push((j, a));
        adjacency[j].push((i, a));
    }

    let mut max_abs = 0.0_f64;
    let mut min_abs = f64::INFINITY;
    for c in linear.iter().chain(quadratic.values()) {
        let a = c.abs();
        if a > 0.0 {
            max_abs = max_abs.max(a);
            min_abs = min_abs.min(a);
        }
    }
    if max_abs == 0.0 {
        max_abs = 1.0;
    }
    if !min_abs.is_finite() {
        min_abs = 1.0;
    }

    Ok(QuboProblem {
        linear,
        quadratic,
        var_index,
        var_lookup,
        lambda,
        blocks,
        adjacency,
        max_abs_coeff: max_abs,
        min_abs_nonzero_coeff: min_abs,
    })
}
