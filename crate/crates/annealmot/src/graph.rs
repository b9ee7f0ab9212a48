//! Weighted bipartite graphs, matchings, and an exact reference solver.
//!
//! Frame association in multi-object tracking is a max-weight maximal
//! matching problem on a bipartite graph of tracks versus detections. This
//! module owns that vocabulary: [`WeightedBipartiteGraph`] with a declared
//! [`WeightConvention`], [`Matching`] as a validated set of node-disjoint
//! edges, and [`oracle_solve`] as the exact (exponential, capped) solver
//! that the rest of the crate treats as ground truth.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// The two shores of a bipartite graph.
///
/// In the tracking pipeline left nodes are existing tracks and right nodes
/// are fresh detections; the solver stack never assumes more than "two
/// disjoint sides".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A node reference that carries its side, so track indices and detection
/// indices cannot be confused for one another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub side: Side,
    pub index: usize,
}

impl NodeId {
    pub fn left(index: usize) -> Self {
        NodeId {
            side: Side::Left,
            index,
        }
    }

    pub fn right(index: usize) -> Self {
        NodeId {
            side: Side::Right,
            index,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Left => write!(f, "L{}", self.index),
            Side::Right => write!(f, "R{}", self.index),
        }
    }
}

/// How edge weights are read by solvers and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightConvention {
    /// Weights are similarities in `[0, 1]`; a better matching has a
    /// *larger* weight sum. Used by the tracking pipeline.
    Similarity,
    /// Weights are costs in `[-1, 0]`; a better matching has a *smaller*
    /// (more negative) weight sum. Used by the synthetic benchmark graphs.
    NegativeCost,
}

impl WeightConvention {
    /// Inclusive bounds of the weight band this convention admits.
    pub fn band(self) -> (f64, f64) {
        match self {
            WeightConvention::Similarity => (0.0, 1.0),
            WeightConvention::NegativeCost => (-1.0, 0.0),
        }
    }

    /// The non-negative gain of selecting an edge of weight `w`: how much
    /// the edge improves the objective. Similarities are gains as-is;
    /// negative costs are negated.
    pub fn gain(self, weight: f64) -> f64 {
        match self {
            WeightConvention::Similarity => weight,
            WeightConvention::NegativeCost => -weight,
        }
    }
}

/// One weighted edge between left node `left` and right node `right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// An edge-weighted bipartite graph with a fixed weight convention.
///
/// Edges are stored sorted by `(left, right)`. That order is canonical: it
/// is the variable order used when the graph is compiled to a QUBO and the
/// tie-break order used by the exact solver.
#[derive(Debug, Clone)]
pub struct WeightedBipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<Edge>,
    convention: WeightConvention,
}

impl WeightedBipartiteGraph {
    /// Build a graph from `(left, right, weight)` triples.
    ///
    /// Node indices must lie below the side sizes, every weight must lie in
    /// the convention's band, and duplicate pairs are rejected.
    ///
    /// # Examples
    ///
    /// ```
    /// use annealmot::graph::{WeightConvention, WeightedBipartiteGraph};
    ///
    /// let g = WeightedBipartiteGraph::new(
    ///     2,
    ///     2,
    ///     [(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)],
    ///     WeightConvention::Similarity,
    /// )
    /// .unwrap();
    /// assert_eq!(g.edges().len(), 4);
    /// ```
    pub fn new(
        n_left: usize,
        n_right: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        convention: WeightConvention,
    ) -> Result<Self> {
        let (lo, hi) = convention.band();
        let mut list: Vec<Edge> = Vec::new();
        for (left, right, weight) in edges {
            if left >= n_left {
                return Err(Error::NodeOutOfRange {
                    index: left,
                    len: n_left,
                });
            }
            if right >= n_right {
                return Err(Error::NodeOutOfRange {
                    index: right,
                    len: n_right,
                });
            }
            if !weight.is_finite() || weight < lo || weight > hi {
                return Err(Error::WeightOutOfBand { weight, lo, hi });
            }
            list.push(Edge {
                left,
                right,
                weight,
            });
        }
        list.sort_by_key(|a| (a.left, a.right));
        for pair in list.windows(2) {
            if pair[0].left == pair[1].left && pair[0].right == pair[1].right {
                return Err(Error::DuplicateEdge {
                    left: pair[0].left,
                    right: pair[0].right,
                });
            }
        }
        Ok(WeightedBipartiteGraph {
            n_left,
            n_right,
            edges: list,
            convention,
        })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn convention(&self) -> WeightConvention {
        self.convention
    }

    /// Edges in canonical `(left, right)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of `(left, right)` in canonical edge order, if present.
    pub fn edge_index(&self, left: usize, right: usize) -> Option<usize> {
        self.edges
            .binary_search_by(|e| (e.left, e.right).cmp(&(left, right)))
            .ok()
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.edge_index(left, right).is_some()
    }

    /// Weight of `(left, right)` or an `UnknownEdge` error.
    pub fn weight(&self, left: usize, right: usize) -> Result<f64> {
        self.edge_index(left, right)
            .map(|i| self.edges[i].weight)
            .ok_or(Error::UnknownEdge { left, right })
    }

    /// The gain (objective improvement) of the edge at canonical index `i`.
    pub(crate) fn gain_at(&self, i: usize) -> f64 {
        self.convention.gain(self.edges[i].weight)
    }

    /// Serialize to the plain-text exchange format: a `N M |E|` header line
    /// followed by one `left right weight` triple per line.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n_left, self.n_right, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.left, e.right, e.weight);
        }
        out
    }

    /// Parse the plain-text exchange format produced by [`Self::to_text`].
    ///
    /// The weight convention is inferred: any negative weight marks the
    /// whole graph as [`WeightConvention::NegativeCost`], otherwise it is
    /// read as [`WeightConvention::Similarity`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `N M |E|` header".into(),
        })?;
        let parse_usize = |tok: &str, line: usize| -> Result<usize> {
            tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("expected an integer, found `{tok}`"),
            })
        };
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("header must be `N M |E|`, found `{header}`"),
            });
        }
        let n_left = parse_usize(head[0], line_no)?;
        let n_right = parse_usize(head[1], line_no)?;
        let n_edges = parse_usize(head[2], line_no)?;
        let mut triples = Vec::with_capacity(n_edges);
        for _ in 0..n_edges {
            let (line_no, line) = lines.next().ok_or(Error::Parse {
                line: line_no,
                msg: format!("expected {n_edges} edge lines after the header"),
            })?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("edge line must be `left right weight`, found `{line}`"),
                });
            }
            let left = parse_usize(toks[0], line_no)?;
            let right = parse_usize(toks[1], line_no)?;
            let weight: f64 = toks[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected a number, found `{}`", toks[2]),
            })?;
            triples.push((left, right, weight));
        }
        if let Some((line_no, line)) = lines.next() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unexpected trailing line `{line}`"),
            });
        }
        let convention = if triples.iter().any(|t| t.2 < 0.0) {
            WeightConvention::NegativeCost
        } else {
            WeightConvention::Similarity
        };
        Self::new(n_left, n_right, triples, convention)
    }
}

/// A set of pairwise node-disjoint edges, stored as sorted `(left, right)`
/// pairs. Construction validates disjointness; weights stay in the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Matching {
    edges: BTreeSet<(usize, usize)>,
}

impl Matching {
    /// An empty matching.
    pub fn empty() -> Self {
        Matching::default()
    }

    /// Build a matching from `(left, right)` pairs, rejecting any pair of
    /// edges that shares a node.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges = BTreeSet::new();
        let mut left_used: BTreeSet<usize> = BTreeSet::new();
        let mut right_used: BTreeSet<usize> = BTreeSet::new();
        for (left, right) in pairs {
            if edges.contains(&(left, right)) {
                return Err(Error::DuplicateEdge { left, right });
            }
            if left_used.contains(&left) || right_used.contains(&right) {
                let other = *edges
                    .iter()
                    .find(|(l, r)| *l == left || *r == right)
                    .expect("conflicting edge present");
                return Err(Error::ConflictingEdges {
                    a: other,
                    b: (left, right),
                });
            }
            left_used.insert(left);
            right_used.insert(right);
            edges.insert((left, right));
        }
        Ok(Matching { edges })
    }

    /// Pairs in sorted order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, left: usize, right: usize) -> bool {
        self.edges.contains(&(left, right))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The right node matched to `left`, if any.
    pub fn right_of(&self, left: usize) -> Option<usize> {
        self.edges
            .range((left, 0)..=(left, usize::MAX))
            .next()
            .map(|&(_, r)| r)
    }

    /// True if some edge uses the given left node.
    pub fn covers_left(&self, left: usize) -> bool {
        self.right_of(left).is_some()
    }

    /// True if some edge uses the given right node.
    pub fn covers_right(&self, right: usize) -> bool {
        self.edges.iter().any(|&(_, r)| r == right)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, r)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({l}, {r})")?;
        }
        write!(f, "}}")
    }
}

/// Sum of the graph weights of the matching's edges (`0.0` when empty).
///
/// Errors if the matching uses an edge the graph does not contain.
pub fn matching_weight(graph: &WeightedBipartiteGraph, m: &Matching) -> Result<f64> {
    let mut total = 0.0;
    for (left, right) in m.pairs() {
        total += graph.weight(left, right)?;
    }
    Ok(total)
}

/// True when no graph edge can be added to `m` without sharing a node.
///
/// Errors if the matching uses an edge the graph does not contain.
pub fn is_maximal(graph: &WeightedBipartiteGraph, m: &Matching) -> Result<bool> {
    for (left, right) in m.pairs() {
        if !graph.has_edge(left, right) {
            return Err(Error::UnknownEdge { left, right });
        }
    }
    for e in graph.edges() {
        if !m.covers_left(e.left) && !m.covers_right(e.right) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Default edge cap for [`oracle_solve`]; beyond it the exact solver
/// refuses rather than silently running for a very long time.
pub const DEFAULT_ORACLE_EDGE_CAP: usize = 24;

/// Exact best maximal matching under the graph's convention, with its raw
/// weight sum: maximum total similarity for [`WeightConvention::Similarity`]
/// graphs, minimum total cost for [`WeightConvention::NegativeCost`] graphs.
///
/// Equal-weight ties resolve to the lexicographically smallest edge set, so
/// the result is deterministic. Refuses graphs with more than
/// [`DEFAULT_ORACLE_EDGE_CAP`] edges; use [`oracle_solve_with_cap`] to raise
/// the cap when the instance is known to be tractable.
///
/// # Examples
///
/// ```
/// use annealmot::graph::{oracle_solve, WeightConvention, WeightedBipartiteGraph};
///
/// // Maximality forces two edges, so the greedy (0,0) start is suboptimal.
/// let g = WeightedBipartiteGraph::new(
///     2,
///     2,
///     [(0, 0, 0.9), (0, 1, 0.8), (1, 0, 0.7), (1, 1, 0.1)],
///     WeightConvention::Similarity,
/// )
/// .unwrap();
/// let (best, weight) = oracle_solve(&g).unwrap();
/// assert_eq!(best.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
/// assert!((weight - 1.5).abs() < 1e-12);
/// ```
pub fn oracle_solve(graph: &WeightedBipartiteGraph) -> Result<(Matching, f64)> {
    oracle_solve_with_cap(graph, DEFAULT_ORACLE_EDGE_CAP)
}

/// [`oracle_solve`] with an explicit edge cap.
///
/// The search is a depth-first enumeration of matchings in canonical edge
/// order with a branch-and-bound prune, so it is exact; the cap only guards
/// against accidentally feeding it an instance with a huge matching count.
pub fn oracle_solve_with_cap(
    graph: &WeightedBipartiteGraph,
    cap: usize,
) -> Result<(Matching, f64)> {
    let n_edges = graph.edges().len();
    if n_edges > cap {
        return Err(Error::EdgeCapExceeded {
            edges: n_edges,
            cap,
        });
    }
    if graph.n_left() > 128 || graph.n_right() > 128 {
        return Err(Error::InvalidParameter(
            "exact solver supports at most 128 nodes per side".into(),
        ));
    }
    let gains: Vec<f64> = (0..n_edges).map(|i| graph.gain_at(i)).collect();
    // suffix[i] = total gain of edges i.. — an upper bound on what any
    // extension of a partial matching can still collect.
    let mut suffix = vec![0.0; n_edges + 1];
    for i in (0..n_edges).rev() {
        suffix[i] = suffix[i + 1] + gains[i];
    }

    struct Search<'a> {
        graph: &'a WeightedBipartiteGraph,
        gains: &'a [f64],
        suffix: &'a [f64],
        picked: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn run(&mut self, idx: usize, left_used: u128, right_used: u128, gain: f64) {
            if let Some((best_gain, _)) = &self.best {
                // Strict inequality: equal-bound branches may still hold a
                // lexicographically smaller tie and must be explored.
                if gain + self.suffix[idx] < *best_gain {
                    return;
                }
            }
            if idx == self.gains.len() {
                // Candidate leaf; keep it only if no edge is still addable.
                for e in self.graph.edges() {
                    if left_used & (1u128 << e.left) == 0 && right_used & (1u128 << e.right) == 0 {
                        return;
                    }
                }
                let better = match &self.best {
                    None => true,
                    Some((best_gain, best_picked)) => {
                        gain > *best_gain || (gain == *best_gain && self.picked < *best_picked)
                    }
                };
                if better {
                    self.best = Some((gain, self.picked.clone()));
                }
                return;
            }
            let e = self.graph.edges()[idx];
            if left_used & (1u128 << e.left) == 0 && right_used & (1u128 << e.right) == 0 {
                self.picked.push(idx);
                self.run(
                    idx + 1,
                    left_used | (1u128 << e.left),
                    right_used | (1u128 << e.right),
                    gain + self.gains[idx],
                );
                self.picked.pop();
            }
            self.run(idx + 1, left_used, right_used, gain);
        }
    }

    let mut search = Search {
        graph,
        gains: &gains,
        suffix: &suffix,
        picked: Vec::new(),
        best: None,
    };
    search.run(0, 0, 0, 0.0);
    let (_, picked) = search
        .best
        .expect("the empty matching is always a candidate");
    let matching = Matching::new(
        picked
            .iter()
            .map(|&i| (graph.edges()[i].left, graph.edges()[i].right)),
    )
    .expect("search only builds disjoint edge sets");
    let weight = matching_weight(graph, &matching)?;
    Ok((matching, weight))
}
