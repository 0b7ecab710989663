//! Simple undirected graphs on `[n]`, exact per-vertex independence numbers,
//! seeded random graphs, greedy coloring and the graph JSON format.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::config::Limits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("vertex label {label} outside 1..={n}")]
    Range { label: usize, n: usize },
    #[error("edge [{0}, {1}] must satisfy u < v")]
    InvalidEdge(usize, usize),
    #[error("duplicate edge [{0}, {1}]")]
    DuplicateEdge(usize, usize),
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("graph has {n} vertices, exact search limit is {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
}

/// Undirected simple graph on vertices `1..=n`.
///
/// Adjacency is stored as one bitset per vertex (bit `j-1` for vertex `j`),
/// which is also the representation the exact independence solver works on.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n ≥ 1` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        Ok(Graph {
            n,
            adj: vec![BitSet::new(n); n],
        })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for u in 1..=n {
            for v in u + 1..=n {
                g.insert_edge_unchecked(u, v);
            }
        }
        Ok(g)
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for u in 1..n {
            g.insert_edge_unchecked(u, u + 1);
        }
        Ok(g)
    }

    /// Cycle `1 - 2 - ... - n - 1`, for `n ≥ 3`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::path(n)?;
        if n >= 3 {
            g.insert_edge_unchecked(1, n);
        }
        Ok(g)
    }

    /// Builds a graph from an edge list. Edges may be given in either
    /// orientation; self-loops, out-of-range labels and repeated edges are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if !g.add_edge(u, v)? {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(g)
    }

    /// Adds edge `{u, v}`; returns `false` if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        for label in [u, v] {
            if label == 0 || label > self.n {
                return Err(GraphError::Range { label, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::InvalidEdge(u, v));
        }
        if self.has_edge(u, v) {
            return Ok(false);
        }
        self.insert_edge_unchecked(u, v);
        Ok(true)
    }

    fn insert_edge_unchecked(&mut self, u: usize, v: usize) {
        self.adj[u - 1].insert(v - 1);
        self.adj[v - 1].insert(u - 1);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u >= 1 && u <= self.n && v >= 1 && self.adj[u - 1].contains(v - 1)
    }

    /// Neighbors of `v` in increasing label order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v - 1].iter().map(|j| j + 1)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].count()
    }

    /// Entry `i` is the degree of vertex `i + 1`.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(BitSet::count).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 1..=self.n {
            for v in self.adj[u - 1].iter().map(|j| j + 1) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Whether the labelled vertex set is independent.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

/// Per-vertex independence numbers: `values()[i]` is the largest size of an
/// independent set containing vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaVector(Vec<usize>);

impl AlphaVector {
    pub fn new(values: Vec<usize>) -> Self {
        AlphaVector(values)
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// `α` of the labelled vertex `v` (1-indexed).
    pub fn of(&self, v: usize) -> usize {
        self.0[v - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact `α_i` for every vertex.
///
/// `α_i = 1 + α(G[V \ N[i]])`. Each induced subproblem is a maximum clique
/// search in the complement, solved by a bitset branch-and-bound with a greedy
/// coloring bound. Vertices with identical closed non-neighborhoods share one
/// solve, and distinct subproblems run in parallel.
pub fn alpha_per_vertex(g: &Graph, limits: &Limits) -> Result<AlphaVector, GraphError> {
    if g.n > limits.exact_alpha_max_n {
        return Err(GraphError::SizeLimitExceeded {
            n: g.n,
            limit: limits.exact_alpha_max_n,
        });
    }
    let n = g.n;
    let compat: Vec<BitSet> = (0..n)
        .map(|i| {
            let mut s = BitSet::full(n);
            s.difference_with(&g.adj[i]);
            s.remove(i);
            s
        })
        .collect();

    let mut index_of: HashMap<&BitSet, usize> = HashMap::new();
    let mut problems: Vec<&BitSet> = Vec::new();
    let mut which = Vec::with_capacity(n);
    for c in &compat {
        let id = *index_of.entry(c).or_insert_with(|| {
            problems.push(c);
            problems.len() - 1
        });
        which.push(id);
    }
    let solved: Vec<usize> = problems
        .par_iter()
        .map(|cand| max_clique_size(&compat, (*cand).clone()))
        .collect();
    Ok(AlphaVector(which.into_iter().map(|id| 1 + solved[id]).collect()))
}

/// Size of a maximum independent set of `g`.
pub fn independence_number(g: &Graph, limits: &Limits) -> Result<usize, GraphError> {
    Ok(alpha_per_vertex(g, limits)?
        .values()
        .iter()
        .copied()
        .max()
        .unwrap_or(0))
}

/// Maximum clique inside `candidates` of the graph whose adjacency is `adj`.
fn max_clique_size(adj: &[BitSet], candidates: BitSet) -> usize {
    let mut best = 0;
    expand(adj, 0, candidates, &mut best);
    best
}

fn expand(adj: &[BitSet], depth: usize, mut cand: BitSet, best: &mut usize) {
    let (order, bounds) = color_sort(adj, &cand);
    for (&v, &bound) in order.iter().zip(&bounds).rev() {
        if depth + bound <= *best {
            return;
        }
        let next = cand.intersection(&adj[v]);
        if next.is_empty() {
            if depth + 1 > *best {
                *best = depth + 1;
            }
        } else {
            expand(adj, depth + 1, next, best);
        }
        cand.remove(v);
    }
}

/// Greedy sequential coloring of `cand`; returns vertices in color order and
/// the running color count, an upper bound on any clique among the vertices
/// up to that position.
fn color_sort(adj: &[BitSet], cand: &BitSet) -> (Vec<usize>, Vec<usize>) {
    let mut uncolored = cand.clone();
    let mut order = Vec::with_capacity(cand.count());
    let mut bounds = Vec::with_capacity(order.capacity());
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = avail.first() {
            avail.remove(v);
            avail.difference_with(&adj[v]);
            uncolored.remove(v);
            order.push(v);
            bounds.push(color);
        }
    }
    (order, bounds)
}

/// `G(n, p)` driven by ChaCha8 seeded with `seed` through
/// `SeedableRng::seed_from_u64`. Pairs `(u, v)`, `u < v`, are visited in
/// lexicographic order and each draws one `f64` in `[0, 1)`; the pair is an
/// edge iff the draw is below `p`. ChaCha8 output is specified bit-for-bit, so
/// a seed reproduces the same graph on every platform.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    let mut g = Graph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random::<f64>() < p {
                g.insert_edge_unchecked(u, v);
            }
        }
    }
    Ok(g)
}

/// First-fit coloring in label order. Entry `i` is the color of vertex `i + 1`;
/// colors are `0..c` and contiguous.
pub fn greedy_coloring(g: &Graph) -> Vec<usize> {
    let mut colors: Vec<usize> = Vec::with_capacity(g.n);
    for v in 1..=g.n {
        let mut used = vec![false; v];
        for u in g.neighbors(v).filter(|&u| u < v) {
            used[colors[u - 1]] = true;
        }
        colors.push(used.iter().position(|&b| !b).unwrap_or(used.len()));
    }
    colors
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses `{"n": <int>, "edges": [[u, v], ...]}` with `1 ≤ u < v ≤ n`.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut g = Graph::empty(file.n)?;
    for [u, v] in file.edges {
        for label in [u, v] {
            if label == 0 || label > file.n {
                return Err(GraphError::Range { label, n: file.n });
            }
        }
        if u >= v {
            return Err(GraphError::InvalidEdge(u, v));
        }
        if !g.add_edge(u, v)? {
            return Err(GraphError::DuplicateEdge(u, v));
        }
    }
    Ok(g)
}

pub fn serialize_graph(g: &Graph) -> String {
    let file = GraphFile {
        n: g.n,
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&file).expect("graph serialization is infallible")
}
