//! Exhaustive ground truth on tiny instances: the minimum capacity of a
//! covering of `K_n^λ` and the minimum length of a binary code with `n` words
//! at distance `λ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::codeforge::k_best;
use crate::config::Limits;
use crate::coverkit::{BipartiteBlock, Covering};

/// Largest `n` accepted by [`exact_cap`].
pub const EXACT_CAP_MAX_N: usize = 8;

/// Largest `k_max` accepted by [`exact_k`].
pub const EXACT_K_MAX_LENGTH: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("search budget exhausted: optimum lies in [{lower}, {}]", upper.map_or("?".to_string(), |u| u.to_string()))]
    BudgetExhausted { lower: usize, upper: Option<usize> },
    #[error("no code of length <= {k_max} found")]
    NotFound { k_max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Iterative deepening stops after this capacity.
    pub max_capacity: usize,
    /// Longest block list explored.
    pub max_blocks: usize,
    /// Total search nodes over all deepening levels.
    pub node_limit: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_capacity: 64,
            max_blocks: 32,
            node_limit: 50_000_000,
        }
    }
}

/// A solved `exact_cap` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCap {
    pub value: usize,
    pub witness: Covering,
    /// Capacities shown infeasible by completed searches, in increasing order.
    pub refuted: Vec<usize>,
    pub nodes: u64,
}

#[derive(Debug, Clone)]
struct Candidate {
    left: u16,
    right: u16,
    size: usize,
    /// Pair indices this block separates.
    pairs: Vec<usize>,
    /// First block of its shape in the search order.
    standard: bool,
}

struct CapSearch<'a> {
    lambda: u32,
    n: usize,
    blocks: &'a [Candidate],
    pair_of: Vec<Vec<usize>>,
    mult: Vec<u32>,
    deficit: usize,
    chosen: Vec<usize>,
    nodes: u64,
    node_limit: u64,
    max_blocks: usize,
}

enum Outcome {
    Found,
    Exhausted,
    Aborted,
}

impl CapSearch<'_> {
    fn apply(&mut self, idx: usize) {
        for &p in &self.blocks[idx].pairs {
            if self.mult[p] < self.lambda {
                self.deficit -= 1;
            }
            self.mult[p] += 1;
        }
        self.chosen.push(idx);
    }

    fn undo(&mut self) {
        let idx = self.chosen.pop().expect("undo without apply");
        for &p in &self.blocks[idx].pairs {
            self.mult[p] -= 1;
            if self.mult[p] < self.lambda {
                self.deficit += 1;
            }
        }
    }

    fn vertex_need(&self) -> usize {
        (0..self.n)
            .map(|j| {
                self.pair_of[j]
                    .iter()
                    .map(|&p| self.lambda.saturating_sub(self.mult[p]))
                    .max()
                    .unwrap_or(0) as usize
            })
            .sum()
    }

    fn dfs(&mut self, start: usize, remaining: usize) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Outcome::Aborted;
        }
        if self.deficit == 0 {
            return Outcome::Found;
        }
        if self.chosen.len() >= self.max_blocks || start >= self.blocks.len() {
            return Outcome::Exhausted;
        }
        // Each vertex must appear in as many further blocks as its worst pair
        // still lacks.
        if self.vertex_need() > remaining {
            return Outcome::Exhausted;
        }
        // A block of size t separates at most ⌊t/2⌋⌈t/2⌉ pairs, and later
        // blocks are no larger than blocks[start].
        let s = self.blocks[start].size.min(remaining);
        if s < 2 || remaining * (s / 2) * s.div_ceil(2) < self.deficit * s {
            return Outcome::Exhausted;
        }
        for idx in start..self.blocks.len() {
            let b = &self.blocks[idx];
            if b.size > remaining {
                continue;
            }
            if self.chosen.is_empty() && !b.standard {
                continue;
            }
            // In a minimum covering every block separates some pair that the
            // blocks before it leave short.
            if b.pairs.iter().all(|&p| self.mult[p] >= self.lambda) {
                continue;
            }
            let size = b.size;
            self.apply(idx);
            match self.dfs(idx, remaining - size) {
                Outcome::Exhausted => self.undo(),
                other => return other,
            }
        }
        Outcome::Exhausted
    }
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All blocks on `n` vertices, oriented so the left side holds the smallest
/// vertex, sorted by (size desc, larger side desc, union mask asc, left size
/// desc, left mask asc). Under this order the block `{0..a} | {a..a+b}` is the
/// first of its shape.
fn candidate_blocks(n: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let full = 1u32 << n;
    for union in 1..full {
        if union.count_ones() < 2 {
            continue;
        }
        let low = union & union.wrapping_neg();
        // Left sets: subsets of union containing its lowest vertex, proper.
        let rest = union ^ low;
        let mut sub = rest;
        loop {
            let left = low | sub;
            let right = union ^ left;
            if right != 0 {
                let mut pairs = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        let (la, lb) = (left >> a & 1 == 1, left >> b & 1 == 1);
                        let (ra, rb) = (right >> a & 1 == 1, right >> b & 1 == 1);
                        if (la && rb) || (ra && lb) {
                            pairs.push(pair_index(n, a, b));
                        }
                    }
                }
                out.push(Candidate {
                    left: left as u16,
                    right: right as u16,
                    size: union.count_ones() as usize,
                    pairs,
                    standard: false,
                });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let key = |c: &Candidate| {
        let (l, r) = (c.left.count_ones(), c.right.count_ones());
        (
            std::cmp::Reverse(c.size),
            std::cmp::Reverse(l.max(r)),
            c.left | c.right,
            std::cmp::Reverse(l),
            c.left,
        )
    };
    out.sort_by_key(key);
    let mut last_shape = None;
    for c in out.iter_mut() {
        let shape = (c.size, c.left.count_ones().max(c.right.count_ones()));
        c.standard = last_shape != Some(shape);
        last_shape = Some(shape);
    }
    out
}

fn to_covering(n: usize, blocks: &[Candidate], chosen: &[usize]) -> Covering {
    let labels = |mask: u16| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
    let list = chosen
        .iter()
        .map(|&i| {
            BipartiteBlock::new(labels(blocks[i].left), labels(blocks[i].right))
                .expect("candidate blocks are valid")
        })
        .collect();
    Covering::new(n, list).expect("candidate labels lie in 1..=n")
}

/// Minimum capacity of a covering of `K_n^λ` by complete bipartite blocks.
///
/// Iterative deepening on the capacity bound, starting from the trivial
/// `n·λ` (every vertex lies in at least `λ` blocks), so each capacity below
/// the returned value is refuted by a completed search. Blocks are chosen as a
/// multiset in a fixed canonical order; the first block is fixed to the
/// standard representative of its shape, which is sound because all vertices
/// of `K_n` are interchangeable.
pub fn exact_cap(n: usize, lambda: usize, budget: &SearchBudget) -> Result<ExactCap, OracleError> {
    if lambda == 0 {
        return Err(OracleError::InvalidInstance("lambda must be at least 1".into()));
    }
    if !(2..=EXACT_CAP_MAX_N).contains(&n) {
        return Err(OracleError::InvalidInstance(format!(
            "exact search supports 2 <= n <= {EXACT_CAP_MAX_N}, got {n}"
        )));
    }
    let blocks = candidate_blocks(n);
    let mut pair_of = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let p = pair_index(n, a, b);
            pair_of[a].push(p);
            pair_of[b].push(p);
        }
    }
    let pair_count = n * (n - 1) / 2;
    let mut search = CapSearch {
        lambda: lambda as u32,
        n,
        blocks: &blocks,
        pair_of,
        mult: vec![0; pair_count],
        deficit: pair_count * lambda,
        chosen: Vec::new(),
        nodes: 0,
        node_limit: budget.node_limit,
        max_blocks: budget.max_blocks,
    };
    let upper = k_best(n as u64, lambda, &Limits::default())
        .ok()
        .map(|c| c.k * n);
    let mut refuted = Vec::new();
    let mut capacity = n * lambda;
    while capacity <= budget.max_capacity {
        match search.dfs(0, capacity) {
            Outcome::Found => {
                let witness = to_covering(n, &blocks, &search.chosen);
                let value = crate::coverkit::capacity(&witness);
                return Ok(ExactCap {
                    value,
                    witness,
                    refuted,
                    nodes: search.nodes,
                });
            }
            Outcome::Exhausted => refuted.push(capacity),
            Outcome::Aborted => {
                return Err(OracleError::BudgetExhausted {
                    lower: capacity,
                    upper,
                })
            }
        }
        capacity += 1;
    }
    Err(OracleError::BudgetExhausted { lower: capacity, upper })
}

/// Smallest `k ≤ k_max` for which `n` words of length `k` with pairwise
/// distance `≥ λ` exist.
///
/// Codes are translated so that they contain the zero word; the remaining
/// `n - 1` words form a clique in the graph on words of weight `≥ λ` joined at
/// distance `≥ λ`, found by branch-and-bound with a coloring bound.
pub fn exact_k(n: usize, lambda: usize, k_max: usize, node_limit: u64) -> Result<usize, OracleError> {
    if n < 2 || lambda == 0 {
        return Err(OracleError::InvalidInstance(format!(
            "exact_k needs n >= 2 and lambda >= 1 (n={n}, lambda={lambda})"
        )));
    }
    if k_max > EXACT_K_MAX_LENGTH {
        return Err(OracleError::InvalidInstance(format!(
            "exact_k supports k_max <= {EXACT_K_MAX_LENGTH}, got {k_max}"
        )));
    }
    let mut nodes = 0u64;
    for k in 1..=k_max {
        if lambda > k || (1usize << k) < n {
            continue;
        }
        let words: Vec<u32> = (1u32..1 << k)
            .filter(|w| w.count_ones() as usize >= lambda)
            .collect();
        if words.len() + 1 < n {
            continue;
        }
        let adj: Vec<BitSet> = words
            .iter()
            .map(|&a| {
                let mut s = BitSet::new(words.len());
                for (j, &b) in words.iter().enumerate() {
                    if (a ^ b).count_ones() as usize >= lambda {
                        s.insert(j);
                    }
                }
                s
            })
            .collect();
        let mut finder = CliqueFinder {
            adj: &adj,
            target: n - 1,
            nodes: &mut nodes,
            node_limit,
        };
        match finder.search(0, BitSet::full(words.len())) {
            Some(true) => return Ok(k),
            Some(false) => {}
            None => {
                return Err(OracleError::BudgetExhausted {
                    lower: k,
                    upper: None,
                })
            }
        }
    }
    Err(OracleError::NotFound { k_max })
}

struct CliqueFinder<'a> {
    adj: &'a [BitSet],
    target: usize,
    nodes: &'a mut u64,
    node_limit: u64,
}

impl CliqueFinder<'_> {
    /// `Some(true)` if a clique of `target` vertices extends the current one,
    /// `None` if the node budget ran out.
    fn search(&mut self, depth: usize, mut cand: BitSet) -> Option<bool> {
        *self.nodes += 1;
        if *self.nodes > self.node_limit {
            return None;
        }
        if depth >= self.target {
            return Some(true);
        }
        let mut uncolored = cand.clone();
        let mut order = Vec::new();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                avail.difference_with(&self.adj[v]);
                uncolored.remove(v);
                order.push((v, color));
            }
        }
        for &(v, bound) in order.iter().rev() {
            if depth + bound < self.target {
                return Some(false);
            }
            let next = cand.intersection(&self.adj[v]);
            if self.search(depth + 1, next)? {
                return Some(true);
            }
            cand.remove(v);
        }
        Some(false)
    }
}
