//! Coverings by complete bipartite graphs: the data model, constructions from
//! codes, Hadamard matrices, balanced bipartitions and colorings, and the
//! exhaustive verifier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::codeforge::{sylvester_matrix, BinaryCode, CodeError};
use crate::config::Limits;
use crate::graphlib::Graph;
use crate::ceil_log2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("vertex label {label} outside 1..={n}")]
    Range { label: usize, n: usize },
    #[error("block {block}: vertex {vertex} is on both sides")]
    Overlap { block: usize, vertex: usize },
    #[error("block {block}: vertex {vertex} listed twice")]
    DuplicateVertex { block: usize, vertex: usize },
    #[error("block {block} has an empty side")]
    EmptySide { block: usize },
    #[error("ground sets differ: {left} vs {right}")]
    GroundSetMismatch { left: usize, right: usize },
    #[error("code has {available} words, {needed} needed")]
    NotEnoughCodewords { available: usize, needed: usize },
    #[error("coloring assigns color {color} to adjacent vertices {u} and {v}")]
    ImproperColoring { u: usize, v: usize, color: usize },
    #[error("coloring has {got} entries for {n} vertices")]
    ColoringLength { got: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} needs {needed} blocks, limit is {limit}")]
    SizeLimitExceeded { what: String, needed: u128, limit: u128 },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A complete bipartite graph with vertex classes `left` and `right`, both
/// nonempty, disjoint and stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BipartiteBlock {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BipartiteBlock {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self, CoverError> {
        Self::checked(left, right, 0)
    }

    fn checked(mut left: Vec<usize>, mut right: Vec<usize>, index: usize) -> Result<Self, CoverError> {
        if left.is_empty() || right.is_empty() {
            return Err(CoverError::EmptySide { block: index });
        }
        for side in [&mut left, &mut right] {
            side.sort_unstable();
            if let Some(w) = side.windows(2).find(|w| w[0] == w[1]) {
                return Err(CoverError::DuplicateVertex {
                    block: index,
                    vertex: w[0],
                });
            }
        }
        if let Some(&v) = left.iter().find(|v| right.binary_search(v).is_ok()) {
            return Err(CoverError::Overlap { block: index, vertex: v });
        }
        Ok(BipartiteBlock { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Number of vertices, `|L| + |R|`.
    pub fn size(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn separates(&self, u: usize, v: usize) -> bool {
        let l = |x| self.left.binary_search(&x).is_ok();
        let r = |x| self.right.binary_search(&x).is_ok();
        (l(u) && r(v)) || (r(u) && l(v))
    }

    /// A label outside `1..=n`, if any.
    fn out_of_range(&self, n: usize) -> Option<usize> {
        [self.left[0], self.right[0], self.left[self.left.len() - 1], self.right[self.right.len() - 1]]
            .into_iter()
            .find(|&v| v == 0 || v > n)
    }
}

/// An ordered list of blocks on the ground set `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    n: usize,
    blocks: Vec<BipartiteBlock>,
}

impl Covering {
    pub fn empty(n: usize) -> Self {
        Covering { n, blocks: Vec::new() }
    }

    pub fn new(n: usize, blocks: Vec<BipartiteBlock>) -> Result<Self, CoverError> {
        if let Some(label) = blocks.iter().find_map(|b| b.out_of_range(n)) {
            return Err(CoverError::Range { label, n });
        }
        Ok(Covering { n, blocks })
    }

    pub fn push(&mut self, block: BipartiteBlock) -> Result<(), CoverError> {
        if let Some(label) = block.out_of_range(self.n) {
            return Err(CoverError::Range { label, n: self.n });
        }
        self.blocks.push(block);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[BipartiteBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// A copy without block `index` (0-based).
    pub fn without_block(&self, index: usize) -> Covering {
        let mut blocks = self.blocks.clone();
        blocks.remove(index);
        Covering { n: self.n, blocks }
    }

    /// Per-vertex membership masks over block indices.
    pub fn sides(&self) -> VertexSides {
        VertexSides::new(self)
    }
}

/// `Σ (|L_i| + |R_i|)`.
pub fn capacity(cov: &Covering) -> usize {
    cov.blocks.iter().map(BipartiteBlock::size).sum()
}

/// `x_j`: number of blocks containing vertex `j`; entry `j - 1`.
pub fn incidence_counts(cov: &Covering) -> Vec<usize> {
    let mut x = vec![0; cov.n];
    for b in &cov.blocks {
        for &v in b.left.iter().chain(&b.right) {
            x[v - 1] += 1;
        }
    }
    x
}

/// `Σ n_i²` over blocks, where `n_i = |L_i| + |R_i|`.
pub fn sum_squared_block_sizes(cov: &Covering) -> u128 {
    cov.blocks.iter().map(|b| (b.size() as u128).pow(2)).sum()
}

/// For each vertex `j`, the set `A_j` of blocks with `j` on the left and
/// `B_j` of blocks with `j` on the right.
#[derive(Debug, Clone)]
pub struct VertexSides {
    pub left: Vec<BitSet>,
    pub right: Vec<BitSet>,
}

impl VertexSides {
    fn new(cov: &Covering) -> Self {
        let m = cov.blocks.len();
        let mut left = vec![BitSet::new(m); cov.n];
        let mut right = vec![BitSet::new(m); cov.n];
        for (i, b) in cov.blocks.iter().enumerate() {
            for &v in &b.left {
                left[v - 1].insert(i);
            }
            for &v in &b.right {
                right[v - 1].insert(i);
            }
        }
        VertexSides { left, right }
    }

    /// Number of blocks separating vertices `u` and `v` (1-indexed).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.left[u - 1].intersection_count(&self.right[v - 1])
            + self.right[u - 1].intersection_count(&self.left[v - 1])
    }
}

/// Which pairs must be separated, and how often.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// Every pair of `[n]`, `lambda` times.
    Complete { n: usize, lambda: usize },
    /// Every edge of the graph, `lambda` times.
    Graph { graph: &'a Graph, lambda: usize },
}

impl Target<'_> {
    pub fn n(&self) -> usize {
        match self {
            Target::Complete { n, .. } => *n,
            Target::Graph { graph, .. } => graph.n(),
        }
    }

    pub fn lambda(&self) -> usize {
        match self {
            Target::Complete { lambda, .. } | Target::Graph { lambda, .. } => *lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMultiplicity {
    pub u: usize,
    pub v: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub multiplicity: usize,
    pub pairs: usize,
}

/// Result of [`verify`]. Violations are listed in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub n: usize,
    pub lambda: usize,
    pub required_pairs: usize,
    /// `None` when there are no required pairs.
    pub min_multiplicity: Option<usize>,
    pub valid: bool,
    pub violating_pairs: Vec<PairMultiplicity>,
    pub histogram: Vec<HistogramBin>,
}

/// Counts, for every required pair, the blocks that split it, and reports
/// the minimum and every pair below `lambda`.
pub fn verify(cov: &Covering, target: &Target<'_>) -> Result<CoverageReport, CoverError> {
    let n = target.n();
    if cov.n != n {
        return Err(CoverError::GroundSetMismatch { left: cov.n, right: n });
    }
    let lambda = target.lambda();
    let sides = cov.sides();
    let rows: Vec<(Vec<usize>, Vec<PairMultiplicity>, usize)> = (1..=n)
        .into_par_iter()
        .map(|u| {
            let mut hist: Vec<usize> = Vec::new();
            let mut bad = Vec::new();
            let mut required = 0;
            let partners: Box<dyn Iterator<Item = usize>> = match target {
                Target::Complete { .. } => Box::new(u + 1..=n),
                Target::Graph { graph, .. } => Box::new(graph.neighbors(u).filter(move |&v| v > u)),
            };
            for v in partners {
                required += 1;
                let mult = sides.multiplicity(u, v);
                if hist.len() <= mult {
                    hist.resize(mult + 1, 0);
                }
                hist[mult] += 1;
                if mult < lambda {
                    bad.push(PairMultiplicity { u, v, multiplicity: mult });
                }
            }
            (hist, bad, required)
        })
        .collect();

    let mut hist: Vec<usize> = Vec::new();
    let mut violating_pairs = Vec::new();
    let mut required_pairs = 0;
    for (h, bad, req) in rows {
        if hist.len() < h.len() {
            hist.resize(h.len(), 0);
        }
        for (m, c) in h.into_iter().enumerate() {
            hist[m] += c;
        }
        violating_pairs.extend(bad);
        required_pairs += req;
    }
    let min_multiplicity = hist.iter().position(|&c| c > 0);
    let histogram = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(multiplicity, pairs)| HistogramBin { multiplicity, pairs })
        .collect();
    Ok(CoverageReport {
        n,
        lambda,
        required_pairs,
        min_multiplicity,
        valid: violating_pairs.is_empty(),
        violating_pairs,
        histogram,
    })
}

/// Covering produced from a code, with the rows that had an empty side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeCovering {
    pub covering: Covering,
    /// 1-based row indices dropped because every selected word agreed there.
    pub dropped_rows: Vec<usize>,
}

/// Uses the first `n` words as the columns of a `k × n` matrix; row `i`
/// becomes the block `({j : a_ij = 0}, {j : a_ij = 1})`.
pub fn code_to_covering(code: &BinaryCode, n: usize) -> Result<CodeCovering, CoverError> {
    if n < 2 {
        return Err(CoverError::InvalidParameter(format!("code covering needs n >= 2, got {n}")));
    }
    if code.len() < n {
        return Err(CoverError::NotEnoughCodewords {
            available: code.len(),
            needed: n,
        });
    }
    Ok(words_to_covering(&code.words()[..n], code.length()))
}

/// Same construction for an explicit word list (all of length `k`).
pub fn words_to_covering(words: &[crate::codeforge::Word], k: usize) -> CodeCovering {
    let n = words.len();
    let mut blocks = Vec::new();
    let mut dropped_rows = Vec::new();
    for row in 0..k {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (j, w) in words.iter().enumerate() {
            if w.bit(row) {
                right.push(j + 1);
            } else {
                left.push(j + 1);
            }
        }
        if left.is_empty() || right.is_empty() {
            dropped_rows.push(row + 1);
        } else {
            blocks.push(BipartiteBlock { left, right });
        }
    }
    CodeCovering {
        covering: Covering { n, blocks },
        dropped_rows,
    }
}

/// For `n = 2^m`: one block per non-constant row of the Sylvester matrix,
/// splitting columns by sign. Every pair is split exactly `n/2` times.
pub fn hadamard_covering(m: u32, limits: &Limits) -> Result<Covering, CoverError> {
    let h = sylvester_matrix(m, limits)?;
    let n = h.len();
    let blocks = h[1..]
        .iter()
        .map(|row| {
            let left = (1..=n).filter(|&j| row[j - 1] == 1).collect();
            let right = (1..=n).filter(|&j| row[j - 1] == -1).collect();
            BipartiteBlock { left, right }
        })
        .collect();
    Ok(Covering { n, blocks })
}

/// One block per unordered balanced bipartition of `[n]`, `n` even; the
/// side containing vertex 1 is the left side. Blocks are listed in
/// lexicographic order of their left sides.
pub fn balanced_bipartitions_covering(n: usize, limits: &Limits) -> Result<Covering, CoverError> {
    if n < 2 || n % 2 == 1 {
        return Err(CoverError::InvalidParameter(format!(
            "balanced bipartitions need an even n >= 2, got {n}"
        )));
    }
    let count = binomial_u128(n as u64 - 1, n as u64 / 2 - 1);
    if count > limits.block_cap as u128 {
        return Err(CoverError::SizeLimitExceeded {
            what: "balanced bipartitions".into(),
            needed: count,
            limit: limits.block_cap as u128,
        });
    }
    let half = n / 2;
    let mut blocks = Vec::with_capacity(count as usize);
    // Combinations of half-1 elements from 2..=n in lexicographic order.
    let mut pick: Vec<usize> = (2..=half).collect();
    loop {
        let mut left = vec![1];
        left.extend(&pick);
        let right = (2..=n).filter(|v| !pick.contains(v)).collect();
        blocks.push(BipartiteBlock { left, right });
        let mut i = pick.len();
        loop {
            if i == 0 {
                return Ok(Covering { n, blocks });
            }
            i -= 1;
            if pick[i] < n - (pick.len() - 1 - i) {
                break;
            }
        }
        pick[i] += 1;
        for t in i + 1..pick.len() {
            pick[t] = pick[t - 1] + 1;
        }
    }
}

pub(crate) fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Concatenation of the two block lists.
pub fn covering_sum(a: &Covering, b: &Covering) -> Result<Covering, CoverError> {
    if a.n != b.n {
        return Err(CoverError::GroundSetMismatch { left: a.n, right: b.n });
    }
    let mut blocks = a.blocks.clone();
    blocks.extend(b.blocks.iter().cloned());
    Ok(Covering { n: a.n, blocks })
}

/// Block `t` splits the vertices by bit `t` of their color (bit 0 on the
/// left, bit 1 on the right). A proper coloring with `c` classes gives
/// `⌈log2 c⌉` blocks covering every edge.
pub fn coloring_to_covering(g: &Graph, coloring: &[usize]) -> Result<Covering, CoverError> {
    let n = g.n();
    if coloring.len() != n {
        return Err(CoverError::ColoringLength {
            got: coloring.len(),
            n,
        });
    }
    for (u, v) in g.edges() {
        if coloring[u - 1] == coloring[v - 1] {
            return Err(CoverError::ImproperColoring {
                u,
                v,
                color: coloring[u - 1],
            });
        }
    }
    let classes = coloring.iter().max().map_or(0, |&c| c + 1) as u64;
    let bits = if classes <= 1 { 0 } else { ceil_log2(classes) };
    let mut blocks = Vec::new();
    for t in 0..bits {
        let (left, right): (Vec<usize>, Vec<usize>) = (1..=n).partition(|&v| coloring[v - 1] >> t & 1 == 0);
        if !left.is_empty() && !right.is_empty() {
            blocks.push(BipartiteBlock { left, right });
        }
    }
    Ok(Covering { n, blocks })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockFile {
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoveringFile {
    n: usize,
    blocks: Vec<BlockFile>,
}

/// Parses `{"n": <int>, "blocks": [{"left": [...], "right": [...]}, ...]}`.
pub fn parse_covering(text: &str) -> Result<Covering, CoverError> {
    let file: CoveringFile = serde_json::from_str(text).map_err(|e| CoverError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let n = file.n;
    let mut blocks = Vec::with_capacity(file.blocks.len());
    for (i, b) in file.blocks.into_iter().enumerate() {
        if let Some(&label) = b.left.iter().chain(&b.right).find(|&&v| v == 0 || v > n) {
            return Err(CoverError::Range { label, n });
        }
        blocks.push(BipartiteBlock::checked(b.left, b.right, i)?);
    }
    Ok(Covering { n, blocks })
}

pub fn serialize_covering(cov: &Covering) -> String {
    serde_json::to_string(&covering_file(cov)).expect("covering serialization is infallible")
}

/// The covering as a JSON value, for embedding into larger documents.
pub fn covering_to_json(cov: &Covering) -> serde_json::Value {
    serde_json::to_value(covering_file(cov)).expect("covering serialization is infallible")
}

fn covering_file(cov: &Covering) -> CoveringFile {
    CoveringFile {
        n: cov.n,
        blocks: cov
            .blocks
            .iter()
            .map(|b| BlockFile {
                left: b.left.clone(),
                right: b.right.clone(),
            })
            .collect(),
    }
}
