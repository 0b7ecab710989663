//! Bipartite coverings of graphs and complete multigraphs.
//!
//! A bipartite covering of `K_n^λ` is a list of complete bipartite graphs on
//! `[n]` such that every pair of vertices is split across at least `λ` of
//! them. Its capacity is the total number of vertices over all blocks.
//!
//! The crate is organised as:
//!
//! * [`graphlib`]: graphs, degrees, exact per-vertex independence numbers,
//!   seeded random graphs, greedy coloring and the graph JSON format.
//! * [`codeforge`]: binary codes (even-weight, greedy lexicode, extended BCH),
//!   Sylvester–Hadamard matrices and the shortest-length selector.
//! * [`coverkit`]: the covering model, constructions and the verifier.
//! * [`boundtab`]: closed-form lower and upper bounds on capacity.
//! * [`oracle`]: exhaustive minimum capacity / minimum code length on tiny
//!   instances.
//! * [`proofcheck`]: executable checks of the counting and probabilistic
//!   inequalities that underlie the lower bounds.
//!
//! Vertices are labelled `1..=n` everywhere in the public API.

pub mod bitset;
pub mod boundtab;
pub mod codeforge;
pub mod config;
pub mod coverkit;
pub mod graphlib;
pub mod oracle;
pub mod proofcheck;

pub use config::Limits;

/// Version tag written into every JSON document produced by the toolkit.
pub const SCHEMA_VERSION: u32 = 1;

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_small_values() {
        let got: Vec<u32> = (1..=9).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
        assert_eq!(ceil_log2(1 << 40), 40);
        assert_eq!(ceil_log2((1 << 40) + 1), 41);
    }
}
