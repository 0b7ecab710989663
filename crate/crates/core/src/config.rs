//! Size limits shared by the exhaustive routines.

use serde::{Deserialize, Serialize};

/// Caps on exhaustive work. Every routine that enumerates something
/// exponential consults one of these instead of a hardcoded constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest vertex count accepted by the exact per-vertex independence
    /// number computation.
    pub exact_alpha_max_n: usize,
    /// Largest number of codewords (or scanned words) a construction may
    /// enumerate.
    pub enumeration_cap: u64,
    /// Largest number of codeword pairs an exhaustive distance check may visit.
    pub pair_check_cap: u64,
    /// Largest `m` for which a Sylvester–Hadamard matrix of order `2^m` is built.
    pub hadamard_max_m: u32,
    /// Largest number of blocks a single construction may emit.
    pub block_cap: u64,
    /// Largest block count for which probability checks sweep all `2^m`
    /// binary vectors.
    pub exhaustive_max_blocks: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exact_alpha_max_n: 40,
            enumeration_cap: 1 << 20,
            pair_check_cap: 1 << 24,
            hadamard_max_m: 12,
            block_cap: 1 << 16,
            exhaustive_max_blocks: 20,
        }
    }
}
