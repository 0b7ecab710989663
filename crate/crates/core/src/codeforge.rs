//! Binary codes used to build coverings: the even-weight code, the greedy
//! lexicographic (Gilbert–Varshamov) code, parity-extended primitive BCH
//! codes, Sylvester–Hadamard matrices, and a selector for the shortest
//! length any of them reaches.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Limits;
use crate::ceil_log2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} needs {needed} items, limit is {limit}")]
    SizeLimitExceeded { what: String, needed: u128, limit: u128 },
    #[error("enumeration of {needed} items exceeds cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("greedy scan reached {achieved} words, target was {target}")]
    TargetUnreached { achieved: usize, target: usize },
    #[error("field error: {0}")]
    Field(String),
    #[error("no implemented construction gives {n} words at distance {lambda} within limits")]
    NoConstruction { n: u64, lambda: usize },
    #[error("code words must be distinct and of length {length}: {detail}")]
    InvalidWords { length: usize, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A binary word. Position 0 is the leftmost bit of the text form; bits are
/// packed most-significant-first so that `Ord` on words of one length is the
/// lexicographic order of their 0/1 strings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: usize,
    blocks: Vec<u64>,
}

impl Word {
    pub fn zeros(len: usize) -> Self {
        Word {
            len,
            blocks: vec![0; len.div_ceil(64)],
        }
    }

    /// The `len`-bit binary expansion of `value`, most significant bit first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64 && (len == 64 || value >> len == 0));
        let mut w = Word::zeros(len);
        if len > 0 {
            w.blocks[0] = value << (64 - len);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bit(&self, pos: usize) -> bool {
        debug_assert!(pos < self.len);
        self.blocks[pos / 64] >> (63 - pos % 64) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        debug_assert!(pos < self.len);
        self.blocks[pos / 64] ^= 1 << (63 - pos % 64);
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        if self.bit(pos) != value {
            self.flip(pos);
        }
    }

    pub fn weight(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn distance(&self, other: &Word) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Word) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a ^= b;
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl std::str::FromStr for Word {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = Word::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.flip(i),
                _ => return Err(CodeError::Parse(format!("invalid bit {c:?} in word {s:?}"))),
            }
        }
        Ok(w)
    }
}

/// An ordered list of distinct words of a common length, with an optional
/// cached exact minimum distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    length: usize,
    words: Vec<Word>,
    min_distance: Option<usize>,
    method: String,
}

impl BinaryCode {
    pub fn new(length: usize, words: Vec<Word>, method: impl Into<String>) -> Result<Self, CodeError> {
        if let Some(w) = words.iter().find(|w| w.len() != length) {
            return Err(CodeError::InvalidWords {
                length,
                detail: format!("word {w} has length {}", w.len()),
            });
        }
        let mut seen = HashSet::with_capacity(words.len());
        if let Some(w) = words.iter().find(|w| !seen.insert(*w)) {
            return Err(CodeError::InvalidWords {
                length,
                detail: format!("word {w} repeated"),
            });
        }
        Ok(BinaryCode {
            length,
            words,
            min_distance: None,
            method: method.into(),
        })
    }

    /// Caller guarantees distinctness and lengths.
    fn from_trusted(length: usize, words: Vec<Word>, method: &str, min_distance: Option<usize>) -> Self {
        BinaryCode {
            length,
            words,
            min_distance,
            method: method.to_string(),
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn cached_min_distance(&self) -> Option<usize> {
        self.min_distance
    }

    /// Exact minimum pairwise distance, computed on first use and cached.
    pub fn min_distance(&mut self, limits: &Limits) -> Result<usize, CodeError> {
        if let Some(d) = self.min_distance {
            return Ok(d);
        }
        let d = exact_min_distance(&self.words, limits)?;
        self.min_distance = Some(d);
        Ok(d)
    }
}

/// Minimum Hamming distance over all pairs of `words`.
pub fn exact_min_distance(words: &[Word], limits: &Limits) -> Result<usize, CodeError> {
    if words.len() < 2 {
        return Err(CodeError::InvalidParameter(
            "minimum distance needs at least two words".into(),
        ));
    }
    let count = words.len() as u128;
    let pairs = count * (count - 1) / 2;
    if pairs > limits.pair_check_cap as u128 {
        return Err(CodeError::CapExceeded {
            needed: pairs,
            cap: limits.pair_check_cap as u128,
        });
    }
    Ok((0..words.len())
        .into_par_iter()
        .map(|i| {
            words[i + 1..]
                .iter()
                .map(|w| w.distance(&words[i]))
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .expect("at least two words"))
}

fn check_enumeration(needed: u128, limits: &Limits, what: &str) -> Result<(), CodeError> {
    if needed > limits.enumeration_cap as u128 {
        return Err(CodeError::SizeLimitExceeded {
            what: what.to_string(),
            needed,
            limit: limits.enumeration_cap as u128,
        });
    }
    Ok(())
}

/// All `2^(k-1)` even-weight words of length `k` in lexicographic order.
pub fn even_weight_code(k: usize, limits: &Limits) -> Result<BinaryCode, CodeError> {
    if k < 2 {
        return Err(CodeError::InvalidParameter(format!("even-weight code needs k >= 2, got {k}")));
    }
    if k > 63 {
        return Err(CodeError::SizeLimitExceeded {
            what: "even-weight code".into(),
            needed: 1u128 << (k - 1).min(127),
            limit: limits.enumeration_cap as u128,
        });
    }
    check_enumeration(1u128 << (k - 1), limits, "even-weight code")?;
    let words = (0u64..1 << k)
        .filter(|v| v.count_ones() % 2 == 0)
        .map(|v| Word::from_u64(v, k))
        .collect();
    Ok(BinaryCode::from_trusted(k, words, "even-weight", Some(2)))
}

/// Words of length `k` (as integers, leftmost bit most significant) kept by the
/// lexicographic greedy scan at distance `d`, stopping once `stop_at` words
/// are kept.
fn lexicode_scan(k: usize, d: usize, stop_at: usize) -> Vec<u64> {
    let mut kept: Vec<u64> = Vec::new();
    for w in 0u64..1 << k {
        if kept.len() >= stop_at {
            break;
        }
        if kept.iter().all(|&c| (c ^ w).count_ones() as usize >= d) {
            kept.push(w);
        }
    }
    kept
}

/// Greedy lexicographic code: scan all `k`-bit words in order, keeping a word
/// iff it is at distance `≥ d` from everything kept so far, until `target`
/// words are kept.
pub fn greedy_gv_code(k: usize, d: usize, target: usize, limits: &Limits) -> Result<BinaryCode, CodeError> {
    if k == 0 || d == 0 || d > k || target == 0 {
        return Err(CodeError::InvalidParameter(format!(
            "greedy code needs k >= 1, 1 <= d <= k, target >= 1 (k={k}, d={d}, target={target})"
        )));
    }
    if k > 63 {
        return Err(CodeError::SizeLimitExceeded {
            what: "greedy scan".into(),
            needed: 1u128 << k.min(127),
            limit: limits.enumeration_cap as u128,
        });
    }
    check_enumeration(1u128 << k, limits, "greedy scan")?;
    let kept = lexicode_scan(k, d, target);
    if kept.len() < target {
        return Err(CodeError::TargetUnreached {
            achieved: kept.len(),
            target,
        });
    }
    let words: Vec<Word> = kept.into_iter().map(|v| Word::from_u64(v, k)).collect();
    let mut code = BinaryCode::from_trusted(k, words, "greedy-gv", None);
    if code.len() >= 2 {
        // Only cache when the exhaustive check is within budget.
        let _ = code.min_distance(limits);
    }
    Ok(code)
}

/// Primitive polynomials over GF(2), indexed by degree. Bit `i` is the
/// coefficient of `x^i`, including the leading term.
pub const PRIMITIVE_POLYNOMIALS: [(u32, u32); 15] = [
    (2, 0x7),      // x^2 + x + 1
    (3, 0xB),      // x^3 + x + 1
    (4, 0x13),     // x^4 + x + 1
    (5, 0x25),     // x^5 + x^2 + 1
    (6, 0x43),     // x^6 + x + 1
    (7, 0x89),     // x^7 + x^3 + 1
    (8, 0x11D),    // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0x211),    // x^9 + x^4 + 1
    (10, 0x409),   // x^10 + x^3 + 1
    (11, 0x805),   // x^11 + x^2 + 1
    (12, 0x1053),  // x^12 + x^6 + x^4 + x + 1
    (13, 0x201B),  // x^13 + x^4 + x^3 + x + 1
    (14, 0x4443),  // x^14 + x^10 + x^6 + x + 1
    (15, 0x8003),  // x^15 + x + 1
    (16, 0x1100B), // x^16 + x^12 + x^3 + x + 1
];

/// GF(2^m) as polynomials modulo a primitive polynomial, with exp/log tables.
#[derive(Debug, Clone)]
pub struct FieldContext {
    m: u32,
    modulus: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl FieldContext {
    /// Field for degree `m` from the built-in table. Fails if the table has no
    /// entry or the tabled modulus is not primitive.
    pub fn new(m: u32) -> Result<Self, CodeError> {
        let modulus = PRIMITIVE_POLYNOMIALS
            .iter()
            .find(|(deg, _)| *deg == m)
            .map(|&(_, poly)| poly)
            .ok_or_else(|| CodeError::Field(format!("no primitive polynomial tabled for m = {m}")))?;
        FieldContext::with_modulus(m, modulus)
    }

    /// Field for an explicit modulus; verifies that `x` has multiplicative
    /// order exactly `2^m - 1`.
    pub fn with_modulus(m: u32, modulus: u32) -> Result<Self, CodeError> {
        if !(1..=16).contains(&m) || modulus >> m != 1 {
            return Err(CodeError::Field(format!("modulus {modulus:#x} is not of degree {m}")));
        }
        let order = (1usize << m) - 1;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; order + 1];
        let mut x = 1u32;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(CodeError::Field(format!(
                    "modulus {modulus:#x} is not primitive: x has order {i}"
                )));
            }
            exp.push(x);
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return Err(CodeError::Field(format!("modulus {modulus:#x} is not irreducible")));
        }
        Ok(FieldContext { m, modulus, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.exp.len()
    }

    /// `α^i` where `α` is the class of `x`.
    pub fn alpha_pow(&self, i: usize) -> u32 {
        self.exp[i % self.exp.len()]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[s % self.exp.len()]
    }

    /// Minimal polynomial of `α^i` over GF(2), as a coefficient bitmask.
    pub fn minimal_polynomial(&self, i: usize) -> u32 {
        let coset = cyclotomic_coset(i, self.order());
        // Product of (x + α^c), coefficients in GF(2^m), lowest degree first.
        let mut poly: Vec<u32> = vec![1];
        for c in coset {
            let root = self.alpha_pow(c);
            let mut next = vec![0u32; poly.len() + 1];
            for (deg, &coef) in poly.iter().enumerate() {
                next[deg + 1] ^= coef;
                next[deg] ^= self.mul(coef, root);
            }
            poly = next;
        }
        poly.iter().enumerate().fold(0u32, |acc, (deg, &coef)| {
            assert!(coef <= 1, "minimal polynomial has a non-binary coefficient");
            acc | coef << deg
        })
    }
}

/// `{i·2^j mod order}` in generation order.
fn cyclotomic_coset(i: usize, order: usize) -> Vec<usize> {
    let start = i % order;
    let mut coset = vec![start];
    let mut c = start * 2 % order;
    while c != start {
        coset.push(c);
        c = c * 2 % order;
    }
    coset
}

/// Degree of the narrow-sense BCH generator with roots `α^1..α^(2d-2)`,
/// from cyclotomic coset sizes alone.
fn bch_generator_degree(m: u32, d: usize) -> usize {
    let order = (1usize << m) - 1;
    let mut covered = vec![false; order];
    let mut degree = 0;
    for i in 1..=2 * d - 2 {
        if !covered[i % order] {
            for c in cyclotomic_coset(i, order) {
                covered[c] = true;
                degree += 1;
            }
        }
    }
    degree
}

fn validate_bch(m: u32, d: usize) -> Result<(), CodeError> {
    if !(2..=16).contains(&m) {
        return Err(CodeError::InvalidParameter(format!("BCH needs 2 <= m <= 16, got {m}")));
    }
    if d < 2 || 2 * d - 1 > (1usize << m) - 1 {
        return Err(CodeError::InvalidParameter(format!(
            "BCH needs d >= 2 and 2d-1 <= 2^m-1 (m={m}, d={d})"
        )));
    }
    Ok(())
}

/// Dimension of the parity-extended BCH code `bch_extended_code(m, d)`.
pub fn bch_extended_dimension(m: u32, d: usize) -> Result<usize, CodeError> {
    validate_bch(m, d)?;
    Ok((1usize << m) - 1 - bch_generator_degree(m, d))
}

/// Narrow-sense primitive BCH code of length `2^m - 1` and designed distance
/// `2d - 1`, extended by an overall parity bit to length `2^m` and minimum
/// distance at least `2d`.
#[derive(Debug, Clone)]
pub struct BchCode {
    m: u32,
    d: usize,
    field: FieldContext,
    /// Generator coefficients over GF(2), lowest degree first.
    generator: Vec<bool>,
    dimension: usize,
}

impl BchCode {
    pub fn new(m: u32, d: usize) -> Result<Self, CodeError> {
        validate_bch(m, d)?;
        let field = FieldContext::new(m)?;
        let order = field.order();
        let mut covered = vec![false; order];
        let mut generator = vec![true];
        for i in 1..=2 * d - 2 {
            if covered[i % order] {
                continue;
            }
            for c in cyclotomic_coset(i, order) {
                covered[c] = true;
            }
            let minpoly = field.minimal_polynomial(i);
            let deg = 31 - minpoly.leading_zeros() as usize;
            let mut next = vec![false; generator.len() + deg];
            for (a, &ga) in generator.iter().enumerate() {
                if ga {
                    for b in 0..=deg {
                        if minpoly >> b & 1 == 1 {
                            next[a + b] ^= true;
                        }
                    }
                }
            }
            generator = next;
        }
        let dimension = order - (generator.len() - 1);
        Ok(BchCode {
            m,
            d,
            field,
            generator,
            dimension,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Extended length `2^m`.
    pub fn length(&self) -> usize {
        1 << self.m
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Guaranteed minimum distance `2d` of the extended code.
    pub fn guaranteed_distance(&self) -> usize {
        2 * self.d
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    /// Generator polynomial coefficients, lowest degree first.
    pub fn generator(&self) -> &[bool] {
        &self.generator
    }

    /// Row `i` of the generator matrix: `x^i·g(x)` followed by its parity bit.
    fn basis_row(&self, i: usize) -> Word {
        let mut w = Word::zeros(self.length());
        let mut parity = false;
        for (deg, &c) in self.generator.iter().enumerate() {
            if c {
                w.flip(i + deg);
                parity = !parity;
            }
        }
        w.set(self.length() - 1, parity);
        w
    }

    pub fn basis(&self) -> Vec<Word> {
        (0..self.dimension).map(|i| self.basis_row(i)).collect()
    }

    /// Codeword for message index `index`: bit `t` of the index selects
    /// generator row `t`.
    pub fn codeword(&self, index: u128) -> Word {
        let mut w = Word::zeros(self.length());
        for t in 0..self.dimension.min(128) {
            if index >> t & 1 == 1 {
                w.xor_assign(&self.basis_row(t));
            }
        }
        w
    }

    /// Number of codewords, saturating at `u128::MAX`.
    pub fn codeword_count(&self) -> u128 {
        if self.dimension >= 128 {
            u128::MAX
        } else {
            1u128 << self.dimension
        }
    }

    /// The first `count` codewords in message order, without enumerating the
    /// whole code.
    pub fn first_codewords(&self, count: usize) -> Result<Vec<Word>, CodeError> {
        if count as u128 > self.codeword_count() {
            return Err(CodeError::InvalidParameter(format!(
                "code has {} codewords, {count} requested",
                self.codeword_count()
            )));
        }
        let rows: Vec<Word> = (0..self.dimension.min(64)).map(|i| self.basis_row(i)).collect();
        Ok(message_order_words(&rows, count, self.length()))
    }

    /// Every codeword in message order, with the exact minimum distance
    /// (minimum nonzero weight) cached.
    pub fn enumerate(&self, limits: &Limits) -> Result<BinaryCode, CodeError> {
        let total = self.codeword_count();
        if total > limits.enumeration_cap as u128 {
            return Err(CodeError::CapExceeded {
                needed: total,
                cap: limits.enumeration_cap as u128,
            });
        }
        let rows = self.basis();
        let words = message_order_words(&rows, total as usize, self.length());
        let min_weight = words.iter().skip(1).map(Word::weight).min();
        Ok(BinaryCode::from_trusted(
            self.length(),
            words,
            "extended-bch",
            min_weight,
        ))
    }
}

/// `word[i] = word[i with lowest set bit cleared] ^ rows[lowest set bit]`.
fn message_order_words(rows: &[Word], count: usize, length: usize) -> Vec<Word> {
    let mut words: Vec<Word> = Vec::with_capacity(count);
    for idx in 0..count {
        if idx == 0 {
            words.push(Word::zeros(length));
        } else {
            let mut w = words[idx & (idx - 1)].clone();
            w.xor_assign(&rows[idx.trailing_zeros() as usize]);
            words.push(w);
        }
    }
    words
}

/// All codewords of the parity-extended BCH code with the exact minimum
/// distance cached. Fails with `CapExceeded` above the enumeration cap; use
/// [`BchCode::first_codewords`] to take a prefix instead.
pub fn bch_extended_code(m: u32, d: usize, limits: &Limits) -> Result<BinaryCode, CodeError> {
    BchCode::new(m, d)?.enumerate(limits)
}

/// Sylvester–Hadamard matrix of order `2^m`: `[[1,1],[1,-1]]` tensored `m`
/// times. Row 0 is all ones.
pub fn sylvester_matrix(m: u32, limits: &Limits) -> Result<Vec<Vec<i8>>, CodeError> {
    if m == 0 {
        return Err(CodeError::InvalidParameter("Sylvester matrix needs m >= 1".into()));
    }
    if m > limits.hadamard_max_m {
        return Err(CodeError::SizeLimitExceeded {
            what: "Sylvester matrix order exponent".into(),
            needed: m as u128,
            limit: limits.hadamard_max_m as u128,
        });
    }
    let mut h: Vec<Vec<i8>> = vec![vec![1]];
    for _ in 0..m {
        let size = h.len();
        let mut next = vec![vec![0i8; 2 * size]; 2 * size];
        for i in 0..size {
            for j in 0..size {
                let v = h[i][j];
                next[i][j] = v;
                next[i][j + size] = v;
                next[i + size][j] = v;
                next[i + size][j + size] = -v;
            }
        }
        h = next;
    }
    Ok(h)
}

/// Outcome of [`k_best`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KChoice {
    pub k: usize,
    pub method: String,
}

/// Shortest length at which one of the implemented families yields at least
/// `n` words at distance `≥ lambda`. An upper bound on the true optimum.
///
/// Families are tried in the order full space (`lambda = 1`), even-weight
/// (`lambda ≤ 2`), extended BCH, then the greedy scan at lengths strictly
/// shorter than the best so far; ties keep the earlier family.
pub fn k_best(n: u64, lambda: usize, limits: &Limits) -> Result<KChoice, CodeError> {
    if n < 2 || lambda == 0 {
        return Err(CodeError::InvalidParameter(format!(
            "k_best needs n >= 2 and lambda >= 1 (n={n}, lambda={lambda})"
        )));
    }
    let log_n = ceil_log2(n) as usize;
    let mut best: Option<KChoice> = None;
    let offer = |k: usize, method: &str, best: &mut Option<KChoice>| {
        if best.as_ref().is_none_or(|b| k < b.k) {
            *best = Some(KChoice {
                k,
                method: method.to_string(),
            });
        }
    };
    if lambda == 1 {
        offer(log_n, "full-space", &mut best);
    }
    if lambda <= 2 {
        offer(log_n + 1, "even-weight", &mut best);
    }
    let d = lambda.div_ceil(2).max(2);
    for m in 2..=16u32 {
        if let Ok(dim) = bch_extended_dimension(m, d) {
            if dim >= 64 || 1u64 << dim >= n {
                offer(1 << m, "extended-bch", &mut best);
                break;
            }
        }
    }
    let upper = best.as_ref().map_or(usize::MAX, |b| b.k);
    let mut k = log_n.max(lambda);
    while k < upper && k <= 63 && (1u128 << k) <= limits.enumeration_cap as u128 {
        if lexicode_scan(k, lambda, n as usize).len() as u64 >= n {
            offer(k, "greedy-gv", &mut best);
            break;
        }
        k += 1;
    }
    best.ok_or(CodeError::NoConstruction { n, lambda })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    k: usize,
    words: Vec<String>,
    min_distance: Option<usize>,
    method: String,
}

/// `{"k": <int>, "words": ["0101...", ...], "min_distance": <int|null>, "method": <string>}`.
pub fn serialize_code(code: &BinaryCode) -> String {
    let file = CodeFile {
        k: code.length,
        words: code.words.iter().map(Word::to_string).collect(),
        min_distance: code.min_distance,
        method: code.method.clone(),
    };
    serde_json::to_string(&file).expect("code serialization is infallible")
}

/// Parses the code JSON format. A stored `min_distance` is re-verified
/// when the pair check is within `limits`.
pub fn parse_code(text: &str, limits: &Limits) -> Result<BinaryCode, CodeError> {
    let file: CodeFile = serde_json::from_str(text).map_err(|e| CodeError::Parse(e.to_string()))?;
    let words = file
        .words
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<Word>, _>>()?;
    let mut code = BinaryCode::new(file.k, words, file.method)?;
    if let Some(claimed) = file.min_distance {
        match exact_min_distance(&code.words, limits) {
            Ok(actual) if actual != claimed => {
                return Err(CodeError::Parse(format!(
                    "stored min_distance {claimed} but exact value is {actual}"
                )))
            }
            Ok(actual) => code.min_distance = Some(actual),
            Err(_) => {}
        }
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(code: &BinaryCode) -> Vec<String> {
        code.words().iter().map(Word::to_string).collect()
    }

    /// Lexicographic greedy code over 0/1 strings, written independently of
    /// the integer scan.
    fn string_lexicode(k: usize, d: usize) -> Vec<String> {
        let mut kept: Vec<String> = Vec::new();
        for v in 0..1u32 << k {
            let s: String = (0..k)
                .map(|i| if v >> (k - 1 - i) & 1 == 1 { '1' } else { '0' })
                .collect();
            let far = kept
                .iter()
                .all(|c| c.chars().zip(s.chars()).filter(|(a, b)| a != b).count() >= d);
            if far {
                kept.push(s);
            }
        }
        kept
    }

    #[test]
    fn word_text_and_order() {
        let a: Word = "0011".parse().unwrap();
        let b: Word = "0101".parse().unwrap();
        assert!(a < b);
        assert_eq!(a.distance(&b), 2);
        assert_eq!(Word::from_u64(5, 4).to_string(), "0101");
        let long: Word = format!("1{}1", "0".repeat(98)).parse().unwrap();
        assert_eq!(long.weight(), 2);
        assert!(long.bit(99));
        assert!("01x".parse::<Word>().is_err());
    }

    #[test]
    fn even_weight_examples() {
        let limits = Limits::default();
        let c3 = even_weight_code(3, &limits).unwrap();
        assert_eq!(strings(&c3), vec!["000", "011", "101", "110"]);
        assert_eq!(c3.cached_min_distance(), Some(2));
        assert_eq!(strings(&even_weight_code(2, &limits).unwrap()), vec!["00", "11"]);
        let c4 = even_weight_code(4, &limits).unwrap();
        assert_eq!(c4.len(), 8);
        assert_eq!(exact_min_distance(c4.words(), &limits).unwrap(), 2);
        assert!(even_weight_code(1, &limits).is_err());
        let tight = Limits {
            enumeration_cap: 4,
            ..Limits::default()
        };
        assert!(matches!(
            even_weight_code(4, &tight),
            Err(CodeError::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn greedy_examples() {
        let limits = Limits::default();
        let c = greedy_gv_code(5, 3, 2, &limits).unwrap();
        assert_eq!(strings(&c), vec!["00000", "00111"]);
        let all = greedy_gv_code(4, 1, 16, &limits).unwrap();
        assert_eq!(all.len(), 16);
        // The full scan at (5, 3) keeps exactly the string-oracle lexicode.
        let oracle = string_lexicode(5, 3);
        assert_eq!(oracle.len(), 4);
        assert_eq!(
            greedy_gv_code(5, 3, 32, &limits),
            Err(CodeError::TargetUnreached {
                achieved: oracle.len(),
                target: 32
            })
        );
        assert_eq!(strings(&greedy_gv_code(5, 3, 4, &limits).unwrap()), oracle);
    }

    #[test]
    fn greedy_matches_string_oracle() {
        let limits = Limits::default();
        for k in 1..=8 {
            for d in 1..=k {
                let oracle = string_lexicode(k, d);
                let code = greedy_gv_code(k, d, oracle.len(), &limits).unwrap();
                assert_eq!(strings(&code), oracle, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn field_tables_are_primitive() {
        for &(m, _) in PRIMITIVE_POLYNOMIALS.iter() {
            let f = FieldContext::new(m).unwrap();
            assert_eq!(f.order(), (1 << m) - 1);
        }
        assert!(FieldContext::new(17).is_err());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
        assert!(FieldContext::with_modulus(4, 0x1F).is_err());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 is reducible.
        assert!(FieldContext::with_modulus(4, 0x15).is_err());
    }

    #[test]
    fn minimal_polynomials_in_gf16() {
        let f = FieldContext::new(4).unwrap();
        assert_eq!(f.minimal_polynomial(1), 0x13);
        // α^3 in GF(16) with x^4+x+1 has minimal polynomial x^4+x^3+x^2+x+1.
        assert_eq!(f.minimal_polynomial(3), 0x1F);
        assert_eq!(f.minimal_polynomial(5), 0x7);
    }

    #[test]
    fn bch_examples() {
        let limits = Limits::default();
        let c = bch_extended_code(4, 2, &limits).unwrap();
        assert_eq!((c.length(), c.len()), (16, 2048));
        assert_eq!(c.cached_min_distance(), Some(4));
        assert_eq!(exact_min_distance(c.words(), &limits).unwrap(), 4);

        let c = bch_extended_code(3, 2, &limits).unwrap();
        assert_eq!((c.length(), c.len()), (8, 16));
        assert_eq!(exact_min_distance(c.words(), &limits).unwrap(), 4);

        let c = bch_extended_code(4, 3, &limits).unwrap();
        assert_eq!((c.length(), c.len()), (16, 128));
        assert!(c.len() as u64 >= (1 << 16) / (2 * 16 * 16));
        assert_eq!(exact_min_distance(c.words(), &limits).unwrap(), 6);
        assert!(c.words().iter().all(|w| w.weight() % 2 == 0));
    }

    #[test]
    fn bch_parameter_errors() {
        let limits = Limits::default();
        assert!(matches!(bch_extended_code(1, 2, &limits), Err(CodeError::InvalidParameter(_))));
        assert!(matches!(bch_extended_code(3, 5, &limits), Err(CodeError::InvalidParameter(_))));
        assert!(matches!(bch_extended_code(6, 2, &limits), Err(CodeError::CapExceeded { .. })));
    }

    #[test]
    fn bch_prefix_matches_enumeration() {
        let limits = Limits::default();
        let code = BchCode::new(4, 3).unwrap();
        let all = code.enumerate(&limits).unwrap();
        assert_eq!(code.first_codewords(40).unwrap(), all.words()[..40].to_vec());
        assert_eq!(code.codeword(77), all.words()[77]);
        // Large code, prefix only.
        let big = BchCode::new(6, 2).unwrap();
        assert_eq!(big.dimension(), 57);
        let prefix = big.first_codewords(300).unwrap();
        assert!(exact_min_distance(&prefix, &limits).unwrap() >= 4);
    }

    #[test]
    fn bch_dimension_bound() {
        for m in 2..=10u32 {
            for d in 2..=4usize {
                if let Ok(dim) = bch_extended_dimension(m, d) {
                    assert!(dim + 1 + (d - 1) * m as usize >= 1 << m, "m={m} d={d}");
                    assert_eq!(dim, BchCode::new(m, d).unwrap().dimension());
                }
            }
        }
    }

    #[test]
    fn sylvester_examples() {
        let limits = Limits::default();
        assert_eq!(sylvester_matrix(1, &limits).unwrap(), vec![vec![1, 1], vec![1, -1]]);
        let h = sylvester_matrix(2, &limits).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let dot: i32 = (0..4).map(|t| (h[i][t] * h[j][t]) as i32).sum();
                assert_eq!(dot, if i == j { 4 } else { 0 });
            }
        }
        let h = sylvester_matrix(3, &limits).unwrap();
        for a in 0..8 {
            for b in a + 1..8 {
                let agree = (0..8).filter(|&r| h[r][a] == h[r][b]).count();
                assert_eq!(agree, 4);
            }
        }
        assert!(sylvester_matrix(0, &limits).is_err());
        assert!(matches!(sylvester_matrix(13, &limits), Err(CodeError::SizeLimitExceeded { .. })));
    }

    #[test]
    fn k_best_examples() {
        let limits = Limits::default();
        assert_eq!(
            k_best(4, 2, &limits).unwrap(),
            KChoice { k: 3, method: "even-weight".into() }
        );
        assert_eq!(k_best(2, 1, &limits).unwrap().k, 1);
        assert_eq!(
            k_best(2048, 4, &limits).unwrap(),
            KChoice { k: 16, method: "extended-bch".into() }
        );
        assert_eq!(k_best(2, 5, &limits).unwrap().k, 5);
        assert!(k_best(1, 1, &limits).is_err());
    }

    #[test]
    fn code_json_round_trip() {
        let limits = Limits::default();
        let mut code = greedy_gv_code(6, 3, 8, &limits).unwrap();
        code.min_distance(&limits).unwrap();
        let text = serialize_code(&code);
        assert_eq!(parse_code(&text, &limits).unwrap(), code);
        let bad = r#"{"k":2,"words":["00","11"],"min_distance":1,"method":"x"}"#;
        assert!(parse_code(bad, &limits).is_err());
        let dup = r#"{"k":2,"words":["00","00"],"min_distance":null,"method":"x"}"#;
        assert!(matches!(parse_code(dup, &limits), Err(CodeError::InvalidWords { .. })));
    }
}
