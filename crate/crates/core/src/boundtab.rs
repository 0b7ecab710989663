//! Closed-form lower and upper bounds on the capacity of bipartite coverings.
//!
//! All logarithms are base 2. Real-valued bounds are `f64`; callers comparing
//! them against integer capacities should allow [`FLOAT_GUARD`].

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codeforge::bch_extended_dimension;
use crate::config::Limits;
use crate::graphlib::{alpha_per_vertex, Graph, GraphError};
use crate::ceil_log2;

/// Absolute tolerance used when a float bound is compared with an integer.
pub const FLOAT_GUARD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    /// A precondition on the inputs failed; the message names the inequality.
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn domain<T>(msg: String) -> Result<T, BoundError> {
    Err(BoundError::Domain(msg))
}

/// `⌊(λ - 1) / 2⌋`.
pub fn half_floor(lambda: usize) -> usize {
    lambda.saturating_sub(1) / 2
}

/// `2λ(n - 1)`, the edge-counting lower bound.
pub fn edge_count_lower(n: usize, lambda: usize) -> f64 {
    2.0 * lambda as f64 * (n as f64 - 1.0)
}

/// `n · [log n + r · log(2 log n / (λ - 1))]` with `r = ⌊(λ-1)/2⌋`; the
/// `r`-term is taken as 0 when `r = 0`.
pub fn entropy_term_lower(n: usize, lambda: usize) -> f64 {
    let nf = n as f64;
    let log_n = nf.log2();
    let r = half_floor(lambda);
    let extra = if r == 0 {
        0.0
    } else {
        r as f64 * (2.0 * log_n / (lambda as f64 - 1.0)).log2()
    };
    nf * (log_n + extra)
}

/// Lower bound on `cap(n, λ)`: the larger of [`edge_count_lower`] and
/// [`entropy_term_lower`].
pub fn thm11_lower(n: usize, lambda: usize) -> f64 {
    edge_count_lower(n, lambda).max(entropy_term_lower(n, lambda))
}

/// `n log n`.
pub fn hansel_lower(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (n as f64).log2()
    }
}

/// `Σ_i log(n / (n - d_i))`.
pub fn ks_lower(g: &Graph) -> f64 {
    let n = g.n() as f64;
    g.degrees().iter().map(|&d| (n / (n - d as f64)).log2()).sum()
}

/// `Σ_i log(n / α_i)` with exact `α_i`.
pub fn alpha_lower(g: &Graph, limits: &Limits) -> Result<f64, BoundError> {
    let alpha = alpha_per_vertex(g, limits)?;
    Ok(alpha_lower_from(g.n(), alpha.values()))
}

/// `Σ_i log(n / α_i)` for precomputed `α_i`.
pub fn alpha_lower_from(n: usize, alpha: &[usize]) -> f64 {
    let nf = n as f64;
    alpha.iter().map(|&a| (nf / a as f64).log2()).sum()
}

/// `n(⌈log n⌉ + 1)`: capacity of the even-weight code construction for `λ = 2`.
pub fn upper_item1(n: usize) -> Result<f64, BoundError> {
    if n < 2 {
        return domain(format!("n >= 2 required, got {n}"));
    }
    Ok(n as f64 * (ceil_log2(n as u64) as f64 + 1.0))
}

/// `n[log n + (λ-1)(log(log n / (λ-1)) + 4)]` for `2 ≤ λ ≤ 0.5 log n`.
pub fn upper_item2(n: usize, lambda: usize) -> Result<f64, BoundError> {
    if n < 2 {
        return domain(format!("n >= 2 required, got {n}"));
    }
    let log_n = (n as f64).log2();
    if lambda < 2 {
        return domain(format!("lambda >= 2 required, got {lambda}"));
    }
    if lambda as f64 > 0.5 * log_n {
        return domain(format!("lambda <= 0.5 log n fails: {lambda} > {:.6}", 0.5 * log_n));
    }
    let lm1 = lambda as f64 - 1.0;
    Ok(n as f64 * (log_n + lm1 * ((log_n / lm1).log2() + 4.0)))
}

/// `λ n / c` for `0 < c < 1/2` and `λ ≥ c log n / (1 - H(c))`.
pub fn upper_item3(n: usize, lambda: usize, c: f64) -> Result<f64, BoundError> {
    if n < 2 {
        return domain(format!("n >= 2 required, got {n}"));
    }
    if !(c > 0.0 && c < 0.5) {
        return domain(format!("0 < c < 1/2 required, got {c}"));
    }
    let threshold = item3_threshold(n, c)?;
    if (lambda as f64) < threshold {
        return domain(format!(
            "lambda >= c log n / (1 - H(c)) fails: {lambda} < {threshold:.6}"
        ));
    }
    Ok(lambda as f64 / c * n as f64)
}

/// `c log n / (1 - H(c))`, the smallest `λ` item 3 accepts for this `c`.
pub fn item3_threshold(n: usize, c: f64) -> Result<f64, BoundError> {
    Ok(c * (n as f64).log2() / (1.0 - entropy(c)?))
}

/// Largest `c` in `(0, 1/2)` for which item 3 applies to `(n, λ)`, found by
/// bisection (the threshold is increasing in `c`). `None` if even tiny `c`
/// fails, which happens only for `λ = 0`.
pub fn item3_best_c(n: usize, lambda: usize) -> Option<f64> {
    let ok = |c: f64| item3_threshold(n, c).is_ok_and(|t| lambda as f64 >= t);
    let (mut lo, mut hi) = (1e-12, 0.5 - 1e-12);
    if !ok(lo) {
        return None;
    }
    if ok(hi) {
        return Some(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// `n[log n + ⌊(λ-1)/2⌋ log log n + 2]`.
pub fn upper_item4(n: usize, lambda: usize) -> Result<f64, BoundError> {
    if n < 2 {
        return domain(format!("n >= 2 required, got {n}"));
    }
    let log_n = (n as f64).log2();
    Ok(n as f64 * (log_n + half_floor(lambda) as f64 * log_n.log2() + 2.0))
}

/// Whether `n` is exactly the size of a parity-extended BCH code with
/// `2d ≥ λ`, `d - 1 = ⌊(λ-1)/2⌋` (for `d = 1`, the even-weight code of
/// length `2^m`). Returns the matching `m`.
pub fn item4_construction_m(n: u64, lambda: usize) -> Option<u32> {
    let d = half_floor(lambda) + 1;
    (2..=16u32).find(|&m| {
        let dim = if d == 1 {
            Some((1usize << m) - 1)
        } else {
            bch_extended_dimension(m, d).ok()
        };
        dim.is_some_and(|k| k < 64 && 1u64 << k == n)
    })
}

/// `⌈2^k / Σ_{i<d} C(k, i)⌉`, exactly.
pub fn gv_count(k: u32, d: u32) -> BigUint {
    assert!(d >= 1 && d <= k, "gv_count needs 1 <= d <= k");
    let mut ball = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..d {
        ball += &term;
        term = term * (k - i) / (i + 1);
    }
    let space = BigUint::one() << k;
    let (q, r) = space.div_rem(&ball);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `Σ_{q ≤ r} C(x, q) / 2^x`, the probability that `Bin(x, 1/2) ≤ r`.
pub fn binom_tail_p(x: u32, r: u32) -> BigRational {
    assert!(r <= x, "binom_tail_p needs r <= x");
    BigRational::new(binom_tail_count(x, r).into(), (BigUint::one() << x).into())
}

/// `Σ_{q ≤ r} C(x, q)`.
pub fn binom_tail_count(x: u32, r: u32) -> BigUint {
    let mut sum = BigUint::zero();
    let mut term = BigUint::one();
    for q in 0..=r.min(x) {
        sum += &term;
        term = term * (x - q) / (q + 1);
    }
    sum
}

/// Binary entropy `-x log x - (1-x) log(1-x)` on the open interval `(0, 1)`.
pub fn entropy(x: f64) -> Result<f64, BoundError> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("entropy needs 0 < x < 1, got {x}"));
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub side: Side,
    /// `None` when the bound's preconditions fail; the reason is in `flags`.
    pub value: Option<f64>,
    pub inputs: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Complete { n: usize, lambda: usize },
    Graph { id: String, n: usize, edges: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance: Instance,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|e| e.value)
    }

    /// Largest available lower bound.
    pub fn best_lower(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| e.side == Side::Lower)
            .filter_map(|e| e.value)
            .reduce(f64::max)
    }
}

fn entry(name: &str, side: Side, result: Result<f64, BoundError>, inputs: &[(&str, f64)]) -> BoundEntry {
    let (value, flags) = match result {
        Ok(v) => (Some(v), Vec::new()),
        Err(e) => (None, vec![e.to_string()]),
    };
    BoundEntry {
        name: name.to_string(),
        side,
        value,
        inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        flags,
    }
}

/// Every bound for `K_n^λ`. Item 3 uses `c` when given, otherwise the largest
/// admissible `c` (flagged `c-optimized`).
pub fn complete_report(n: usize, lambda: usize, c: Option<f64>) -> BoundReport {
    let nl = [("n", n as f64), ("lambda", lambda as f64)];
    let r = half_floor(lambda);
    let mut entries = vec![
        entry("edge_count", Side::Lower, Ok(edge_count_lower(n, lambda)), &nl),
        entry("hansel", Side::Lower, Ok(hansel_lower(n)), &nl[..1]),
    ];
    let mut thm11 = entry(
        "thm11",
        Side::Lower,
        Ok(thm11_lower(n, lambda)),
        &[("n", n as f64), ("lambda", lambda as f64), ("r", r as f64)],
    );
    if r == 0 {
        thm11.flags.push("r=0: logarithmic correction taken as 0".into());
    }
    entries.push(thm11);

    let mut item1 = entry("upper_item1", Side::Upper, upper_item1(n), &nl[..1]);
    if lambda > 2 {
        item1.value = None;
        item1.flags.push(format!("applies to lambda <= 2, got {lambda}"));
    }
    entries.push(item1);
    entries.push(entry("upper_item2", Side::Upper, upper_item2(n, lambda), &nl));

    let (c_used, optimized) = match c {
        Some(c) => (Some(c), false),
        None => (item3_best_c(n, lambda), true),
    };
    let mut item3 = match c_used {
        Some(c) => entry(
            "upper_item3",
            Side::Upper,
            upper_item3(n, lambda, c),
            &[("n", n as f64), ("lambda", lambda as f64), ("c", c)],
        ),
        None => entry(
            "upper_item3",
            Side::Upper,
            domain("no c in (0, 1/2) satisfies the precondition".into()),
            &nl,
        ),
    };
    if optimized && c_used.is_some() {
        item3.flags.push("c-optimized".into());
    }
    entries.push(item3);

    let mut item4 = entry("upper_item4", Side::Upper, upper_item4(n, lambda), &nl);
    if item4.value.is_some() {
        match item4_construction_m(n as u64, lambda) {
            Some(m) => {
                item4.flags.push("construction-backed".into());
                item4.inputs.insert("m".into(), m as f64);
            }
            None => item4.flags.push("formula-only".into()),
        }
    }
    entries.push(item4);

    BoundReport {
        instance: Instance::Complete { n, lambda },
        entries,
    }
}

/// Degree and independence bounds for a graph covering.
pub fn graph_report(g: &Graph, id: &str, limits: &Limits) -> BoundReport {
    let n = [("n", g.n() as f64)];
    let entries = vec![
        entry("katona_szemeredi", Side::Lower, Ok(ks_lower(g)), &n),
        entry("alpha", Side::Lower, alpha_lower(g, limits), &n),
    ];
    BoundReport {
        instance: Instance::Graph {
            id: id.to_string(),
            n: g.n(),
            edges: g.edge_count(),
        },
        entries,
    }
}
