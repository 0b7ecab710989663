//! Executable checks of the counting arguments behind the capacity lower
//! bounds.
//!
//! For a covering with blocks `H_1..H_m` and a binary vector `v` of length
//! `m`, vertex `j` has `c_j(v) = #{i ∈ A_j : v_i = 1} + #{i ∈ B_j : v_i = 0}`,
//! where `A_j` (`B_j`) holds the blocks with `j` on the left (right). The
//! event `E_j` is `c_j(v) ≤ r`. With `r = ⌊(λ-1)/2⌋` on a covering of
//! `K_n^λ` these events are pairwise disjoint; with `r = 0` on a covering of a
//! graph, the set of occurring events is independent in the graph.
//!
//! Probabilities are exact rationals throughout.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::boundtab::{binom_tail_count, binom_tail_p, half_floor};
use crate::config::Limits;
use crate::coverkit::{incidence_counts, verify, CoverError, Covering, Target};
use crate::graphlib::{AlphaVector, Graph};

/// Tolerance on the floating-point left side of the `(x/r)^r 2^-x` sum.
pub const EQ1_TOLERANCE: f64 = 1e-9;

/// Most violations listed in a report; the count is always exact.
pub const MAX_LISTED_VIOLATIONS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("covering is not valid for the target: {0}")]
    InvalidCovering(String),
    #[error("exhaustive sweep over 2^{blocks} vectors exceeds the limit of 2^{limit}")]
    SizeLimitExceeded { blocks: usize, limit: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// How the binary vectors `v` are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub mode: String,
    pub ok: bool,
    /// Exact sum as `"p/q"`, when the check has one.
    pub sum: Option<String>,
    /// Floating-point value the check compares, when it has one.
    pub value: Option<f64>,
    pub violations: Vec<serde_json::Value>,
    pub violation_count: u64,
    pub trials: u64,
    #[serde(skip)]
    pub exact_sum: Option<BigRational>,
}

impl CheckReport {
    fn new(check: &str, mode: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            mode: mode.to_string(),
            ok: true,
            sum: None,
            value: None,
            violations: Vec::new(),
            violation_count: 0,
            trials: 0,
            exact_sum: None,
        }
    }

    fn with_sum(mut self, sum: BigRational) -> Self {
        self.sum = Some(format!("{}/{}", sum.numer(), sum.denom()));
        self.exact_sum = Some(sum);
        self
    }

    fn violation(&mut self, v: serde_json::Value) {
        self.ok = false;
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(v);
        }
    }
}

/// Per-vertex block index sets and the event threshold.
#[derive(Debug, Clone)]
pub struct EventProfile {
    pub blocks: usize,
    /// `A_j`: blocks with `j` on the left, as bitmasks over block indices.
    pub left: Vec<Vec<u64>>,
    /// `B_j`: blocks with `j` on the right.
    pub right: Vec<Vec<u64>>,
    /// `x_j = |A_j| + |B_j|`.
    pub x: Vec<usize>,
    pub r: usize,
}

impl EventProfile {
    pub fn new(cov: &Covering, r: usize) -> Self {
        let sides = cov.sides();
        EventProfile {
            blocks: cov.len(),
            left: sides.left.iter().map(|s| s.words().to_vec()).collect(),
            right: sides.right.iter().map(|s| s.words().to_vec()).collect(),
            x: incidence_counts(cov),
            r,
        }
    }

    /// Profile for coverings of `K_n^λ`, with `r = ⌊(λ-1)/2⌋`.
    pub fn for_multigraph(cov: &Covering, lambda: usize) -> Self {
        Self::new(cov, half_floor(lambda))
    }

    /// `c_j(v)` for vertex index `j` (0-based); `v` is packed like the masks.
    #[inline]
    pub fn mismatches(&self, j: usize, v: &[u64]) -> usize {
        self.left[j]
            .iter()
            .zip(&self.right[j])
            .zip(v)
            .map(|((a, b), w)| ((a & w).count_ones() + (b & !w).count_ones()) as usize)
            .sum()
    }

    /// 0-based indices of the events occurring at `v`.
    pub fn occurring(&self, v: &[u64]) -> Vec<usize> {
        (0..self.x.len()).filter(|&j| self.mismatches(j, v) <= self.r).collect()
    }

    fn vector_words(&self) -> usize {
        self.blocks.div_ceil(64).max(1)
    }
}

fn vector_string(v: &[u64], m: usize) -> String {
    (0..m)
        .map(|i| if v[i / 64] >> (i % 64) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn require_valid(cov: &Covering, target: &Target<'_>) -> Result<(), CheckError> {
    let report = verify(cov, target)?;
    if report.valid {
        Ok(())
    } else {
        Err(CheckError::InvalidCovering(format!(
            "{} of {} required pairs below multiplicity {}",
            report.violating_pairs.len(),
            report.required_pairs,
            report.lambda
        )))
    }
}

fn rational(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `Σ_j P(Bin(x_j, 1/2) ≤ r)` with `r = ⌊(λ-1)/2⌋`; ok iff the sum is at
/// most 1.
pub fn check_tail_sum(cov: &Covering, lambda: usize) -> Result<CheckReport, CheckError> {
    require_valid(cov, &Target::Complete { n: cov.n(), lambda })?;
    let r = half_floor(lambda) as u32;
    let sum = incidence_counts(cov)
        .into_iter()
        .map(|x| binom_tail_p(x as u32, r.min(x as u32)))
        .fold(BigRational::zero(), |acc, p| acc + p);
    let mut report = CheckReport::new("tail_sum", "exact");
    if sum > BigRational::one() {
        report.violation(json!({ "sum_exceeds_one": format!("{}/{}", sum.numer(), sum.denom()) }));
    }
    report.value = sum.to_f64();
    Ok(report.with_sum(sum))
}

/// Partial result of a vector sweep over a contiguous range.
#[derive(Default)]
struct Sweep {
    counts: Vec<u64>,
    bad: u64,
    listed: Vec<(u64, Vec<usize>)>,
}

impl Sweep {
    fn merge(mut self, other: Sweep) -> Sweep {
        if self.counts.is_empty() {
            self.counts = other.counts;
        } else {
            for (a, b) in self.counts.iter_mut().zip(other.counts) {
                *a += b;
            }
        }
        self.bad += other.bad;
        self.listed.extend(other.listed);
        self.listed.sort_by_key(|(v, _)| *v);
        self.listed.truncate(MAX_LISTED_VIOLATIONS);
        self
    }
}

/// Visits every vector (exhaustive) or `trials` seeded vectors, calling
/// `is_bad` on the occurring set. Results do not depend on thread count.
fn sweep<F>(profile: &EventProfile, mode: Mode, limits: &Limits, is_bad: F) -> Result<(Sweep, u64), CheckError>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let n = profile.x.len();
    let words = profile.vector_words();
    let visit = |acc: &mut Sweep, index: u64, v: &[u64]| {
        let occ = profile.occurring(v);
        for &j in &occ {
            acc.counts[j] += 1;
        }
        if is_bad(&occ) {
            acc.bad += 1;
            if acc.listed.len() < MAX_LISTED_VIOLATIONS {
                acc.listed.push((index, occ));
            }
        }
    };
    match mode {
        Mode::Exhaustive => {
            let m = profile.blocks;
            if m > limits.exhaustive_max_blocks || m > 63 {
                return Err(CheckError::SizeLimitExceeded {
                    blocks: m,
                    limit: limits.exhaustive_max_blocks,
                });
            }
            let total = 1u64 << m;
            let chunk = (total / 256).max(1);
            let result = (0..total.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let mut acc = Sweep {
                        counts: vec![0; n],
                        ..Sweep::default()
                    };
                    for v in c * chunk..((c + 1) * chunk).min(total) {
                        visit(&mut acc, v, &[v]);
                    }
                    acc
                })
                .reduce(Sweep::default, Sweep::merge);
            Ok((result, total))
        }
        Mode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = Sweep {
                counts: vec![0; n],
                ..Sweep::default()
            };
            let mut v = vec![0u64; words];
            for t in 0..trials {
                for (i, w) in v.iter_mut().enumerate() {
                    let bits = profile.blocks.saturating_sub(64 * i).min(64);
                    *w = if bits == 64 {
                        rng.random()
                    } else {
                        rng.random::<u64>() & ((1u64 << bits) - 1)
                    };
                }
                visit(&mut acc, t, &v);
            }
            Ok((acc, trials))
        }
    }
}

fn listed_violations(profile: &EventProfile, listed: &[(u64, Vec<usize>)], mode: Mode, key: &str) -> Vec<serde_json::Value> {
    listed
        .iter()
        .map(|(index, occ)| {
            let events: Vec<usize> = occ.iter().map(|j| j + 1).collect();
            match mode {
                Mode::Exhaustive => json!({
                    "vector": vector_string(&[*index], profile.blocks),
                    key: events,
                }),
                Mode::Sampled { .. } => json!({ "trial": index, key: events }),
            }
        })
        .collect()
}

/// Checks that no vector triggers two of the events `E_j`; in exhaustive mode
/// also recounts each `P(E_j)` and compares it with `P(Bin(x_j, 1/2) ≤ r)`.
pub fn check_event_disjointness(cov: &Covering, lambda: usize, mode: Mode, limits: &Limits) -> Result<CheckReport, CheckError> {
    require_valid(cov, &Target::Complete { n: cov.n(), lambda })?;
    let profile = EventProfile::for_multigraph(cov, lambda);
    let (result, trials) = sweep(&profile, mode, limits, |occ| occ.len() > 1)?;
    let mut report = CheckReport::new("event_disjointness", mode.name());
    report.trials = trials;
    report.violations = listed_violations(&profile, &result.listed, mode, "events");
    report.violation_count = result.bad;
    report.ok = result.bad == 0;
    if mode == Mode::Exhaustive {
        let m = profile.blocks as u32;
        let mut total = BigRational::zero();
        for (j, (&x, &count)) in profile.x.iter().zip(&result.counts).enumerate() {
            let x = x as u32;
            let expected = binom_tail_count(x, (profile.r as u32).min(x)) << (m - x);
            total += rational(BigUint::from(count), BigUint::one() << m);
            if BigUint::from(count) != expected {
                report.violation(json!({
                    "vertex": j + 1,
                    "counted": count,
                    "expected": expected.to_string(),
                }));
            }
        }
        report = report.with_sum(total);
    }
    Ok(report)
}

/// `Σ_j (x_j/r)^r 2^{-x_j} ≤ 1 + 1e-9`, plus the exact pointwise bound
/// `P(Bin(x_j, 1/2) ≤ r) ≥ (x_j/r)^r 2^{-x_j}` for every vertex.
pub fn check_eq1(cov: &Covering, lambda: usize) -> Result<CheckReport, CheckError> {
    let r = half_floor(lambda);
    if r == 0 {
        return Err(CheckError::Domain(format!("needs r = ⌊(λ-1)/2⌋ >= 1, got λ = {lambda}")));
    }
    require_valid(cov, &Target::Complete { n: cov.n(), lambda })?;
    let mut report = CheckReport::new("eq1", "exact");
    let mut lhs = 0.0;
    for (j, x) in incidence_counts(cov).into_iter().enumerate() {
        lhs += convexity_f(x as f64, r);
        if !pointwise_tail_bound(x as u32, r as u32) {
            report.violation(json!({ "vertex": j + 1, "x": x, "pointwise": "p(x,r) < (x/r)^r 2^-x" }));
        }
    }
    report.value = Some(lhs);
    if lhs > 1.0 + EQ1_TOLERANCE {
        report.violation(json!({ "lhs": lhs }));
    }
    Ok(report)
}

/// Exact test of `Σ_{q≤r} C(x, q) / 2^x ≥ x^r / (r^r 2^x)`, i.e.
/// `r^r Σ_{q≤r} C(x, q) ≥ x^r`. Requires `1 ≤ r ≤ x`.
pub fn pointwise_tail_bound(x: u32, r: u32) -> bool {
    assert!(r >= 1 && r <= x);
    binom_tail_count(x, r) * BigUint::from(r).pow(r) >= BigUint::from(x).pow(r)
}

/// `f(x) = (x/r)^r 2^{-x}`.
pub fn convexity_f(x: f64, r: usize) -> f64 {
    (x / r as f64).powi(r as i32) * (-x).exp2()
}

/// Closed form of `f''(x) = f(x)[(ln 2 - r/x)^2 - r/x^2]`.
pub fn convexity_f_second_derivative(x: f64, r: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let rf = r as f64;
    convexity_f(x, r) * ((ln2 - rf / x).powi(2) - rf / (x * x))
}

/// Tolerance on second central differences of `f`.
pub const CONVEXITY_TOLERANCE: f64 = 1e-12;

/// Samples `f` on `steps + 1` evenly spaced points of `[x_lo, x_hi]` and checks
/// that every second central difference is `≥ -1e-12` and the closed-form
/// second derivative is positive at every grid point.
pub fn check_convexity(r: usize, x_lo: f64, x_hi: f64, steps: usize) -> Result<CheckReport, CheckError> {
    if r == 0 {
        return Err(CheckError::Domain("convexity check needs r >= 1".into()));
    }
    if x_lo < (2 * r + 1) as f64 || x_hi <= x_lo || steps < 2 {
        return Err(CheckError::Domain(format!(
            "needs 2r+1 <= x_lo < x_hi and steps >= 2 (r={r}, x_lo={x_lo}, x_hi={x_hi}, steps={steps})"
        )));
    }
    let h = (x_hi - x_lo) / steps as f64;
    let xs: Vec<f64> = (0..=steps).map(|i| x_lo + h * i as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| convexity_f(x, r)).collect();
    let mut report = CheckReport::new("convexity", "grid");
    report.trials = xs.len() as u64;
    let mut min_diff = f64::INFINITY;
    for i in 1..steps {
        let diff = fs[i - 1] - 2.0 * fs[i] + fs[i + 1];
        min_diff = min_diff.min(diff);
        if diff < -CONVEXITY_TOLERANCE {
            report.violation(json!({ "x": xs[i], "second_difference": diff }));
        }
    }
    for &x in &xs {
        let d2 = convexity_f_second_derivative(x, r);
        if d2 <= 0.0 {
            report.violation(json!({ "x": x, "second_derivative": d2 }));
        }
    }
    report.value = Some(min_diff);
    Ok(report)
}

/// `Σ_j 2^{-x_j} / α_j ≤ 1` for a covering of `g`, with the exact-match
/// events (`r = 0`). Exhaustive mode also checks the hypothesis that a vector
/// in `E_j` lies in at most `α_j` events; sampled mode checks it on the drawn
/// vectors.
pub fn check_overlap_lemma(cov: &Covering, g: &Graph, alphas: &AlphaVector, mode: Mode, limits: &Limits) -> Result<CheckReport, CheckError> {
    require_valid(cov, &Target::Graph { graph: g, lambda: 1 })?;
    if alphas.len() != g.n() {
        return Err(CheckError::Domain(format!(
            "alpha vector has {} entries for {} vertices",
            alphas.len(),
            g.n()
        )));
    }
    let x = incidence_counts(cov);
    let sum = x
        .iter()
        .zip(alphas.values())
        .map(|(&xj, &a)| rational(BigUint::one(), (BigUint::one() << xj) * BigUint::from(a)))
        .fold(BigRational::zero(), |acc, t| acc + t);
    let profile = EventProfile::new(cov, 0);
    let alpha = alphas.values();
    let (result, trials) = sweep(&profile, mode, limits, |occ| occ.iter().any(|&j| occ.len() > alpha[j]))?;
    let mut report = CheckReport::new("overlap_lemma", mode.name());
    report.trials = trials;
    report.violations = listed_violations(&profile, &result.listed, mode, "events");
    report.violation_count = result.bad;
    report.ok = result.bad == 0;
    report.value = sum.to_f64();
    if sum > BigRational::one() {
        report.violation(json!({ "sum_exceeds_one": format!("{}/{}", sum.numer(), sum.denom()) }));
    }
    Ok(report.with_sum(sum))
}

/// For every visited vector, the set of occurring exact-match events is an
/// independent set of `g`.
pub fn check_independent_event_sets(cov: &Covering, g: &Graph, mode: Mode, limits: &Limits) -> Result<CheckReport, CheckError> {
    require_valid(cov, &Target::Graph { graph: g, lambda: 1 })?;
    let profile = EventProfile::new(cov, 0);
    let (result, trials) = sweep(&profile, mode, limits, |occ| {
        let labels: Vec<usize> = occ.iter().map(|j| j + 1).collect();
        !g.is_independent(&labels)
    })?;
    let mut report = CheckReport::new("independent_event_sets", mode.name());
    report.trials = trials;
    report.violations = listed_violations(&profile, &result.listed, mode, "events");
    report.violation_count = result.bad;
    report.ok = result.bad == 0;
    Ok(report)
}
