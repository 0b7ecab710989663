//! End-to-end acceptance criteria. Runs without the libtest harness so that
//! one PASS/FAIL line per criterion is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bicover::boundtab::{alpha_lower, gv_count, ks_lower, thm11_lower, upper_item1, upper_item4};
use bicover::codeforge::{bch_extended_code, even_weight_code, exact_min_distance, greedy_gv_code};
use bicover::coverkit::{
    balanced_bipartitions_covering, capacity, code_to_covering, coloring_to_covering, covering_sum,
    hadamard_covering, sum_squared_block_sizes, verify, Covering, Target,
};
use bicover::graphlib::{alpha_per_vertex, greedy_coloring, random_graph, Graph};
use bicover::oracle::{exact_cap, SearchBudget};
use bicover::proofcheck::{
    check_convexity, check_eq1, check_event_disjointness, check_overlap_lemma, check_tail_sum, Mode,
};
use bicover::{ceil_log2, Limits};

/// A covering of `K_n^λ` produced while checking some criterion.
struct Sample {
    name: String,
    covering: Covering,
    lambda: usize,
}

#[derive(Default)]
struct Matrix {
    samples: Vec<Sample>,
}

impl Matrix {
    fn add(&mut self, name: impl Into<String>, covering: Covering, lambda: usize) {
        self.samples.push(Sample {
            name: name.into(),
            covering,
            lambda,
        });
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn valid_on_complete(cov: &Covering, lambda: usize) -> Result<bicover::coverkit::CoverageReport, String> {
    verify(cov, &Target::Complete { n: cov.n(), lambda }).map_err(|e| e.to_string())
}

fn binomial(n: usize, k: usize) -> usize {
    let mut acc = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn criterion_1(m: &mut Matrix) -> Check {
    let limits = Limits::default();
    for n in [2usize, 4, 8, 16] {
        let k = n.ilog2() as usize;
        let code = greedy_gv_code(k, 1, n, &limits).map_err(|e| e.to_string())?;
        let cov = code_to_covering(&code, n).map_err(|e| e.to_string())?.covering;
        let report = valid_on_complete(&cov, 1)?;
        ensure(report.valid, || format!("n={n}: verifier rejects"))?;
        let cap = capacity(&cov);
        ensure(cap == n * k, || format!("n={n}: capacity {cap} != {}", n * k))?;
        let bound = thm11_lower(n, 1);
        ensure((cap as f64 - bound).abs() < 1e-9, || format!("n={n}: capacity {cap} vs bound {bound}"))?;
        m.add(format!("hansel n={n}"), cov, 1);
    }
    Ok(())
}

fn criterion_2(m: &mut Matrix) -> Check {
    let budget = SearchBudget::default();
    for (n, lambda, expected, refuted) in [(2, 1, 2, None), (2, 2, 4, None), (3, 1, 5, Some(4)), (4, 1, 8, Some(7))] {
        let r = exact_cap(n, lambda, &budget).map_err(|e| format!("({n},{lambda}): {e}"))?;
        ensure(r.value == expected, || format!("({n},{lambda}) = {} expected {expected}", r.value))?;
        ensure(valid_on_complete(&r.witness, lambda)?.valid, || format!("({n},{lambda}): witness invalid"))?;
        ensure(capacity(&r.witness) == expected, || format!("({n},{lambda}): witness capacity"))?;
        if let Some(c) = refuted {
            ensure(r.refuted.contains(&c), || format!("({n},{lambda}): capacity {c} not refuted"))?;
        }
        m.add(format!("exact ({n},{lambda})"), r.witness, lambda);
    }
    Ok(())
}

fn criterion_3(m: &mut Matrix) -> Check {
    let limits = Limits::default();
    for mm in 1..=3u32 {
        let n = 1usize << mm;
        let cov = hadamard_covering(mm, &limits).map_err(|e| e.to_string())?;
        let report = valid_on_complete(&cov, n / 2)?;
        ensure(report.valid, || format!("hadamard m={mm} invalid"))?;
        ensure(
            report.histogram.len() == 1 && report.histogram[0].multiplicity == n / 2,
            || format!("hadamard m={mm}: multiplicities {:?}", report.histogram),
        )?;
        let want = 2 * (n / 2) * (n - 1);
        ensure(capacity(&cov) == want, || format!("hadamard m={mm}: capacity {} != {want}", capacity(&cov)))?;
        m.add(format!("hadamard m={mm}"), cov, n / 2);
    }
    for n in [2usize, 4, 6] {
        let lambda = binomial(n - 2, n / 2 - 1);
        let cov = balanced_bipartitions_covering(n, &limits).map_err(|e| e.to_string())?;
        ensure(valid_on_complete(&cov, lambda)?.valid, || format!("balanced n={n} invalid"))?;
        let want = 2 * lambda * (n - 1);
        ensure(capacity(&cov) == want, || format!("balanced n={n}: capacity {} != {want}", capacity(&cov)))?;
        m.add(format!("balanced n={n}"), cov, lambda);
    }
    let h = hadamard_covering(2, &limits).map_err(|e| e.to_string())?;
    let b = balanced_bipartitions_covering(4, &limits).map_err(|e| e.to_string())?;
    let sum = covering_sum(&h, &b).map_err(|e| e.to_string())?;
    ensure(valid_on_complete(&sum, 4)?.valid, || "sum at n=4 not valid for lambda=4".into())?;
    ensure(capacity(&sum) == 24, || format!("sum capacity {} != 24", capacity(&sum)))?;
    m.add("hadamard+balanced n=4", sum, 4);
    Ok(())
}

fn criterion_4(m: &mut Matrix) -> Check {
    let limits = Limits::default();
    for n in 3..=10usize {
        let k = ceil_log2(n as u64) as usize + 1;
        let code = even_weight_code(k, &limits).map_err(|e| e.to_string())?;
        let cov = code_to_covering(&code, n).map_err(|e| e.to_string())?.covering;
        let report = valid_on_complete(&cov, 2)?;
        ensure(report.min_multiplicity.is_some_and(|x| x >= 2), || format!("even-weight n={n}: {report:?}"))?;
        let bound = upper_item1(n).map_err(|e| e.to_string())?;
        ensure(capacity(&cov) as f64 <= bound, || format!("even-weight n={n}: capacity above {bound}"))?;
        m.add(format!("even-weight n={n}"), cov, 2);
    }
    for (mm, n) in [(3u32, 16usize), (4, 2048)] {
        let code = bch_extended_code(mm, 2, &limits).map_err(|e| e.to_string())?;
        ensure(code.len() == n, || format!("bch m={mm}: {} words", code.len()))?;
        let d = exact_min_distance(code.words(), &limits).map_err(|e| e.to_string())?;
        ensure(d == 4, || format!("bch m={mm}: distance {d}"))?;
        let cov = code_to_covering(&code, n).map_err(|e| e.to_string())?.covering;
        ensure(valid_on_complete(&cov, 4)?.valid, || format!("bch m={mm}: covering of K_{n}^4 invalid"))?;
        let cap = capacity(&cov);
        ensure(cap <= n << mm, || format!("bch m={mm}: capacity {cap} > n*2^m"))?;
        let bound = upper_item4(n, 4).map_err(|e| e.to_string())?;
        ensure(cap as f64 <= bound, || format!("bch m={mm}: capacity {cap} > {bound}"))?;
        m.add(format!("bch m={mm}"), cov, 4);
    }
    let mut pairs = 0;
    for k in 4..=8usize {
        for d in 1..=4usize {
            pairs += 1;
            let target: usize = gv_count(k as u32, d as u32).try_into().map_err(|_| "gv count overflow")?;
            let code = greedy_gv_code(k, d, target, &limits).map_err(|e| format!("gv ({k},{d}): {e}"))?;
            let got = exact_min_distance(code.words(), &limits).map_err(|e| e.to_string())?;
            ensure(code.len() >= target && got >= d, || format!("gv ({k},{d}): {} words at {got}", code.len()))?;
            if target >= 2 {
                let cov = code_to_covering(&code, target).map_err(|e| e.to_string())?.covering;
                m.add(format!("gv ({k},{d})"), cov, d);
            }
        }
    }
    ensure(pairs == 20, || format!("grid has {pairs} pairs"))
}

fn criterion_5() -> Check {
    let limits = Limits::default();
    let ps = [0.2, 0.5, 0.8];
    for seed in 0..100u64 {
        let p = ps[seed as usize % 3];
        let g = random_graph(20, p, seed).map_err(|e| e.to_string())?;
        let a = alpha_lower(&g, &limits).map_err(|e| e.to_string())?;
        let ks = ks_lower(&g);
        ensure(a >= ks - 1e-9, || format!("seed {seed}: alpha {a} < ks {ks}"))?;
        let alpha = alpha_per_vertex(&g, &limits).map_err(|e| e.to_string())?;
        let tight = (1..=20).all(|i| alpha.of(i) == 20 - g.degree(i));
        let equal = (a - ks).abs() <= 1e-9;
        ensure(tight == equal, || format!("seed {seed}: equality {equal} but alpha = n - d is {tight}"))?;
    }
    Ok(())
}

fn graph_samples() -> Vec<(String, Graph)> {
    let mut out = vec![
        ("C5".to_string(), Graph::cycle(5).unwrap()),
        ("P6".to_string(), Graph::path(6).unwrap()),
        ("K6".to_string(), Graph::complete(6).unwrap()),
    ];
    for seed in 0..6 {
        out.push((format!("G(12,0.5) seed {seed}"), random_graph(12, 0.5, seed).unwrap()));
    }
    out
}

fn criterion_6(m: &Matrix) -> Check {
    let limits = Limits::default();
    let mut exhaustive = 0;
    for s in &m.samples {
        let cov = &s.covering;
        if cov.len() > limits.exhaustive_max_blocks {
            continue;
        }
        exhaustive += 1;
        let tail = check_tail_sum(cov, s.lambda).map_err(|e| format!("{}: {e}", s.name))?;
        ensure(tail.ok, || format!("{}: tail sum {:?}", s.name, tail.sum))?;
        let d = check_event_disjointness(cov, s.lambda, Mode::Exhaustive, &limits).map_err(|e| format!("{}: {e}", s.name))?;
        ensure(d.ok && d.violation_count == 0, || format!("{}: {} double events", s.name, d.violation_count))?;
        if s.lambda >= 3 {
            let e = check_eq1(cov, s.lambda).map_err(|e| format!("{}: {e}", s.name))?;
            ensure(e.ok, || format!("{}: eq1 lhs {:?}", s.name, e.value))?;
        }
        let kn = Graph::complete(cov.n()).unwrap();
        let ones = bicover::graphlib::AlphaVector::new(vec![1; cov.n()]);
        let o = check_overlap_lemma(cov, &kn, &ones, Mode::Exhaustive, &limits).map_err(|e| format!("{}: {e}", s.name))?;
        ensure(o.ok, || format!("{}: overlap sum {:?}", s.name, o.sum))?;
    }
    ensure(exhaustive > 0, || "no covering within the exhaustive limit".into())?;
    for (name, g) in graph_samples() {
        let cov = coloring_to_covering(&g, &greedy_coloring(&g)).map_err(|e| e.to_string())?;
        let alpha = alpha_per_vertex(&g, &limits).map_err(|e| e.to_string())?;
        let o = check_overlap_lemma(&cov, &g, &alpha, Mode::Exhaustive, &limits).map_err(|e| format!("{name}: {e}"))?;
        ensure(o.ok, || format!("{name}: overlap sum {:?}", o.sum))?;
    }
    for r in 1..=3usize {
        let lo = (2 * r + 1) as f64;
        let c = check_convexity(r, lo, 50.0, 10_000).map_err(|e| e.to_string())?;
        ensure(c.ok, || format!("convexity r={r}: {:?}", c.violations))?;
    }
    Ok(())
}

fn criterion_7(m: &Matrix) -> Check {
    for s in &m.samples {
        let n = s.covering.n();
        if !valid_on_complete(&s.covering, s.lambda)?.valid {
            continue;
        }
        let lhs = sum_squared_block_sizes(&s.covering);
        let rhs = 2 * (s.lambda as u128) * (n as u128) * (n as u128 - 1);
        ensure(lhs >= rhs, || format!("{}: {lhs} < {rhs}", s.name))?;
    }
    Ok(())
}

fn criterion_8() -> Check {
    let cov = hadamard_covering(2, &Limits::default()).map_err(|e| e.to_string())?;
    for i in 0..cov.len() {
        let broken = cov.without_block(i);
        let report = valid_on_complete(&broken, 2)?;
        ensure(!report.valid, || format!("removing block {i} still valid"))?;
        let block = &cov.blocks()[i];
        let mut expected: Vec<(usize, usize)> = block
            .left()
            .iter()
            .flat_map(|&a| block.right().iter().map(move |&b| (a.min(b), a.max(b))))
            .collect();
        expected.sort_unstable();
        let got: Vec<(usize, usize)> = report.violating_pairs.iter().map(|p| (p.u, p.v)).collect();
        ensure(got == expected, || format!("block {i}: reported {got:?}, separated {expected:?}"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let g = random_graph(200, 0.5, 1).map_err(|e| e.to_string())?;
    let coloring = greedy_coloring(&g);
    let colors = coloring.iter().max().map_or(0, |&c| c + 1);
    let cov = coloring_to_covering(&g, &coloring).map_err(|e| e.to_string())?;
    let report = verify(&cov, &Target::Graph { graph: &g, lambda: 1 }).map_err(|e| e.to_string())?;
    ensure(report.valid, || "coloring covering invalid".into())?;
    let limits = Limits {
        exact_alpha_max_n: 200,
        ..Limits::default()
    };
    let lower = alpha_lower(&g, &limits).map_err(|e| e.to_string())?;
    let upper = 200 * ceil_log2(colors as u64) as usize;
    let cap = capacity(&cov);
    println!("    G(200, 0.5, seed 1): {colors} colors, capacity {cap}, alpha bound {lower:.3}, cap bound {upper}");
    ensure(lower <= cap as f64 && cap <= upper, || format!("capacity {cap} outside [{lower}, {upper}]"))
}

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let result = result.and_then(|()| {
        ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}"))
    });
    match &result {
        Ok(()) => println!("criterion {id} PASS  {title} ({elapsed:.2?})"),
        Err(msg) => println!("criterion {id} FAIL  {title} ({elapsed:.2?}): {msg}"),
    }
    result.is_ok()
}

fn main() -> ExitCode {
    let mut matrix = Matrix::default();
    let secs = Duration::from_secs;
    let results = [
        run(1, "Hansel tightness at powers of two", secs(1), || criterion_1(&mut matrix)),
        run(2, "exact oracle values", secs(60), || criterion_2(&mut matrix)),
        run(3, "edge-count bound tightness", secs(1), || criterion_3(&mut matrix)),
        run(4, "code-based upper bounds", secs(120), || criterion_4(&mut matrix)),
        run(5, "alpha bound dominates degree bound", secs(30), criterion_5),
        run(6, "probabilistic diagnostics", secs(120), || criterion_6(&matrix)),
        run(7, "edge-count inequality on every covering", secs(60), || criterion_7(&matrix)),
        run(8, "negative controls", secs(1), criterion_8),
        run(9, "random graph covering demo", secs(30), criterion_9),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
