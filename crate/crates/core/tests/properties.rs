use bicover::boundtab::{alpha_lower_from, binom_tail_p, half_floor, ks_lower};
use bicover::codeforge::{even_weight_code, greedy_gv_code, BchCode, BinaryCode, Word};
use bicover::coverkit::{
    balanced_bipartitions_covering, code_to_covering, coloring_to_covering, covering_sum, hadamard_covering,
    incidence_counts, parse_covering, serialize_covering, sum_squared_block_sizes, verify, words_to_covering,
    BipartiteBlock, Covering, Target,
};
use bicover::graphlib::{alpha_per_vertex, greedy_coloring, parse_graph, random_graph, serialize_graph, Graph};
use bicover::proofcheck::{
    check_event_disjointness, check_independent_event_sets, check_overlap_lemma, check_tail_sum, Mode,
};
use bicover::Limits;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn brute_alpha(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut best = vec![0; n];
    for mask in 1u32..1 << n {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        if g.is_independent(&set) {
            for &v in &set {
                best[v - 1] = best[v - 1].max(set.len());
            }
        }
    }
    best
}

fn hamming(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).filter(|(x, y)| x != y).count()
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, p, seed)| random_graph(n, p, seed).unwrap())
}

fn covering_strategy(n: usize, max_blocks: usize) -> impl Strategy<Value = Covering> {
    let block = proptest::collection::vec(0u8..3, n).prop_filter_map("needs both sides", |sides| {
        let left: Vec<usize> = (1..=sides.len()).filter(|&v| sides[v - 1] == 1).collect();
        let right: Vec<usize> = (1..=sides.len()).filter(|&v| sides[v - 1] == 2).collect();
        BipartiteBlock::new(left, right).ok()
    });
    proptest::collection::vec(block, 0..=max_blocks).prop_map(move |b| Covering::new(n, b).unwrap())
}

fn brute_multiplicity(cov: &Covering, u: usize, v: usize) -> usize {
    cov.blocks()
        .iter()
        .filter(|b| {
            (b.left().contains(&u) && b.right().contains(&v)) || (b.left().contains(&v) && b.right().contains(&u))
        })
        .count()
}

fn pascal_tail(x: u32, r: u32) -> BigRational {
    let mut row = vec![BigInt::from(1)];
    for _ in 0..x {
        let mut next = vec![BigInt::from(1); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    let num: BigInt = row.iter().take(r as usize + 1).sum();
    BigRational::new(num, BigInt::from(1) << x)
}

/// Every construction in the toolkit that targets `K_n^λ`, with its λ.
fn construction_matrix() -> Vec<(String, Covering, usize)> {
    let limits = Limits::default();
    let mut out = Vec::new();
    for n in 2..=24 {
        let k = bicover::ceil_log2(n as u64) as usize + 1;
        let code = even_weight_code(k, &limits).unwrap();
        out.push((format!("even-weight n={n}"), code_to_covering(&code, n).unwrap().covering, 2));
    }
    for m in 1..=5 {
        out.push((format!("hadamard m={m}"), hadamard_covering(m, &limits).unwrap(), 1 << (m - 1)));
    }
    for n in [2usize, 4, 6, 8, 10] {
        let lambda = (0..n / 2 - 1).fold(1, |acc, i| acc * (n - 2 - i) / (i + 1));
        out.push((format!("balanced n={n}"), balanced_bipartitions_covering(n, &limits).unwrap(), lambda));
    }
    for (k, d, n) in [(5, 3, 4), (6, 3, 8), (7, 4, 8), (8, 5, 4), (7, 3, 16)] {
        let code = greedy_gv_code(k, d, n, &limits).unwrap();
        out.push((format!("gv k={k} d={d}"), code_to_covering(&code, n).unwrap().covering, d));
    }
    for (m, d, n) in [(3, 2, 16), (4, 2, 100), (4, 3, 128), (5, 3, 40)] {
        let bch = BchCode::new(m, d).unwrap();
        let words = bch.first_codewords(n).unwrap();
        out.push((format!("bch m={m} d={d}"), words_to_covering(&words, bch.length()).covering, 2 * d));
    }
    out
}

#[test]
fn constructions_satisfy_counting_invariants() {
    let limits = Limits::default();
    for (name, cov, lambda) in construction_matrix() {
        let n = cov.n();
        let report = verify(&cov, &Target::Complete { n, lambda }).unwrap();
        assert!(report.valid, "{name}");
        let squares = sum_squared_block_sizes(&cov);
        assert!(squares >= 2 * (lambda * n * (n - 1)) as u128, "{name}");
        assert!(incidence_counts(&cov).iter().all(|&x| x >= lambda), "{name}");
        let tail = check_tail_sum(&cov, lambda).unwrap();
        assert!(tail.ok, "{name}: {:?}", tail.sum);
        if cov.len() <= limits.exhaustive_max_blocks {
            let r = check_event_disjointness(&cov, lambda, Mode::Exhaustive, &limits).unwrap();
            assert!(r.ok && r.violation_count == 0, "{name}");
        } else {
            let r = check_event_disjointness(&cov, lambda, Mode::Sampled { seed: 7, trials: 2000 }, &limits).unwrap();
            assert!(r.ok, "{name}");
        }
    }
}

#[test]
fn sampled_mode_is_deterministic_in_seed() {
    let limits = Limits::default();
    let cov = hadamard_covering(4, &limits).unwrap();
    let a = check_event_disjointness(&cov, 8, Mode::Sampled { seed: 3, trials: 500 }, &limits).unwrap();
    let b = check_event_disjointness(&cov, 8, Mode::Sampled { seed: 3, trials: 500 }, &limits).unwrap();
    assert_eq!(a, b);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let limits = Limits::default();
    let g = random_graph(30, 0.4, 11).unwrap();
    let cov = hadamard_covering(4, &limits).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                alpha_per_vertex(&g, &limits).unwrap(),
                verify(&cov, &Target::Complete { n: 16, lambda: 9 }).unwrap(),
                check_event_disjointness(&cov, 8, Mode::Exhaustive, &limits).unwrap(),
            )
        })
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_matches_brute_force_and_dominates_degree_bound(g in graph_strategy(12)) {
        let alpha = alpha_per_vertex(&g, &Limits::default()).unwrap();
        prop_assert_eq!(alpha.values().to_vec(), brute_alpha(&g));
        let a = alpha_lower_from(g.n(), alpha.values());
        prop_assert!(a >= ks_lower(&g) - 1e-9);
    }

    #[test]
    fn graph_json_round_trips(g in graph_strategy(20)) {
        let text = serialize_graph(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn greedy_coloring_is_proper_and_small(g in graph_strategy(25)) {
        let c = greedy_coloring(&g);
        for (u, v) in g.edges() {
            prop_assert_ne!(c[u - 1], c[v - 1]);
        }
        let max_deg = g.degrees().into_iter().max().unwrap_or(0);
        let colors = c.iter().max().map_or(0, |&x| x + 1);
        prop_assert!(colors <= max_deg + 1);
    }

    #[test]
    fn coloring_coverings_pass_graph_diagnostics(g in graph_strategy(10)) {
        let limits = Limits::default();
        let cov = coloring_to_covering(&g, &greedy_coloring(&g)).unwrap();
        let target = Target::Graph { graph: &g, lambda: 1 };
        prop_assert!(verify(&cov, &target).unwrap().valid);
        let alpha = alpha_per_vertex(&g, &limits).unwrap();
        let overlap = check_overlap_lemma(&cov, &g, &alpha, Mode::Exhaustive, &limits).unwrap();
        prop_assert!(overlap.ok);
        let indep = check_independent_event_sets(&cov, &g, Mode::Exhaustive, &limits).unwrap();
        prop_assert!(indep.ok);
        prop_assert!(bicover::coverkit::capacity(&cov) as f64 >= alpha_lower_from(g.n(), alpha.values()) - 1e-9);
    }

    #[test]
    fn code_covering_multiplicity_is_hamming_distance(
        k in 1usize..10,
        seeds in proptest::collection::btree_set(any::<u16>(), 2..12),
    ) {
        let strings: Vec<String> = seeds
            .iter()
            .map(|&s| (0..k).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assume!(strings.len() >= 2);
        let words: Vec<Word> = strings.iter().map(|s| s.parse().unwrap()).collect();
        let code = BinaryCode::new(k, words, "test").unwrap();
        let cov = code_to_covering(&code, strings.len()).unwrap().covering;
        let sides = cov.sides();
        for u in 1..=strings.len() {
            for v in u + 1..=strings.len() {
                prop_assert_eq!(sides.multiplicity(u, v), hamming(&strings[u - 1], &strings[v - 1]));
            }
        }
    }

    #[test]
    fn multiplicities_add_under_sum(a in covering_strategy(6, 6), b in covering_strategy(6, 6)) {
        let s = covering_sum(&a, &b).unwrap();
        prop_assert_eq!(bicover::coverkit::capacity(&s), bicover::coverkit::capacity(&a) + bicover::coverkit::capacity(&b));
        let (sa, sb, ss) = (a.sides(), b.sides(), s.sides());
        for u in 1..=6 {
            for v in u + 1..=6 {
                prop_assert_eq!(ss.multiplicity(u, v), sa.multiplicity(u, v) + sb.multiplicity(u, v));
                prop_assert_eq!(ss.multiplicity(u, v), brute_multiplicity(&s, u, v));
            }
        }
    }

    #[test]
    fn verifier_agrees_with_direct_count(cov in covering_strategy(7, 8), lambda in 1usize..4) {
        let target = Target::Complete { n: 7, lambda };
        let report = verify(&cov, &target).unwrap();
        let mut bad = Vec::new();
        for u in 1..=7 {
            for v in u + 1..=7 {
                let m = brute_multiplicity(&cov, u, v);
                if m < lambda {
                    bad.push((u, v, m));
                }
            }
        }
        let got: Vec<(usize, usize, usize)> = report.violating_pairs.iter().map(|p| (p.u, p.v, p.multiplicity)).collect();
        prop_assert_eq!(got, bad.clone());
        prop_assert_eq!(report.valid, bad.is_empty());
        if report.valid {
            prop_assert!(sum_squared_block_sizes(&cov) >= (2 * lambda * 7 * 6) as u128);
        }
    }

    #[test]
    fn covering_json_round_trips(cov in covering_strategy(8, 10)) {
        prop_assert_eq!(parse_covering(&serialize_covering(&cov)).unwrap(), cov);
    }

    #[test]
    fn tail_probability_matches_pascal(x in 0u32..60, r in 0u32..60) {
        let r = r.min(x);
        prop_assert_eq!(binom_tail_p(x, r), pascal_tail(x, r));
    }

    #[test]
    fn tail_sum_is_at_most_one_on_valid_random_coverings(cov in covering_strategy(5, 12), lambda in 1usize..4) {
        let target = Target::Complete { n: 5, lambda };
        let valid = verify(&cov, &target).unwrap().valid;
        prop_assume!(valid);
        prop_assert!(check_tail_sum(&cov, lambda).unwrap().ok);
        prop_assert!(incidence_counts(&cov).iter().all(|&x| x >= lambda));
        let limits = Limits::default();
        let d = check_event_disjointness(&cov, lambda, Mode::Exhaustive, &limits).unwrap();
        prop_assert!(d.ok, "r = {}", half_floor(lambda));
    }
}
