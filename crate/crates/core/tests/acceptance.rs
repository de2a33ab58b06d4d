//! Acceptance run: one PASS/FAIL line per criterion, tolerances as specified.
//!
//! Run with `cargo test -p graphiso-core --test acceptance -- --nocapture` to
//! see the lines. The test fails if any criterion fails.

use std::time::{Duration, Instant};

use graphiso::analysis::{batch_instance, instance_seed, BatchKind};
use graphiso::cycles::{detect_systolic_basis, systole};
use graphiso::entropy::{check_entropy_inequalities, entropy_estimate, volume_entropy, EntropyFacts};
use graphiso::graph::generate;
use graphiso::stable_norm::{
    check_stable_inequalities_with, cross_polytope_volume, stable_ball_volume_exact, StableOptions, VolumeMethod,
};
use graphiso::subshift::{betti_b_a, check_prop6, equality_family, minimal_period, topological_entropy};
use graphiso::sysvol::{bs_lower_bound, bs_report, optimize_systolic_volume, DEFAULT_TOLERANCE};
use graphiso::{Error, Graph, InequalityReport, TransitionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within_budget(out: Outcome, elapsed: Duration, budget: Duration) -> Outcome {
    let ok = elapsed <= budget;
    Outcome::new(
        out.pass && ok,
        format!("{}; {:.2}s of {}s budget", out.detail, elapsed.as_secs_f64(), budget.as_secs()),
    )
}

fn report<'a>(reports: &'a [InequalityReport], name: &str) -> &'a InequalityReport {
    reports.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("missing report {name}"))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn weighted_corpus(count: usize, betti: (usize, usize), seed: u64) -> Vec<Graph> {
    let kind = BatchKind::RandomWeighted {
        betti,
        weight: (0.1, 10.0),
    };
    (0..count)
        .map(|i| batch_instance(&kind, instance_seed(seed, i)).unwrap())
        .collect()
}

fn regular_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let kind = BatchKind::RandomRegular {
        n: (4, 12),
        valences: vec![3, 4, 5],
    };
    (0..count)
        .map(|i| batch_instance(&kind, instance_seed(seed, i)).unwrap())
        .collect()
}

/// Random 3-regular graphs with random weights, some with subdivided edges,
/// plus weighted theta graphs: every valence in [2, 3].
fn trivalent_corpus(seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..40 {
        let n = [4, 6, 8, 10, 12][i % 5];
        let g: Graph = generate::random_regular(n, 3, rng.random()).unwrap();
        let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(0.1..=10.0)).collect();
        let mut g = g.with_weights(&w).unwrap();
        if i % 2 == 1 {
            let id = g.edges()[rng.random_range(0..g.edge_count())].id.clone();
            g = g.subdivide(&id, rng.random_range(2..=4)).unwrap();
        }
        out.push(g);
    }
    for _ in 0..10 {
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..=10.0)).collect();
        out.push(generate::theta(&w).unwrap());
    }
    out
}

fn criterion_1() -> Outcome {
    let (out, elapsed) = timed(|| {
        let mut worst = 0f64;
        for b in 2..=10 {
            let h = volume_entropy(&generate::unit_bouquet::<f64>(b).unwrap()).unwrap();
            worst = worst.max((h - ((2 * b - 1) as f64).ln()).abs());
        }
        Outcome::new(worst <= 1e-9, format!("max |h - ln(2b-1)| = {worst:.2e} for b = 2..10"))
    });
    within_budget(out, elapsed, Duration::from_secs(1))
}

fn criterion_2() -> Outcome {
    let (out, elapsed) = timed(|| {
        let mut graphs: Vec<(String, Graph)> =
            (2..=5).map(|b| (format!("bouquet({b})"), generate::unit_bouquet(b).unwrap())).collect();
        graphs.push(("theta".into(), generate::theta(&[1.0; 3]).unwrap()));
        graphs.push(("K4".into(), generate::complete(4).unwrap()));
        graphs.push(("3-regular n=10".into(), generate::random_regular(10, 3, 2024).unwrap()));
        let mut worst = (0f64, String::new());
        for (name, g) in &graphs {
            let h = volume_entropy(g).unwrap();
            let est = entropy_estimate(g, 0, 25.0).unwrap().slope;
            let gap = (est - h).abs();
            if gap >= worst.0 {
                worst = (gap, name.clone());
            }
        }
        Outcome::new(worst.0 <= 0.02, format!("max |estimate - h| = {:.4} ({})", worst.0, worst.1))
    });
    within_budget(out, elapsed, Duration::from_secs(30))
}

/// Also returns the corpus and its facts for the later criteria.
fn criterion_3() -> (Outcome, Vec<(Graph, EntropyFacts<f64>)>) {
    let start = Instant::now();
    let corpus: Vec<(Graph, EntropyFacts<f64>)> = weighted_corpus(500, (2, 8), 3)
        .into_iter()
        .map(|g| {
            let facts = EntropyFacts::compute(&g).unwrap();
            (g, facts)
        })
        .collect();
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for (g, facts) in &corpus {
        let r = report(&facts.reports(g), "thm1").clone();
        violations += usize::from(r.violated());
        min_slack = min_slack.min(r.slack.unwrap());
    }
    let out = Outcome::new(
        violations == 0,
        format!("{} graphs, {violations} violations, min slack {min_slack:.4}", corpus.len()),
    );
    (within_budget(out, start.elapsed(), Duration::from_secs(120)), corpus)
}

fn criterion_4(regular: &[Graph]) -> Outcome {
    let mut violations = 0;
    let mut non_equal = 0;
    let mut lemma_checked = 0;
    for g in regular {
        let reports = check_entropy_inequalities(g).unwrap();
        for name in ["prop1", "prop2.lower", "prop2.upper"] {
            let r = report(&reports, name);
            if !r.applicable || r.violated() {
                violations += 1;
            }
        }
        for name in ["prop2.lower", "prop2.upper"] {
            non_equal += usize::from(!report(&reports, name).equality);
        }
        let lemma = report(&reports, "lemma2");
        if lemma.applicable {
            lemma_checked += 1;
            violations += usize::from(lemma.violated());
        }
    }
    Outcome::new(
        violations == 0 && non_equal == 0,
        format!(
            "{} graphs, {violations} violations, {non_equal} missed prop2 equalities, lemma2 applicable on {lemma_checked}",
            regular.len()
        ),
    )
}

fn criterion_5(corpus: &[(Graph, EntropyFacts<f64>)], regular: &[Graph]) -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    let mut prop3 = |reports: &[InequalityReport]| {
        let r = report(reports, "prop3");
        if r.applicable {
            checked += 1;
            violations += usize::from(r.violated());
        }
    };
    for (g, facts) in corpus {
        prop3(&facts.reports(g));
    }
    for g in regular {
        prop3(&check_entropy_inequalities(g).unwrap());
    }
    let mut worst_bouquet = 0f64;
    for b in 1..=8 {
        let g: Graph = generate::unit_bouquet(b).unwrap();
        let reports = check_entropy_inequalities(&g).unwrap();
        let r = report(&reports, "prop3");
        assert!(r.applicable && detect_systolic_basis(&g).unwrap().is_found());
        worst_bouquet = worst_bouquet.max(r.slack.unwrap().abs());
    }
    Outcome::new(
        violations == 0 && checked > 0 && worst_bouquet <= 1e-9,
        format!(
            "basis found on {checked} of {} graphs, {violations} violations; bouquet equality gap {worst_bouquet:.2e}",
            corpus.len() + regular.len()
        ),
    )
}

fn criterion_6(corpus: &[(Graph, EntropyFacts<f64>)]) -> Outcome {
    let trivalent = trivalent_corpus(6);
    let mut violations = 0;
    for g in &trivalent {
        let reports = check_entropy_inequalities(g).unwrap();
        for name in ["prop4.lower.literal", "prop4.upper.literal"] {
            let r = report(&reports, name);
            if !r.applicable || r.violated() {
                violations += 1;
            }
        }
    }
    let mut prop5_violations = 0;
    for (g, facts) in corpus {
        prop5_violations += usize::from(report(&facts.reports(g), "prop5.literal").violated());
    }
    let mut worst_bouquet = 0f64;
    for b in 1..=8 {
        let reports = check_entropy_inequalities(&generate::unit_bouquet::<f64>(b).unwrap()).unwrap();
        worst_bouquet = worst_bouquet.max(report(&reports, "prop5.literal").slack.unwrap().abs());
    }
    Outcome::new(
        violations == 0 && prop5_violations == 0 && worst_bouquet <= 1e-9,
        format!(
            "prop4 on {} trivalent graphs: {violations} violations; prop5 on {} graphs: {prop5_violations} violations; bouquet equality gap {worst_bouquet:.2e}",
            trivalent.len(),
            corpus.len()
        ),
    )
}

fn exact_only() -> StableOptions {
    StableOptions {
        exact_only: true,
        ..StableOptions::default()
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let kind = BatchKind::RandomWeighted {
        betti: (1, 5),
        weight: (1.0, 1.0),
    };
    let mut violations = 0;
    for i in 0..100 {
        let g = batch_instance(&kind, instance_seed(7, i)).unwrap();
        assert!(g.is_unit_weighted());
        let (reports, vol) = check_stable_inequalities_with(&g, &exact_only()).unwrap();
        assert_eq!(vol.unwrap().method, VolumeMethod::Exact);
        for name in ["thm2.lower", "thm2.upper"] {
            let r = report(&reports, name);
            if !r.applicable || r.violated() {
                violations += 1;
            }
        }
    }
    let mut bouquet_gap = 0f64;
    for b in 1..=8 {
        let v = stable_ball_volume_exact(&generate::unit_bouquet::<f64>(b).unwrap()).unwrap().value;
        bouquet_gap = bouquet_gap.max((v - cross_polytope_volume::<f64>(b)).abs());
    }
    let theta = stable_ball_volume_exact(&generate::theta(&[1.0f64; 3]).unwrap()).unwrap().value;
    let theta_gap = (theta - 3.0 * 3f64.sqrt() / 4.0).abs();
    let out = Outcome::new(
        violations == 0 && bouquet_gap <= 1e-9 && theta_gap <= 1e-9,
        format!("100 graphs, {violations} violations; bouquet gap {bouquet_gap:.2e}; theta gap {theta_gap:.2e}"),
    );
    within_budget(out, start.elapsed(), Duration::from_secs(120))
}

/// The sampled half runs on weighted 3-regular graphs on 14 vertices: b = 8
/// and 21 distinct hyperplanes, one past the exact limit.
fn criterion_8() -> Outcome {
    let mut violations = 0;
    for g in weighted_corpus(100, (1, 5), 8) {
        let (reports, _) = check_stable_inequalities_with(&g, &exact_only()).unwrap();
        let r = report(&reports, "thm3");
        if !r.applicable || r.violated() {
            violations += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut mc_violations = 0;
    let mut worst_rel_width = 0f64;
    let mut min_ratio = f64::INFINITY;
    let mut confirmed = 0;
    let larger = 20;
    for i in 0..larger {
        // Edges across a 2-edge cut share a hyperplane; skip graphs that
        // thereby stay within the exact limit.
        let g: Graph = loop {
            let g = generate::random_regular(14, 3, rng.random()).unwrap();
            if matches!(stable_ball_volume_exact(&g), Err(Error::SizeLimitExceeded { .. })) {
                break g;
            }
        };
        let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(0.1..=10.0)).collect();
        let g = g.with_weights(&w).unwrap();
        let opts = StableOptions {
            samples: 2_000_000,
            seed: i,
            exact_only: false,
        };
        let (reports, vol) = check_stable_inequalities_with(&g, &opts).unwrap();
        let vol = vol.unwrap();
        assert_eq!(vol.method, VolumeMethod::MonteCarlo);
        let r = report(&reports, "thm3");
        if !r.applicable || r.violated() {
            mc_violations += 1;
        }
        worst_rel_width = worst_rel_width.max(vol.half_width / vol.value);
        min_ratio = min_ratio.min(r.left.unwrap() / r.right.unwrap());
        let factor = g.volume().powf(4.0);
        confirmed += usize::from(vol.ci99.unwrap().0 * factor >= r.right.unwrap());
    }
    Outcome::new(
        violations == 0 && mc_violations == 0,
        format!(
            "exact: 100 graphs, {violations} violations; sampled: {larger} graphs, {mc_violations} violations, \
             {confirmed} with the whole 99% CI above the bound, worst relative CI half-width {worst_rel_width:.3}, \
             min left/right {min_ratio:.3}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let graphs: Vec<(&str, Graph)> = vec![
        ("theta", generate::theta(&[1.0, 2.0, 3.0]).unwrap()),
        ("K4", generate::complete(4).unwrap()),
    ];
    let mut worst = 0f64;
    for (_, g) in &graphs {
        let h = volume_entropy(g).unwrap();
        let sys = systole(g).unwrap().length;
        let mu = stable_ball_volume_exact(g).unwrap().value;
        for k in [2, 3, 5] {
            let s = g.subdivide_all(k).unwrap();
            let hs = volume_entropy(&s).unwrap();
            let syss = systole(&s).unwrap().length;
            let mus = stable_ball_volume_exact(&s).unwrap().value;
            for (a, b) in [(h, hs), (sys, syss), (mu, mus)] {
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    Outcome::new(worst <= 1e-8, format!("theta and K4, k in {{2, 3, 5}}: max deviation {worst:.2e}"))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let n = rng.random_range(1..=8);
    let density = rng.random_range(0.1..0.9);
    let rows = (0..n)
        .map(|_| (0..n).map(|_| u8::from(rng.random_bool(density))).collect())
        .collect();
    TransitionMatrix::new(rows).unwrap()
}

fn criterion_10() -> Outcome {
    let (out, elapsed) = timed(|| {
        let mut worst_family = 0f64;
        for b in 1..=8 {
            let a = equality_family(b).unwrap();
            let h: f64 = topological_entropy(&a).unwrap();
            let t = minimal_period(&a).unwrap() as f64;
            worst_family = worst_family.max((h * t - (b as f64).ln()).abs());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (mut accepted, mut applicable, mut violations, mut raw_disconnected) = (0, 0, 0, 0);
        while accepted < 1000 {
            let a = random_matrix(&mut rng);
            let r = match check_prop6(&a) {
                Err(Error::EmptySubshift) => continue,
                other => other.unwrap(),
            };
            if betti_b_a(&a) < 1 {
                continue;
            }
            accepted += 1;
            if r.applicable {
                applicable += 1;
                violations += usize::from(r.violated());
            } else {
                let h: f64 = topological_entropy(&a).unwrap();
                let t = minimal_period(&a).unwrap() as f64;
                raw_disconnected += usize::from(h * t > (betti_b_a(&a) as f64).ln() + 1e-9);
            }
        }
        Outcome::new(
            worst_family <= 1e-9 && violations == 0,
            format!(
                "family gap {worst_family:.2e}; 1000 matrices, {applicable} connected, {violations} violations ({raw_disconnected} disconnected ones exceed the formula, not counted)"
            ),
        )
    });
    within_budget(out, elapsed, Duration::from_secs(60))
}

fn criterion_11(corpus: &[(Graph, EntropyFacts<f64>)], regular: &[Graph]) -> Outcome {
    let sigma = |g: &Graph| optimize_systolic_volume(g, DEFAULT_TOLERANCE).unwrap();
    let mut gap = 0f64;
    for b in 1..=8 {
        gap = gap.max((sigma(&generate::unit_bouquet(b).unwrap()).sigma - b as f64).abs());
    }
    gap = gap.max((sigma(&generate::theta(&[1.0; 3]).unwrap()).sigma - 1.5).abs());
    gap = gap.max((sigma(&generate::complete(4).unwrap()).sigma - 2.0).abs());
    let exact = bs_lower_bound::<f64>(3).unwrap() == 0.6;

    let mut checked = 0;
    let mut violations = 0;
    let graphs = corpus.iter().map(|(g, _)| g).take(150).chain(regular.iter().take(30));
    for g in graphs.filter(|g| g.betti_number() >= 3) {
        checked += 1;
        violations += usize::from(bs_report(g, &sigma(g)).violated());
    }
    Outcome::new(
        gap <= 1e-6 && exact && violations == 0,
        format!(
            "sigma gap {gap:.2e}; bs_lower_bound(3) == 0.6: {exact}; bound vs sigma on {checked} graphs: {violations} violations"
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut graphs = weighted_corpus(30, (1, 5), 12);
    graphs.push(generate::theta(&[1.0, 2.0, 3.0]).unwrap());
    graphs.push(generate::complete(4).unwrap());
    let invariants = |g: &Graph| {
        let b = g.betti_number() as i32;
        let hs = volume_entropy(g).unwrap() * systole(g).unwrap().length;
        let mu = stable_ball_volume_exact(g).unwrap().value * g.volume().sqrt().powi(b);
        (hs, mu)
    };
    let mut failures = 0;
    for g in &graphs {
        let (hs, mu) = invariants(g);
        for lambda in [0.1, 3.0, 42.0] {
            let (hs2, mu2) = invariants(&g.scale(lambda).unwrap());
            // A circle has h * sys = 0 exactly at every scale.
            let hs_ok = if hs == 0.0 { hs2.abs() <= 1e-12 } else { rel_close(hs, hs2, 1e-8) };
            failures += usize::from(!hs_ok || !rel_close(mu, mu2, 1e-8));
        }
    }
    Outcome::new(
        failures == 0,
        format!("{} graphs x 3 factors: {failures} mismatches", graphs.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    results.push((1, criterion_1()));
    results.push((2, criterion_2()));
    let (c3, corpus) = criterion_3();
    results.push((3, c3));
    let regular = regular_corpus(100, 4);
    results.push((4, criterion_4(&regular)));
    results.push((5, criterion_5(&corpus, &regular)));
    results.push((6, criterion_6(&corpus)));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));
    results.push((11, criterion_11(&corpus, &regular)));
    results.push((12, criterion_12()));

    for (n, out) in &results {
        println!("criterion {n:>2}: {}  {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
