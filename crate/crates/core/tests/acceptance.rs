//! Acceptance gate: one line per criterion, then a single assertion over all of them.

use std::time::{Duration, Instant};

use tlm_core::report::{Baseline, VerificationReport};
use tlm_core::suites::{random_corpus, Suite, SuiteConfig};
use tlm_core::{
    morrey_norm, BallSampler, Flavor, GridFunction, GridSpec, LebesguePair, LpFamily, WindowShape,
};

struct Outcome {
    criterion: usize,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn judge(
    criterion: usize,
    title: &'static str,
    budget: Duration,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    Outcome {
        criterion,
        title,
        pass: ok && elapsed <= budget,
        detail,
        elapsed,
        budget,
    }
}

fn suite_outcome(rep: &VerificationReport) -> (bool, String) {
    let t = rep.summary;
    let mut detail = format!("{}/{} checks pass", t.passed, t.total);
    for c in rep.checks.iter().filter(|c| !c.pass) {
        detail.push_str(&format!("; {:?} {}", c.verdict, c.check));
    }
    (rep.all_passed() && t.total > 0, detail)
}

fn run_suite(suite: Suite, baseline: Option<&Baseline>) -> (bool, String) {
    match suite.run(&SuiteConfig::default(), baseline) {
        Ok(rep) => suite_outcome(&rep),
        Err(e) => (false, format!("error: {e}")),
    }
}

fn partition() -> (bool, String) {
    let mut worst = 0.0f64;
    for (n, points, j) in [(1, 256, 6), (2, 128, 5)] {
        let spec = GridSpec::standard(n, points).unwrap();
        for flavor in [Flavor::Plain, Flavor::SquareRoot] {
            worst = worst.max(
                LpFamily::build(spec, j, flavor)
                    .unwrap()
                    .partition_residual(),
            );
        }
    }
    let (suite_ok, detail) = run_suite(Suite::Partition, None);
    (
        worst <= 1e-12 && suite_ok,
        format!("max residual {worst:.2e}; {detail}"),
    )
}

fn morrey_collapse() -> (bool, String) {
    let cfg = SuiteConfig::default();
    let spec = cfg.spec().unwrap();
    let corpus = random_corpus(spec, 50, 5, 11, "acceptance.collapse").unwrap();
    let cube = BallSampler::dyadic(&spec, WindowShape::Cube);
    let mut worst = 0.0f64;
    for p in [2.0, 3.0, 5.0] {
        let pq = LebesguePair::new(p, p).unwrap();
        for f in &corpus {
            // Riemann sum written out here rather than taken from the library.
            let lp = f
                .samples()
                .iter()
                .map(|c| c.norm().powf(p) * spec.cell_volume())
                .sum::<f64>()
                .powf(1.0 / p);
            let m = morrey_norm(f, pq, &cube).unwrap();
            worst = worst.max((m - lp).abs() / lp);
        }
    }
    let (suite_ok, detail) = run_suite(Suite::Morrey, None);
    (
        worst <= 1e-10 && suite_ok,
        format!("worst relative gap {worst:.2e} over 150 cases; morrey suite {detail}"),
    )
}

fn morrey_oracle() -> (bool, String) {
    let spec = GridSpec::standard(1, 256).unwrap();
    let f = GridFunction::ball_indicator(spec, 1.0);
    let pq = LebesguePair::new(4.0, 2.0).unwrap();
    let want = 2f64.powf(0.25);
    let linear = BallSampler::linear(&spec, WindowShape::Ball);
    let value = morrey_norm(&f, pq, &linear).unwrap();
    let coarse = BallSampler::new(
        linear.radii().iter().step_by(4).copied().collect(),
        1,
        WindowShape::Ball,
    )
    .unwrap();
    let coarse_value = morrey_norm(&f, pq, &coarse).unwrap();
    let merged = morrey_norm(
        &f,
        pq,
        &linear
            .merged(&BallSampler::dyadic(&spec, WindowShape::Ball))
            .unwrap(),
    )
    .unwrap();
    let gap = (value - want).abs() / want;
    let monotone = coarse_value <= value && value <= merged;
    (
        gap <= 0.05 && monotone,
        format!(
            "value {value:.6} vs 2^(1/4) = {want:.6} (gap {gap:.2e}); coarse {coarse_value:.6} <= full <= merged {merged:.6}"
        ),
    )
}

fn main() {
    let bundled = Baseline::bundled();
    let outcomes = vec![
        judge(1, "partition of unity", secs(1), partition),
        judge(2, "Morrey collapse p = q", secs(5), morrey_collapse),
        judge(3, "Morrey ball-indicator oracle", secs(5), morrey_oracle),
        judge(4, "exact-constant scalar lemmas", secs(30), || {
            run_suite(Suite::ScalarExact, None)
        }),
        judge(5, "empirical-constant scalar lemmas", secs(60), || {
            run_suite(Suite::ScalarConstants, Some(&bundled))
        }),
        judge(6, "Hölder interpolation inequality", secs(120), || {
            run_suite(Suite::Holder, None)
        }),
        judge(
            7,
            "reconstruction and derivative identities",
            secs(30),
            || run_suite(Suite::Reconstruction, None),
        ),
        judge(8, "boundary Lipschitz bounds", secs(120), || {
            run_suite(Suite::Lipschitz, Some(&bundled))
        }),
        judge(
            9,
            "vector maximal inequality and projection stability",
            secs(120),
            || run_suite(Suite::Maximal, Some(&bundled)),
        ),
        judge(10, "diamond criterion", secs(60), || {
            run_suite(Suite::Diamond, None)
        }),
    ];
    for o in &outcomes {
        println!(
            "criterion {:>2} {:<52} {} ({:.2}s of {}s) {}",
            o.criterion,
            o.title,
            if o.pass { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            o.detail
        );
    }
    let failed: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| o.criterion)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", outcomes.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
