//! Acceptance criteria 1 to 11. Runs as a plain binary (no libtest harness)
//! so that each criterion prints exactly one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use irelab::fire::{self, BoundId, CellSet};
use irelab::graph::{self, generators, Budget};
use irelab::local::{mtp_check, BernoulliProcess, BvtProcess, Diagonal, MarkedNearPoint, NearPoint, VoronoiShare};
use irelab::voronoi::{bvt_intensity_identity, BvtParams};
use irelab::{GroupSpec, IntensitySpec, SeedSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn f2() -> GroupSpec {
    GroupSpec::free(2).unwrap()
}

/// Criteria 1 to 3 share one run: A = B_2 in F_2, delta = 0.1, 10^5 samples.
fn bound_criterion(id: BoundId, expected_bound: f64) -> Outcome {
    let cell_set = CellSet::ball(f2(), 2, 0.1).unwrap();
    assert_eq!(cell_set.len(), 17);
    let reports = fire::verify_lemma_bounds(&cell_set, 100_000, SeedSpec::new(20_240_501, 0)).unwrap();
    let r = reports.iter().find(|r| r.bound_id == id).unwrap();
    let Some(lo) = r.lower99 else {
        return outcome(false, "no conditioning mass");
    };
    let bound_ok = (r.bound - expected_bound).abs() < 1e-12;
    outcome(
        bound_ok && lo >= expected_bound,
        format!(
            "estimate {:.5}, 99% lower limit {lo:.5} vs bound {expected_bound}",
            r.estimate.as_ref().unwrap().value
        ),
    )
}

/// Closed form for A = {0, 1} in Z with point intensity q = delta / 2:
/// the root is tied to a point iff 0 or -1 is a point; its class is then
/// {0, 1} minus 1 if 1 is a point (root is a point), or {-1, 0}.
fn pair_closed_form(delta: f64) -> (f64, f64) {
    let q = delta / 2.0;
    (q * (2.0 - q), q * (4.0 - 3.0 * q))
}

fn c4() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (i, delta) in [0.1, 0.25, 0.49].into_iter().enumerate() {
        let cs = CellSet::parse(common::z(1), "0,1", delta).unwrap();
        let cmp = fire::compare_with_oracle(&cs, 100_000, SeedSpec::new(4_000 + i as u64, 0)).unwrap();
        let (p, e) = pair_closed_form(delta);
        let exact_ok = (cmp.prob_exact - p).abs() < 1e-12 && (cmp.size_exact - e).abs() < 1e-12;
        let ok = exact_ok && cmp.prob_deviation_se <= 4.0 && cmp.size_deviation_se <= 4.0;
        pass &= ok;
        details.push(format!(
            "delta {delta}: P {:.2} SE, E {:.2} SE{}",
            cmp.prob_deviation_se,
            cmp.size_deviation_se,
            if exact_ok { "" } else { " (exact law disagrees with closed form)" }
        ));
    }
    outcome(pass, details.join("; "))
}

fn c5() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (i, p) in [0.2, 0.5].into_iter().enumerate() {
        let params = BvtParams::new(common::z(2), p, 50).unwrap();
        let r = bvt_intensity_identity(&params, 10_000, SeedSpec::new(5_000 + i as u64, 0)).unwrap();
        let ok = r.within_4se && r.undetermined_fraction < 0.01;
        pass &= ok;
        details.push(format!(
            "p {p}: {:.5} ({:.2} SE), undetermined {:.4}",
            r.estimate.value, r.deviation_in_se, r.undetermined_fraction
        ));
    }
    outcome(pass, details.join("; "))
}

fn c6() -> Outcome {
    let corpus = generators::small_corpus();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (name, g) in &corpus {
        if g.edge_count() > 16 {
            continue;
        }
        for k in 1..=5 {
            let cert = graph::hyperfinite_exact(g, 0.0, k, Budget(graph::DEFAULT_NODE_BUDGET)).unwrap();
            let oracle = common::min_cut_by_edge_subsets(g, k);
            compared += 1;
            if cert.optimal_cut_size != Some(oracle) || graph::verify_certificate(g, &cert).is_err() {
                mismatches.push(format!("{name} k={k}: solver {:?}, oracle {oracle}", cert.optimal_cut_size));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{} graphs, {compared} (graph, k) pairs, {} mismatches {}",
            corpus.len(),
            mismatches.len(),
            mismatches.join(", ")
        ),
    )
}

fn c7() -> Outcome {
    let mut graphs: Vec<(String, graph::FiniteGraph)> = (4..=7).map(|n| (format!("K_{n}"), generators::complete(n))).collect();
    for seed in 0..20u64 {
        let n = 8 + 2 * (seed as usize % 5);
        graphs.push((format!("3-regular n={n} seed={seed}"), generators::random_regular(n, 3, seed).unwrap()));
    }
    graphs.push(("Q_3".into(), generators::hypercube(3)));
    let mut runs = 0;
    let mut subsets = 0;
    let mut failures = Vec::new();
    for (name, g) in &graphs {
        for n in 2..=4usize.min(g.vertex_count() - 1) {
            let profile = graph::expansion_profile(g, n, Budget(graph::DEFAULT_SET_BUDGET)).unwrap();
            let kappa = profile.kappa.unwrap();
            let epsilon = 0.9 * graph::robustness_threshold(kappa, g.max_degree());
            let r = graph::robustness_check(g, kappa, n, epsilon, 0).unwrap();
            runs += 1;
            subsets += r.subsets_checked;
            if r.mode != graph::RobustnessMode::Exhaustive || !r.counterexamples.is_empty() {
                failures.push(format!("{name} N={n}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} graphs, {runs} runs, {subsets} subsets checked exhaustively, counterexamples in: [{}]",
            graphs.len(),
            failures.join(", ")
        ),
    )
}

fn c8() -> Outcome {
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (name, g) in generators::small_corpus() {
        if g.vertex_count() > 10 {
            continue;
        }
        for n in 1..=g.vertex_count().min(6) {
            let p = graph::expansion_profile(&g, n, Budget(graph::DEFAULT_SET_BUDGET)).unwrap();
            let (cb, cs) = p.kappa_fraction.unwrap();
            let (ub, us) = common::unrestricted_expansion(&g, n);
            compared += 1;
            if cb * us != ub * cs {
                mismatches.push(format!("{name} N={n}: connected {cb}/{cs}, all {ub}/{us}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{compared} (graph, N) pairs, mismatches: [{}]", mismatches.join(", ")),
    )
}

fn c9() -> Outcome {
    let z2 = common::z(2);
    let bern = |p: f64| BernoulliProcess {
        group: z2,
        intensity: IntensitySpec::new(p).unwrap(),
        window_radius: 6,
    };
    let bvt = |p: f64| BvtProcess(BvtParams::new(z2, p, 50).unwrap());
    let seed = |i: u64| SeedSpec::new(9_000 + i, 0);
    let runs = [
        ("Bernoulli(0.3) diagonal", mtp_check(&bern(0.3), &Diagonal, 3, 20_000, seed(0))),
        ("Bernoulli(0.2) near point r=1", mtp_check(&bern(0.2), &NearPoint { radius: 1 }, 3, 20_000, seed(1))),
        ("Bernoulli(0.5) near point r=2", mtp_check(&bern(0.5), &NearPoint { radius: 2 }, 3, 20_000, seed(2))),
        (
            "Bernoulli(0.3) marked near point r=1",
            mtp_check(&bern(0.3), &MarkedNearPoint { radius: 1 }, 3, 20_000, seed(3)),
        ),
        ("BVT(0.2) cell share", mtp_check(&bvt(0.2), &VoronoiShare, 12, 5_000, seed(4))),
        ("BVT(0.5) cell share", mtp_check(&bvt(0.5), &VoronoiShare, 8, 5_000, seed(5))),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, r) in runs {
        let r = r.unwrap();
        pass &= r.agree_within_4se;
        let z = if r.difference.std_error > 0.0 {
            r.difference.value / r.difference.std_error
        } else {
            0.0
        };
        details.push(format!("{name}: in {:.4} out {:.4} ({z:.2} SE)", r.incoming.value, r.outgoing.value));
    }
    outcome(pass, details.join("; "))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_irelab"))
        .args(args)
        .output()
        .expect("run irelab");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c10(dir: &Path) -> Outcome {
    let c12 = dir.join("c12.txt");
    std::fs::write(&c12, generators::cycle(12).to_text()).unwrap();
    let k6 = dir.join("k6.txt");
    std::fs::write(&k6, generators::complete(6).to_text()).unwrap();
    let (c12s, k6s) = (c12.to_str().unwrap(), k6.to_str().unwrap());
    let nb_a = dir.join("nb_a.json");
    let nb_b = dir.join("nb_b.json");
    let (_, a) = run_cli(&["bvt", "nbhd", "--p", "0.3", "--samples", "2000", "--seed", "1"]);
    std::fs::write(&nb_a, a).unwrap();
    let (_, b) = run_cli(&["bvt", "nbhd", "--p", "0.35", "--samples", "2000", "--seed", "2"]);
    std::fs::write(&nb_b, b).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["fire-verify", "--group", "f:2", "--cell-set", "ball:1", "--delta", "0.2", "--samples", "20000", "--seed", "3"],
        vec!["fire-verify", "--group", "z:1", "--cell-set", "explicit:0,1", "--delta", "0.5", "--samples", "20000", "--oracle"],
        vec!["bvt", "sample", "--p", "0.3", "--samples", "50", "--seed", "4"],
        vec!["bvt", "intensity-check", "--p", "0.3", "--samples", "3000", "--seed", "5"],
        vec!["bvt", "histogram", "--p", "0.3", "--samples", "3000", "--seed", "6"],
        vec!["bvt", "histogram", "--p", "0.3", "--samples", "3000", "--seed", "6", "--format", "csv"],
        vec!["bvt", "nbhd", "--p", "0.3", "--samples", "3000", "--radius", "2", "--seed", "7"],
        vec!["graph", "hyperfinite", "--input", c12s, "--epsilon", "0.25", "--k", "4"],
        vec!["graph", "hyperfinite", "--input", c12s, "--epsilon", "0.25", "--k", "4", "--mode", "greedy"],
        vec!["graph", "expansion", "--input", k6s, "--N", "3"],
        vec!["graph", "robustness", "--input", k6s, "--kappa", "3", "--N", "3", "--epsilon", "0.15"],
        vec!["bs-distance", nb_a.to_str().unwrap(), nb_b.to_str().unwrap()],
    ];
    let mut bad = Vec::new();
    for cmd in &commands {
        let (c1, o1) = run_cli(cmd);
        let (c2, o2) = run_cli(cmd);
        let mut w1 = vec!["--workers", "1"];
        w1.extend(cmd);
        let mut w8 = vec!["--workers", "8"];
        w8.extend(cmd);
        let (c3, o3) = run_cli(&w1);
        let (c4, o4) = run_cli(&w8);
        let same = o1 == o2 && o1 == o3 && o1 == o4 && !o1.is_empty();
        if !same || c1 != 0 || [c2, c3, c4].iter().any(|&c| c != c1) {
            bad.push(cmd.join(" "));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} commands x 4 runs byte-identical; differing: [{}]", commands.len(), bad.join("; ")),
    )
}

fn c11() -> Outcome {
    use irelab::local::{collect_distribution, tv_distance};
    use irelab::voronoi::BvtSampler;
    let z2 = common::z(2);
    let sampler = |p: f64| BvtSampler(BvtParams::new(z2, p, 50).unwrap());
    let base = collect_distribution(&sampler(0.10), 2, 100_000, SeedSpec::new(11_000, 0)).unwrap();
    let mut tvs = Vec::new();
    for (i, q) in [0.20, 0.15, 0.11].into_iter().enumerate() {
        let other = collect_distribution(&sampler(q), 2, 100_000, SeedSpec::new(11_001 + i as u64, 0)).unwrap();
        tvs.push((q, tv_distance(&base, &other).unwrap()));
    }
    let monotone = tvs.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = tvs.last().unwrap().1;
    outcome(
        monotone && last < 0.1,
        tvs.iter().map(|(q, t)| format!("TV(0.10, {q}) = {t:.4}")).collect::<Vec<_>>().join(", "),
    )
}

fn main() {
    // Positional arguments filter like libtest: `c4 c9` runs just those.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<(&str, &str, Box<dyn Fn() -> Outcome>)> = vec![
        ("c1", "tiling bound (i), F_2 ball of radius 2", Box::new(|| bound_criterion(BoundId::I, 0.09))),
        ("c2", "tiling bound (ii), F_2 ball of radius 2", Box::new(|| bound_criterion(BoundId::Ii, 13.6))),
        ("c3", "tiling bound (iii), F_2 ball of radius 2", Box::new(|| bound_criterion(BoundId::Iii, 0.0256))),
        ("c4", "Monte Carlo vs exact law, A = {0,1} in Z", Box::new(c4)),
        ("c5", "Voronoi intensity identity on Z^2", Box::new(c5)),
        ("c6", "exact hyperfiniteness solver vs edge-subset enumeration", Box::new(c6)),
        ("c7", "robustness of expanders, exhaustive", Box::new(c7)),
        ("c8", "connected vs unrestricted expansion minimum", Box::new(c8)),
        ("c9", "mass transport, six process/function pairs", Box::new(c9)),
        ("c10", "CLI determinism across runs and worker counts", Box::new(move || c10(dir.path()))),
        ("c11", "neighborhood TV stability of Voronoi cells", Box::new(c11)),
    ];
    let mut failed = 0;
    for (key, title, f) in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == key || f == "acceptance") {
            continue;
        }
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {title}: {} [{:.1}s]",
            &key[1..],
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
