//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Every criterion uses the same fixed seed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dscluster::bench::{gen_exhaustive, gen_random, run_experiment, Experiment, ProblemSpec};
use dscluster::hybrid::Phase;
use dscluster::iterative::best_move;
use dscluster::neural::DEFAULT_PARAMS;
use dscluster::partition::{lowest_element_assignment, IMPROVEMENT_TOL};
use dscluster::rng::{derive_seed, rng_from_seed};
use dscluster::{
    brute_force_conflict, brute_force_min_mcf, combine_conflict, make_evidence, metaconflict, run_single,
    FocalSet, Method, Partition, RunOptions, RunReport,
};
use rand::Rng;

const SEED: u64 = 2026;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let took = start.elapsed();
    (took < limit, format!("{:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let frame = rng.gen_range(1..=6u32);
        let n = rng.gen_range(0..=10);
        let list: Vec<_> = (0..n)
            .map(|id| {
                let bits = rng.gen_range(1..(1u32 << frame)) as u16;
                make_evidence(FocalSet::from_bits(bits), rng.gen_range(0.01..0.99), id).unwrap()
            })
            .collect();
        worst = worst.max((combine_conflict(&list) - brute_force_conflict(&list).unwrap()).abs());
    }
    let (fast, time) = within(Duration::from_secs(5), start);
    outcome(
        worst <= 1e-12 && fast,
        format!("200 lists, max |fold - enumeration| = {worst:.3e} (tol 1e-12), {time}"),
    )
}

fn zero_certificates() -> Outcome {
    let mut rng = rng_from_seed(SEED);
    let mut values = Vec::new();
    for r in 3..=6 {
        let e = gen_exhaustive(r, &mut rng).unwrap();
        let p = Partition::new(&e, lowest_element_assignment(&e, r), r).unwrap();
        values.push((format!("exhaustive r={r}"), metaconflict(&p)));
    }
    for m in [50, 60, 70] {
        let e = gen_random(6, m, &mut rng).unwrap();
        let p = Partition::new(&e, lowest_element_assignment(&e, 6), 6).unwrap();
        values.push((format!("random frame 6 M={m}"), metaconflict(&p)));
    }
    let bad: Vec<_> = values.iter().filter(|(_, v)| *v != 0.0).collect();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} lowest-element partitions all have Mcf = 0 exactly", values.len())
        } else {
            format!("nonzero: {bad:?}")
        },
    )
}

fn brute_force_agreement() -> Outcome {
    let start = Instant::now();
    let spec = ProblemSpec::exhaustive(3, SEED).unwrap();
    let e = spec.instance(0).unwrap().evidence;
    let (_, optimum) = brute_force_min_mcf(&e, 3).unwrap();
    let best = |method: Method| {
        (0..10)
            .map(|k| {
                let seed = derive_seed(SEED, k, method.stream());
                run_single(method, &e, 3, &DEFAULT_PARAMS, seed, &RunOptions::default())
                    .unwrap()
                    .final_mcf
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (iterative, hybrid) = (best(Method::Iterative), best(Method::Hybrid));
    let (fast, time) = within(Duration::from_secs(60), start);
    outcome(
        optimum == 0.0 && iterative == 0.0 && hybrid == 0.0 && fast,
        format!("brute force {optimum}, iterative best-of-10 {iterative}, hybrid best-of-10 {hybrid}, {time}"),
    )
}

fn mean_of(exp: &Experiment, method: Method) -> f64 {
    exp.report.methods.iter().find(|a| a.method == method).unwrap().mean_mcf
}

fn mean_moves(exp: &Experiment, method: Method) -> f64 {
    let runs: Vec<_> = exp.runs.iter().filter(|r| r.method == method).collect();
    runs.iter().map(|r| r.iterative_moves as f64).sum::<f64>() / runs.len() as f64
}

fn method_ordering(experiments: &[(usize, Experiment)], elapsed: Duration) -> Outcome {
    let mut pass = elapsed < Duration::from_secs(600);
    let mut parts = Vec::new();
    for (r, exp) in experiments {
        let (n, i, h) = (
            mean_of(exp, Method::Neural),
            mean_of(exp, Method::Iterative),
            mean_of(exp, Method::Hybrid),
        );
        let ok = h <= i + 0.01 && (n <= 0.02 || h < n);
        pass &= ok;
        parts.push(format!(
            "r={r}: neural {n:.4} iterative {i:.4} hybrid {h:.4} [{}]",
            if ok { "ok" } else { "violated" }
        ));
    }
    parts.push(format!("{:.2}s (limit 600s)", elapsed.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

fn warm_start(experiments: &[(usize, Experiment)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, exp) in experiments {
        let (h, i) = (mean_moves(exp, Method::Hybrid), mean_moves(exp, Method::Iterative));
        pass &= h < i;
        parts.push(format!("r={r}: hybrid moves {h:.1} vs cold-start {i:.1}"));
    }
    outcome(pass, parts.join("; "))
}

// Returns a description of the first violation.
fn check_climb(report: &RunReport, evidence: &[dscluster::SimpleEvidence]) -> Option<String> {
    let climb: Vec<f64> = report
        .mcf_trace
        .iter()
        .filter(|p| p.phase == Phase::Iterative)
        .map(|p| p.mcf)
        .collect();
    let mut prev = report.decode_mcf.unwrap_or(f64::INFINITY);
    for &m in &climb {
        if m.is_nan() || m >= prev - IMPROVEMENT_TOL {
            return Some(format!("{} seed {}: trace not strictly decreasing", report.method, report.seed));
        }
        prev = m;
    }
    if report.iterative_converged == Some(true) {
        let p = Partition::new(evidence, report.final_partition.assignment.clone(), report.problem.r).unwrap();
        if best_move(&p, evidence).is_some() {
            return Some(format!("{} seed {}: favorable move left at termination", report.method, report.seed));
        }
    }
    None
}

fn hill_climb_soundness(experiments: &[(usize, Experiment)]) -> Outcome {
    let mut checked = 0;
    let mut rescans = 0;
    let mut violations = Vec::new();
    for (r, exp) in experiments {
        let spec = ProblemSpec::exhaustive(*r, SEED).unwrap();
        for run in exp.runs.iter().filter(|x| x.method != Method::Neural) {
            let e = spec.instance_from_seed(run.problem.instance_seed.unwrap()).unwrap().evidence;
            checked += 1;
            rescans += usize::from(run.iterative_converged == Some(true));
            violations.extend(check_climb(run, &e));
        }
    }
    outcome(
        violations.is_empty() && checked > 0,
        if violations.is_empty() {
            format!("{checked} traces strictly decreasing, {rescans} terminal re-scans found no favorable move")
        } else {
            violations.join("; ")
        },
    )
}

fn neural_behavior() -> Outcome {
    let spec = ProblemSpec::exhaustive(3, SEED).unwrap();
    let mut crisp = 0;
    let mut repaired = 0;
    let mut rises = 0;
    let opts = RunOptions {
        trace: true,
        ..RunOptions::default()
    };
    for k in 0..50 {
        let e = spec.instance(k).unwrap().evidence;
        let seed = derive_seed(SEED, k as u64, Method::Neural.stream());
        let neural = run_single(Method::Neural, &e, 3, &DEFAULT_PARAMS, seed, &opts).unwrap();
        // same seed, so the hybrid's network phase is this exact run
        let hybrid = run_single(Method::Hybrid, &e, 3, &DEFAULT_PARAMS, seed, &opts).unwrap();
        crisp += usize::from(neural.crisp == Some(true));
        repaired += usize::from(hybrid.final_mcf <= neural.final_mcf);
        rises += usize::from(neural.mcf_trace.windows(2).any(|w| w[1].mcf > w[0].mcf));
    }
    outcome(
        crisp >= 40 && repaired == 50,
        format!("{crisp}/50 crisp (need 40), hybrid <= neural decode on {repaired}/50, {rises} network traces rose at some step"),
    )
}

fn run_cli(args: &[&str], dir: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_dscluster"))
        .args(args)
        .current_dir(dir)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn cli_outputs(dir: &Path, jobs: &str) -> Option<Vec<(String, Vec<u8>)>> {
    let seed = SEED.to_string();
    let calls: [&[&str]; 6] = [
        &["gen", "--family", "exhaustive", "--clusters", "4", "--seed", &seed, "--out", "p.json"],
        &["gen", "--family", "random", "--frame", "6", "--size", "50", "--seed", &seed, "--out", "q.json"],
        &["run", "--method", "hybrid", "--in", "p.json", "--clusters", "4", "--seed", &seed, "--trace", "--out", "run.json"],
        &["trace", "--method", "hybrid", "--in", "p.json", "--clusters", "4", "--seed", &seed, "--out", "trace.csv"],
        &["bench", "--sizes", "3,4", "--repeats", "3", "--seed", &seed, "--jobs", jobs, "--out", "bench.csv"],
        &["bench", "--family", "random", "--sizes", "50", "--repeats", "2", "--seed", &seed, "--format", "json", "--jobs", jobs, "--out", "bench.json"],
    ];
    for args in calls {
        if !run_cli(args, dir) {
            return None;
        }
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .ok()?
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    Some(files)
}

fn determinism() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let outputs: Vec<_> = dirs
        .iter()
        .zip(["1", "1", "4"])
        .map(|(d, jobs)| cli_outputs(d.path(), jobs))
        .collect();
    match (&outputs[0], &outputs[1], &outputs[2]) {
        (Some(a), Some(b), Some(c)) => {
            let same = a == b && a == c;
            let names: Vec<_> = a.iter().map(|(n, _)| n.as_str()).collect();
            outcome(
                same && a.len() == 8,
                format!(
                    "{} files byte-identical across 3 invocations (jobs 1, 1, 4): {}",
                    a.len(),
                    if same { names.join(", ") } else { "MISMATCH".into() }
                ),
            )
        }
        _ => outcome(false, "a CLI invocation failed".into()),
    }
}

fn main() {
    let mut results = vec![
        (1, "oracle equivalence", oracle_equivalence()),
        (2, "zero-minimum certificates", zero_certificates()),
        (3, "brute-force agreement", brute_force_agreement()),
    ];

    let start = Instant::now();
    let methods = [Method::Neural, Method::Iterative, Method::Hybrid];
    let experiments: Vec<(usize, Experiment)> = [4, 5]
        .iter()
        .map(|&r| {
            let spec = ProblemSpec::exhaustive(r, SEED).unwrap();
            (r, run_experiment(&spec, &methods, 10, &DEFAULT_PARAMS, &RunOptions::default(), 1).unwrap())
        })
        .collect();
    let elapsed = start.elapsed();
    results.push((4, "method ordering", method_ordering(&experiments, elapsed)));
    results.push((5, "warm-start effect", warm_start(&experiments)));
    results.push((6, "hill-climb soundness", hill_climb_soundness(&experiments)));
    results.push((7, "neural behavior class", neural_behavior()));
    results.push((8, "determinism", determinism()));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("criterion {n} {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
