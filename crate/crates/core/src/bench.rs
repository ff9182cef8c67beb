//! Problem generators, repeated seeded experiments and their aggregates.
//!
//! Two families are generated. `exhaustive` places one piece of evidence on
//! every nonempty subset of a frame of size `r`; `random` draws focal sets
//! uniformly from the nonempty subsets. Both always admit a zero-metaconflict
//! partition (cluster by smallest focal element), which makes the optimum
//! known.
//!
//! Every repeat generates a fresh instance and runs each method on the same
//! instance, with sub-streams `(seed, repeat, method)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{make_evidence, FocalSet, Frame, SimpleEvidence, MAX_FRAME_SIZE};
use crate::evidence_set::EvidenceSet;
use crate::hybrid::{run_single, Method, ProblemDescriptor, RunOptions, RunReport};
use crate::neural::NetworkParams;
use crate::rng::{derive_seed, rng_from_seed};

/// Masses are drawn uniformly from this range.
pub const MASS_RANGE: std::ops::Range<f64> = 0.01..0.99;

/// Stream index reserved for instance generation.
const INSTANCE_STREAM: u64 = 0;

/// Definitions printed with every report.
pub const METRIC_NOTES: &str = "conflict_per_cluster = mean over runs of sum(c_i)/r; \
conflict_per_evidence = mean over runs of sum(c_i)/M; \
iterations = network iterations + moves (moves only for iterative); \
delta_iterations = hybrid moves after the network converged";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exhaustive,
    Random,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Exhaustive => "exhaustive",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Family::Exhaustive),
            "random" => Ok(Family::Random),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub n_clusters: usize,
    pub n_evidence: usize,
    pub frame_size: usize,
    pub seed: u64,
}

impl ProblemSpec {
    /// `2^r - 1` pieces of evidence into `r` clusters.
    pub fn exhaustive(r: usize, seed: u64) -> Result<Self> {
        check_exhaustive_size(r)?;
        Ok(Self {
            family: Family::Exhaustive,
            n_clusters: r,
            n_evidence: (1 << r) - 1,
            frame_size: r,
            seed,
        })
    }

    pub fn random(frame_size: usize, r: usize, n_evidence: usize, seed: u64) -> Result<Self> {
        check_random_size(frame_size, n_evidence)?;
        if r == 0 {
            return Err(Error::BadSize("r must be at least 1".into()));
        }
        Ok(Self {
            family: Family::Random,
            n_clusters: r,
            n_evidence,
            frame_size,
            seed,
        })
    }

    /// Seed of the instance used in `repeat`.
    pub fn instance_seed(&self, repeat: usize) -> u64 {
        derive_seed(self.seed, repeat as u64, INSTANCE_STREAM)
    }

    /// Instance for `repeat`.
    pub fn instance(&self, repeat: usize) -> Result<EvidenceSet> {
        self.instance_from_seed(self.instance_seed(repeat))
    }

    pub fn instance_from_seed(&self, seed: u64) -> Result<EvidenceSet> {
        let mut rng = rng_from_seed(seed);
        let evidence = match self.family {
            Family::Exhaustive => gen_exhaustive(self.n_clusters, &mut rng)?,
            Family::Random => gen_random(self.frame_size, self.n_evidence, &mut rng)?,
        };
        EvidenceSet::new(Frame::new(self.frame_size)?, evidence)
    }

    pub fn descriptor(&self, instance_seed: u64) -> ProblemDescriptor {
        ProblemDescriptor {
            family: self.family.as_str().to_string(),
            frame_size: self.frame_size,
            n_evidence: self.n_evidence,
            r: self.n_clusters,
            instance_seed: Some(instance_seed),
        }
    }
}

fn check_exhaustive_size(r: usize) -> Result<()> {
    if (2..=8).contains(&r) {
        Ok(())
    } else {
        Err(Error::BadSize(format!("exhaustive family needs 2 <= r <= 8, got {r}")))
    }
}

fn check_random_size(frame_size: usize, n_evidence: usize) -> Result<()> {
    if !(2..=MAX_FRAME_SIZE).contains(&frame_size) {
        return Err(Error::BadSize(format!(
            "random family needs 2 <= frame size <= {MAX_FRAME_SIZE}, got {frame_size}"
        )));
    }
    if n_evidence == 0 {
        return Err(Error::BadSize("random family needs at least one piece of evidence".into()));
    }
    Ok(())
}

/// One piece of evidence per nonempty subset of `{1..r}`, ascending by bitmask.
pub fn gen_exhaustive<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Vec<SimpleEvidence>> {
    check_exhaustive_size(r)?;
    (1u16..(1u16 << r))
        .enumerate()
        .map(|(id, bits)| make_evidence(FocalSet::from_bits(bits), rng.gen_range(MASS_RANGE), id))
        .collect()
}

/// `n_evidence` focal sets drawn uniformly (with repetition) from the
/// nonempty subsets of the frame.
pub fn gen_random<R: Rng + ?Sized>(
    frame_size: usize,
    n_evidence: usize,
    rng: &mut R,
) -> Result<Vec<SimpleEvidence>> {
    check_random_size(frame_size, n_evidence)?;
    let subsets = 1u32 << frame_size;
    (0..n_evidence)
        .map(|id| {
            let bits = rng.gen_range(1..subsets) as u16;
            let mass = rng.gen_range(MASS_RANGE);
            make_evidence(FocalSet::from_bits(bits), mass, id)
        })
        .collect()
}

/// A (repeat, method) cell that errored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub repeat: usize,
    pub method: Method,
    pub error: String,
}

/// Aggregates of one method over all repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: Method,
    pub runs: usize,
    pub best_mcf: f64,
    pub mean_mcf: f64,
    pub conflict_per_cluster: f64,
    pub conflict_per_evidence: f64,
    pub mean_iterations: f64,
    pub sd_iterations: f64,
    /// Hybrid only.
    pub mean_delta_iterations: Option<f64>,
    /// Runs whose final metaconflict is zero.
    pub optimum_hits: usize,
    /// Network methods only.
    pub crisp_rate: Option<f64>,
    pub mean_wall_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ProblemSpec,
    pub repeats: usize,
    pub methods: Vec<MethodAggregate>,
    pub failures: Vec<CellFailure>,
    pub notes: String,
}

/// Aggregated report plus the raw runs it was computed from, sorted by
/// (repeat, method).
#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: ExperimentReport,
    pub runs: Vec<RunReport>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn aggregate_method(method: Method, runs: &[&RunReport]) -> MethodAggregate {
    let mcf: Vec<f64> = runs.iter().map(|r| r.final_mcf).collect();
    let per_cluster: Vec<f64> = runs
        .iter()
        .map(|r| r.final_partition.conflicts.iter().sum::<f64>() / r.problem.r as f64)
        .collect();
    let per_evidence: Vec<f64> = runs
        .iter()
        .map(|r| r.final_partition.conflicts.iter().sum::<f64>() / r.problem.n_evidence.max(1) as f64)
        .collect();
    let iterations: Vec<f64> = runs.iter().map(|r| r.total_iterations() as f64).collect();
    let deltas: Vec<f64> = runs.iter().map(|r| r.iterative_moves as f64).collect();
    let crisp: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.crisp)
        .map(|c| if c { 1.0 } else { 0.0 })
        .collect();
    let walls: Option<Vec<f64>> = runs.iter().map(|r| r.wall_time).collect();
    let nonempty = !runs.is_empty();
    MethodAggregate {
        method,
        runs: runs.len(),
        best_mcf: mcf.iter().copied().fold(f64::INFINITY, f64::min),
        mean_mcf: mean(&mcf),
        conflict_per_cluster: mean(&per_cluster),
        conflict_per_evidence: mean(&per_evidence),
        mean_iterations: mean(&iterations),
        sd_iterations: sample_sd(&iterations),
        mean_delta_iterations: (method == Method::Hybrid && nonempty).then(|| mean(&deltas)),
        optimum_hits: mcf.iter().filter(|&&m| m == 0.0).count(),
        crisp_rate: (!crisp.is_empty()).then(|| mean(&crisp)),
        mean_wall_time: walls.filter(|w| !w.is_empty()).map(|w| mean(&w)),
    }
}

/// Aggregates runs per method. Methods appear in the order given.
pub fn aggregate(
    spec: &ProblemSpec,
    methods: &[Method],
    repeats: usize,
    runs: &[RunReport],
    failures: Vec<CellFailure>,
) -> ExperimentReport {
    let methods = methods
        .iter()
        .map(|&m| {
            let mine: Vec<&RunReport> = runs.iter().filter(|r| r.method == m).collect();
            aggregate_method(m, &mine)
        })
        .collect();
    ExperimentReport {
        spec: spec.clone(),
        repeats,
        methods,
        failures,
        notes: METRIC_NOTES.to_string(),
    }
}

/// Runs every requested method on `repeats` fresh instances. `jobs > 1`
/// spreads cells over a thread pool; results do not depend on it.
pub fn run_experiment(
    spec: &ProblemSpec,
    methods: &[Method],
    repeats: usize,
    params: &NetworkParams,
    opts: &RunOptions,
    jobs: usize,
) -> Result<Experiment> {
    if repeats == 0 {
        return Err(Error::BadSize("repeats must be at least 1".into()));
    }
    let mut methods: Vec<Method> = methods.to_vec();
    methods.dedup();
    let instances: Vec<(u64, EvidenceSet)> = (0..repeats)
        .map(|k| {
            let seed = spec.instance_seed(k);
            spec.instance_from_seed(seed).map(|set| (seed, set))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, Method)> = (0..repeats)
        .flat_map(|k| methods.iter().map(move |&m| (k, m)))
        .collect();
    let run_cell = |&(k, m): &(usize, Method)| -> std::result::Result<RunReport, CellFailure> {
        let (instance_seed, set) = &instances[k];
        let seed = derive_seed(spec.seed, k as u64, m.stream());
        run_single(m, &set.evidence, spec.n_clusters, params, seed, opts)
            .map(|mut report| {
                report.problem = spec.descriptor(*instance_seed);
                report
            })
            .map_err(|e| CellFailure {
                repeat: k,
                method: m,
                error: e.to_string(),
            })
    };
    let outcomes: Vec<_> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::BadSize(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(run_cell).collect())
    } else {
        cells.iter().map(run_cell).collect()
    };

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => runs.push(r),
            Err(f) => failures.push(f),
        }
    }
    let report = aggregate(spec, &methods, repeats, &runs, failures);
    Ok(Experiment { report, runs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub const CSV_HEADER: &str = "family,r,M,method,metric,value,repeats,seed";

fn metric_rows(agg: &MethodAggregate) -> Vec<(&'static str, f64)> {
    let mut rows = vec![
        ("runs", agg.runs as f64),
        ("best_mcf", agg.best_mcf),
        ("mean_mcf", agg.mean_mcf),
        ("conflict_per_cluster", agg.conflict_per_cluster),
        ("conflict_per_evidence", agg.conflict_per_evidence),
        ("mean_iterations", agg.mean_iterations),
        ("sd_iterations", agg.sd_iterations),
        ("optimum_hits", agg.optimum_hits as f64),
    ];
    if let Some(d) = agg.mean_delta_iterations {
        rows.push(("mean_delta_iterations", d));
    }
    if let Some(c) = agg.crisp_rate {
        rows.push(("crisp_rate", c));
    }
    if let Some(w) = agg.mean_wall_time {
        rows.push(("mean_wall_time", w));
    }
    rows
}

/// Long-format CSV of one or more experiments.
pub fn reports_to_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for report in reports {
        let spec = &report.spec;
        for agg in &report.methods {
            for (metric, value) in metric_rows(agg) {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    spec.family, spec.n_clusters, spec.n_evidence, agg.method, metric, value, report.repeats, spec.seed
                ));
            }
        }
    }
    out
}

/// Renders one or more experiments. JSON output is an array of reports.
pub fn emit_reports(reports: &[ExperimentReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => reports_to_csv(reports),
        ReportFormat::Json => serde_json::to_string_pretty(reports).expect("report serializes"),
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => reports_to_csv(std::slice::from_ref(report)),
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report serializes"),
    }
}

pub fn parse_report(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}
