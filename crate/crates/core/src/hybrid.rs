//! The three solvers behind one entry point, and the per-run report.
//!
//! The hybrid runs the network to convergence, decodes the final state and
//! hands that partition to the hill climber.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::SimpleEvidence;
use crate::iterative::{default_move_budget, optimize, MoveTrace};
use crate::neural::{build_network, decode, Decoded, NetworkParams};
use crate::partition::{metaconflict, Partition, PartitionRecord};
use crate::rng::{rng_from_seed, SolverRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neural,
    Iterative,
    Hybrid,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Neural, Method::Iterative, Method::Hybrid];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Neural => "neural",
            Method::Iterative => "iterative",
            Method::Hybrid => "hybrid",
        }
    }

    /// Fixed stream index for seed derivation.
    pub fn stream(&self) -> u64 {
        match self {
            Method::Neural => 1,
            Method::Iterative => 2,
            Method::Hybrid => 3,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neural" => Ok(Method::Neural),
            "iterative" => Ok(Method::Iterative),
            "hybrid" => Ok(Method::Hybrid),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Neural,
    Iterative,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Neural => "neural",
            Phase::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub phase: Phase,
    pub iteration: usize,
    pub mcf: f64,
}

/// What was solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescriptor {
    pub family: String,
    pub frame_size: usize,
    pub n_evidence: usize,
    pub r: usize,
    pub instance_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub seed: u64,
    pub problem: ProblemDescriptor,
    pub final_mcf: f64,
    pub final_partition: PartitionRecord,
    pub neural_iterations: usize,
    pub iterative_moves: usize,
    pub mcf_trace: Vec<TracePoint>,
    /// Seconds; only filled when timing was requested.
    pub wall_time: Option<f64>,
    pub neural_converged: Option<bool>,
    pub iterative_converged: Option<bool>,
    /// Crispness of the network decode.
    pub crispness: Option<f64>,
    /// The network converged to a crisp one-hot decode.
    pub crisp: Option<bool>,
    /// Metaconflict of the network decode before any repair.
    pub decode_mcf: Option<f64>,
}

impl RunReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Total iterations across both phases.
    pub fn total_iterations(&self) -> usize {
        self.neural_iterations + self.iterative_moves
    }
}

/// Knobs that do not change the optimization itself.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record the hard-decode metaconflict at every network iteration.
    pub trace: bool,
    /// Measure wall time. Reports are no longer byte-reproducible.
    pub timing: bool,
    /// Move budget; `10 * N * r` when absent.
    pub max_moves: Option<usize>,
    /// Start the hill climber here instead of a random assignment.
    pub initial_assignment: Option<Vec<usize>>,
}

struct NeuralPhase {
    decoded: Decoded,
    iterations: usize,
    converged: bool,
    trace: Vec<TracePoint>,
}

fn neural_phase(
    evidence: &[SimpleEvidence],
    r: usize,
    params: &NetworkParams,
    rng: &mut SolverRng,
    trace: bool,
) -> Result<NeuralPhase> {
    let network = build_network(evidence, r, *params)?;
    let start = network.init_state(rng);
    let mut points = Vec::new();
    let run = network.run_to_convergence_with(start, |state| {
        if trace {
            let assignment = decode(state).assignment;
            let mcf = Partition::new(evidence, assignment, r)
                .map(|p| metaconflict(&p))
                .expect("decode yields a valid assignment");
            points.push(TracePoint {
                phase: Phase::Neural,
                iteration: state.iteration(),
                mcf,
            });
        }
    });
    Ok(NeuralPhase {
        decoded: decode(&run.state),
        iterations: run.iterations,
        converged: run.converged,
        trace: points,
    })
}

fn iterative_phase(
    start: Partition,
    evidence: &[SimpleEvidence],
    budget: usize,
    offset: usize,
    trace: &mut Vec<TracePoint>,
) -> (Partition, MoveTrace) {
    let (partition, moves) = optimize(start, evidence, budget);
    trace.extend(moves.steps.iter().map(|s| TracePoint {
        phase: Phase::Iterative,
        iteration: offset + s.iteration,
        mcf: s.mcf_after,
    }));
    (partition, moves)
}

fn covering_frame(evidence: &[SimpleEvidence]) -> usize {
    let union = evidence.iter().fold(0u16, |acc, e| acc | e.focal.bits());
    (16 - union.leading_zeros()) as usize
}

/// Runs one solver. The seed drives network noise or the cold-start
/// assignment; the rest is deterministic.
pub fn run_single(
    method: Method,
    evidence: &[SimpleEvidence],
    r: usize,
    params: &NetworkParams,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunReport> {
    if r == 0 {
        return Err(Error::InvalidPartition("r must be at least 1".into()));
    }
    let started = Instant::now();
    let mut rng = rng_from_seed(seed);
    let budget = opts
        .max_moves
        .unwrap_or_else(|| default_move_budget(evidence.len(), r));
    let mut trace = Vec::new();

    let mut report = RunReport {
        method,
        seed,
        problem: ProblemDescriptor {
            family: "file".into(),
            frame_size: covering_frame(evidence),
            n_evidence: evidence.len(),
            r,
            instance_seed: None,
        },
        final_mcf: 0.0,
        final_partition: PartitionRecord {
            r,
            assignment: Vec::new(),
            mcf: 0.0,
            conflicts: Vec::new(),
        },
        neural_iterations: 0,
        iterative_moves: 0,
        mcf_trace: Vec::new(),
        wall_time: None,
        neural_converged: None,
        iterative_converged: None,
        crispness: None,
        crisp: None,
        decode_mcf: None,
    };

    let final_partition = match method {
        Method::Iterative => {
            let assignment = match &opts.initial_assignment {
                Some(a) => a.clone(),
                None => (0..evidence.len()).map(|_| rng.gen_range(0..r)).collect(),
            };
            let start = Partition::new(evidence, assignment, r)?;
            trace.push(TracePoint {
                phase: Phase::Iterative,
                iteration: 0,
                mcf: metaconflict(&start),
            });
            let (partition, moves) = iterative_phase(start, evidence, budget, 0, &mut trace);
            report.iterative_moves = moves.steps.len();
            report.iterative_converged = Some(moves.converged());
            partition
        }
        Method::Neural | Method::Hybrid => {
            let neural = neural_phase(evidence, r, params, &mut rng, opts.trace)?;
            trace.extend(neural.trace);
            report.neural_iterations = neural.iterations;
            report.neural_converged = Some(neural.converged);
            report.crispness = Some(neural.decoded.crispness);
            report.crisp = Some(neural.converged && neural.decoded.is_crisp());
            let decoded = Partition::new(evidence, neural.decoded.assignment, r)?;
            report.decode_mcf = Some(metaconflict(&decoded));
            if method == Method::Hybrid {
                let (partition, moves) =
                    iterative_phase(decoded, evidence, budget, neural.iterations, &mut trace);
                report.iterative_moves = moves.steps.len();
                report.iterative_converged = Some(moves.converged());
                partition
            } else {
                decoded
            }
        }
    };

    report.final_mcf = metaconflict(&final_partition);
    report.final_partition = final_partition.to_record();
    report.mcf_trace = trace;
    if opts.timing {
        report.wall_time = Some(started.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Network to convergence, then hill climbing from its decode.
pub fn run_hybrid(
    evidence: &[SimpleEvidence],
    r: usize,
    params: &NetworkParams,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunReport> {
    run_single(Method::Hybrid, evidence, r, params, seed, opts)
}
