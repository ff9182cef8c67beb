//! Clustering of Dempster-Shafer evidence by metaconflict minimization.
//!
//! Pieces of evidence (simple support functions) are split into `r`
//! clusters so that the conflict inside each cluster is small. Three solvers
//! are provided: best-improvement hill climbing over single transfers
//! ([`iterative`]), a relaxation network over pairwise conflict weights
//! ([`neural`]) and the network followed by hill climbing ([`hybrid`]).

pub mod bench;
pub mod calibrate;
pub mod error;
pub mod evidence;
pub mod evidence_set;
pub mod hybrid;
pub mod iterative;
pub mod neural;
pub mod partition;
pub mod rng;

pub use error::{Error, Result};
pub use evidence::{
    brute_force_conflict, combine_conflict, make_evidence, pairwise_conflict, weight_of_conflict,
    BodyOfEvidence, FocalSet, Frame, SimpleEvidence,
};
pub use evidence_set::EvidenceSet;
pub use hybrid::{run_hybrid, run_single, Method, Phase, RunOptions, RunReport, TracePoint};
pub use iterative::{best_move, optimize, MoveTrace};
pub use neural::{build_network, decode, init_state, Network, NetworkParams, NetworkState};
pub use partition::{
    brute_force_min_mcf, evaluate_transfer, log_sum_objective, metaconflict, Partition, TransferDelta,
};
