//! Best-improvement hill climbing over single-evidence transfers.

use serde::{Deserialize, Serialize};

use crate::evidence::SimpleEvidence;
use crate::partition::{evaluate_transfer, metaconflict, Partition, TransferDelta};

/// One applied transfer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub iteration: usize,
    pub evidence_id: usize,
    pub from_cluster: usize,
    pub to_cluster: usize,
    pub mcf_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub initial_mcf: f64,
    pub steps: Vec<MoveRecord>,
    /// Set when the move budget ran out while a favorable move remained.
    pub budget_exhausted: bool,
}

impl MoveTrace {
    pub fn final_mcf(&self) -> f64 {
        self.steps.last().map_or(self.initial_mcf, |s| s.mcf_after)
    }

    /// True when the run stopped at a local minimum.
    pub fn converged(&self) -> bool {
        !self.budget_exhausted
    }
}

/// Default move budget `10 * N * r`.
pub fn default_move_budget(n_evidence: usize, r: usize) -> usize {
    10 * n_evidence * r
}

/// The favorable transfer with the smallest resulting metaconflict, scanning
/// evidence ids then target clusters in ascending order (first minimum wins).
pub fn best_move(partition: &Partition, evidence: &[SimpleEvidence]) -> Option<TransferDelta> {
    let mut best: Option<TransferDelta> = None;
    for q in 0..evidence.len() {
        let from = partition.cluster_of(q);
        for k in (0..partition.r()).filter(|&k| k != from) {
            let delta = evaluate_transfer(partition, evidence, q, k).expect("k differs from source");
            if delta.favorable && best.as_ref().is_none_or(|b| delta.new_mcf < b.new_mcf) {
                best = Some(delta);
            }
        }
    }
    best
}

/// Applies [`best_move`] until none remains or `max_moves` transfers were made.
pub fn optimize(
    mut partition: Partition,
    evidence: &[SimpleEvidence],
    max_moves: usize,
) -> (Partition, MoveTrace) {
    let mut trace = MoveTrace {
        initial_mcf: metaconflict(&partition),
        steps: Vec::new(),
        budget_exhausted: false,
    };
    while let Some(delta) = best_move(&partition, evidence) {
        if trace.steps.len() == max_moves {
            trace.budget_exhausted = true;
            break;
        }
        partition.apply(&delta);
        trace.steps.push(MoveRecord {
            iteration: trace.steps.len() + 1,
            evidence_id: delta.evidence_id,
            from_cluster: delta.from_cluster,
            to_cluster: delta.to_cluster,
            mcf_after: delta.new_mcf,
        });
    }
    (partition, trace)
}
