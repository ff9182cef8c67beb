//! Partitions of the evidence into clusters and the metaconflict criterion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{combine_conflict_iter, weight_of_conflict, SimpleEvidence};

/// Tolerance for strict improvement of metaconflict.
pub const IMPROVEMENT_TOL: f64 = 1e-12;

/// Largest search space accepted by [`brute_force_min_mcf`].
pub const BRUTE_FORCE_MAX_ASSIGNMENTS: u64 = 10_000_000;

/// Assignment of every piece of evidence to one of `r` clusters, with the
/// per-cluster conflicts cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    r: usize,
    conflicts: Vec<f64>,
    domain_conflict: f64,
}

/// Serialized form of a partition as embedded in run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub r: usize,
    pub assignment: Vec<usize>,
    pub mcf: f64,
    pub conflicts: Vec<f64>,
}

/// Conflict of the evidence currently assigned to `cluster`.
pub fn cluster_conflict(evidence: &[SimpleEvidence], assignment: &[usize], cluster: usize) -> f64 {
    combine_conflict_iter(
        evidence
            .iter()
            .zip(assignment)
            .filter(move |(_, &a)| a == cluster)
            .map(|(e, _)| e),
    )
}

fn mcf_from(domain_conflict: f64, conflicts: impl Iterator<Item = f64>) -> f64 {
    1.0 - (1.0 - domain_conflict) * conflicts.map(|c| 1.0 - c).product::<f64>()
}

impl Partition {
    /// Builds a partition with zero domain conflict.
    pub fn new(evidence: &[SimpleEvidence], assignment: Vec<usize>, r: usize) -> Result<Self> {
        Self::with_domain_conflict(evidence, assignment, r, 0.0)
    }

    pub fn with_domain_conflict(
        evidence: &[SimpleEvidence],
        assignment: Vec<usize>,
        r: usize,
        domain_conflict: f64,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidPartition("r must be at least 1".into()));
        }
        if assignment.len() != evidence.len() {
            return Err(Error::InvalidPartition(format!(
                "{} assignments for {} pieces of evidence",
                assignment.len(),
                evidence.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= r) {
            return Err(Error::InvalidPartition(format!("cluster {bad} >= r = {r}")));
        }
        if !(0.0..1.0).contains(&domain_conflict) {
            return Err(Error::ConflictAtOne(domain_conflict));
        }
        let conflicts = (0..r)
            .map(|i| cluster_conflict(evidence, &assignment, i))
            .collect();
        Ok(Self {
            assignment,
            r,
            conflicts,
            domain_conflict,
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn conflicts(&self) -> &[f64] {
        &self.conflicts
    }

    pub fn domain_conflict(&self) -> f64 {
        self.domain_conflict
    }

    pub fn cluster_of(&self, q: usize) -> usize {
        self.assignment[q]
    }

    /// Members of a cluster in ascending id order.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&q| self.assignment[q] == cluster)
            .collect()
    }

    /// Largest deviation between the cache and a from-scratch recomputation.
    pub fn cache_error(&self, evidence: &[SimpleEvidence]) -> f64 {
        (0..self.r)
            .map(|i| (cluster_conflict(evidence, &self.assignment, i) - self.conflicts[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Moves evidence `q` using the conflicts already computed in `delta`.
    pub fn apply(&mut self, delta: &TransferDelta) {
        debug_assert_eq!(self.assignment[delta.evidence_id], delta.from_cluster);
        self.assignment[delta.evidence_id] = delta.to_cluster;
        self.conflicts[delta.from_cluster] = delta.new_from_conflict;
        self.conflicts[delta.to_cluster] = delta.new_to_conflict;
    }

    pub fn to_record(&self) -> PartitionRecord {
        PartitionRecord {
            r: self.r,
            assignment: self.assignment.clone(),
            mcf: metaconflict(self),
            conflicts: self.conflicts.clone(),
        }
    }
}

/// `1 - (1 - c0) * prod_i (1 - c_i)`.
pub fn metaconflict(partition: &Partition) -> f64 {
    mcf_from(partition.domain_conflict, partition.conflicts.iter().copied())
}

/// `sum_i -ln(1 - c_i)`; argmin-equivalent to metaconflict when `c0 = 0`.
pub fn log_sum_objective(partition: &Partition) -> Result<f64> {
    if partition.domain_conflict != 0.0 {
        return Err(Error::DomainConflictUnsupported(partition.domain_conflict));
    }
    partition
        .conflicts
        .iter()
        .map(|&c| weight_of_conflict(c))
        .sum()
}

/// Consequence of moving one piece of evidence to another cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferDelta {
    pub evidence_id: usize,
    pub from_cluster: usize,
    pub to_cluster: usize,
    pub new_from_conflict: f64,
    pub new_to_conflict: f64,
    pub new_mcf: f64,
    pub favorable: bool,
}

impl TransferDelta {
    /// Favorability by the ratio test `(1-c_j*)/(1-c_j) > (1-c_i)/(1-c_i*)`,
    /// with the strict-improvement margin carried over as a factor
    /// `1 + tol / (1 - Mcf)` on the right.
    pub fn favorable_by_ratio(&self, partition: &Partition) -> bool {
        let ci = partition.conflicts[self.from_cluster];
        let cj = partition.conflicts[self.to_cluster];
        let margin = 1.0 + IMPROVEMENT_TOL / (1.0 - metaconflict(partition));
        (1.0 - self.new_to_conflict) / (1.0 - cj) > (1.0 - ci) / (1.0 - self.new_from_conflict) * margin
    }
}

/// Evaluates transferring evidence `q` into cluster `k`. Both affected
/// clusters are recombined from scratch.
pub fn evaluate_transfer(
    partition: &Partition,
    evidence: &[SimpleEvidence],
    q: usize,
    k: usize,
) -> Result<TransferDelta> {
    let from = partition.assignment[q];
    if k == from {
        return Err(Error::SameCluster {
            evidence: q,
            cluster: k,
        });
    }
    if k >= partition.r {
        return Err(Error::InvalidPartition(format!("cluster {k} >= r = {}", partition.r)));
    }
    let assignment = &partition.assignment;
    let new_from = combine_conflict_iter(
        evidence
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != q && assignment[j] == from)
            .map(|(_, e)| e),
    );
    let new_to = combine_conflict_iter(
        evidence
            .iter()
            .enumerate()
            .filter(|&(j, _)| j == q || assignment[j] == k)
            .map(|(_, e)| e),
    );
    let new_mcf = mcf_from(
        partition.domain_conflict,
        partition.conflicts.iter().enumerate().map(|(i, &c)| {
            if i == from {
                new_from
            } else if i == k {
                new_to
            } else {
                c
            }
        }),
    );
    Ok(TransferDelta {
        evidence_id: q,
        from_cluster: from,
        to_cluster: k,
        new_from_conflict: new_from,
        new_to_conflict: new_to,
        new_mcf,
        favorable: new_mcf < metaconflict(partition) - IMPROVEMENT_TOL,
    })
}

/// Exhaustive minimum of metaconflict over all `r^N` assignments. Ties go to
/// the lexicographically smallest assignment.
pub fn brute_force_min_mcf(evidence: &[SimpleEvidence], r: usize) -> Result<(Partition, f64)> {
    if r == 0 {
        return Err(Error::InvalidPartition("r must be at least 1".into()));
    }
    let n = evidence.len();
    let space = u32::try_from(n)
        .ok()
        .and_then(|n| (r as u64).checked_pow(n))
        .filter(|&s| s <= BRUTE_FORCE_MAX_ASSIGNMENTS)
        .ok_or_else(|| Error::TooLarge(format!("{r}^{n} assignments")))?;

    let mut assignment = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..space {
        let mcf = mcf_from(0.0, (0..r).map(|i| cluster_conflict(evidence, &assignment, i)));
        if best.as_ref().is_none_or(|(_, b)| mcf < b - IMPROVEMENT_TOL) {
            best = Some((assignment.clone(), mcf));
        }
        // odometer with the last position varying fastest
        for pos in (0..n).rev() {
            assignment[pos] += 1;
            if assignment[pos] < r {
                break;
            }
            assignment[pos] = 0;
        }
    }
    let (assignment, _) = best.expect("at least one assignment");
    let partition = Partition::new(evidence, assignment, r)?;
    let mcf = metaconflict(&partition);
    Ok((partition, mcf))
}

/// Cluster = smallest focal element - 1. Zero-conflict whenever every focal
/// element's minimum is below `r`.
pub fn lowest_element_assignment(evidence: &[SimpleEvidence], r: usize) -> Vec<usize> {
    evidence
        .iter()
        .map(|e| (e.focal.min_element().expect("nonempty focal") - 1).min(r - 1))
        .collect()
}
