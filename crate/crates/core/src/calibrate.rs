//! Grid search for the network constants.
//!
//! Each grid cell is scored on seeded `2^3 - 1`-into-3 instances by the rate of
//! runs that converge to a crisp one-hot decode; ties go to the lower mean
//! decoded metaconflict, then to the earlier cell.

use serde::{Deserialize, Serialize};

use crate::bench::ProblemSpec;
use crate::error::Result;
use crate::hybrid::{run_single, Method, RunOptions};
use crate::neural::NetworkParams;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    pub dt: Vec<f64>,
    pub gi: Vec<f64>,
    pub ri: Vec<f64>,
    pub eb: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        Self {
            dt: vec![0.5, 1.0, 2.0],
            gi: vec![-0.05, -0.1, -0.2],
            ri: vec![-0.5, -1.0, -2.0],
            eb: vec![0.3, 0.5, 0.7],
            eta: vec![0.05, 0.1, 0.2],
        }
    }
}

impl CalibrationGrid {
    /// Cells in row-major order over (dt, gi, ri, eb, eta).
    pub fn cells(&self, base: &NetworkParams) -> Vec<NetworkParams> {
        let mut out = Vec::new();
        for &dt in &self.dt {
            for &gi in &self.gi {
                for &ri in &self.ri {
                    for &eb in &self.eb {
                        for &eta in &self.eta {
                            out.push(NetworkParams {
                                dt,
                                gi,
                                ri,
                                eb,
                                eta,
                                ..*base
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub params: NetworkParams,
    pub crisp_rate: f64,
    pub mean_mcf: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub best: CellScore,
    pub cells: Vec<CellScore>,
}

pub fn score_cell(params: &NetworkParams, r: usize, instances: usize, seed: u64) -> Result<CellScore> {
    let spec = ProblemSpec::exhaustive(r, seed)?;
    let mut crisp = 0usize;
    let mut mcf = 0.0;
    let mut iterations = 0.0;
    for k in 0..instances {
        let set = spec.instance(k)?;
        let run_seed = derive_seed(seed, k as u64, Method::Neural.stream());
        let report = run_single(Method::Neural, &set.evidence, r, params, run_seed, &RunOptions::default())?;
        if report.crisp == Some(true) {
            crisp += 1;
        }
        mcf += report.final_mcf;
        iterations += report.neural_iterations as f64;
    }
    let n = instances.max(1) as f64;
    Ok(CellScore {
        params: *params,
        crisp_rate: crisp as f64 / n,
        mean_mcf: mcf / n,
        mean_iterations: iterations / n,
    })
}

/// Scores every cell on `instances` seeded instances with `r` clusters.
pub fn calibrate(
    grid: &CalibrationGrid,
    base: &NetworkParams,
    r: usize,
    instances: usize,
    seed: u64,
) -> Result<Calibration> {
    let cells: Vec<CellScore> = grid
        .cells(base)
        .iter()
        .map(|p| score_cell(p, r, instances, seed))
        .collect::<Result<_>>()?;
    let mut best = &cells[0];
    for cell in &cells[1..] {
        if cell.crisp_rate > best.crisp_rate
            || (cell.crisp_rate == best.crisp_rate && cell.mean_mcf < best.mean_mcf)
        {
            best = cell;
        }
    }
    Ok(Calibration {
        best: best.clone(),
        cells,
    })
}
