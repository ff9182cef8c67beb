//! Relaxation network whose stable states encode partitions.
//!
//! Neuron `(m, n)` says "evidence `m` belongs to cluster `n`". Neurons in the
//! same column inhibit each other in proportion to the weight of evidence of
//! their pairwise conflict; neurons in the same row inhibit each other by a
//! constant, so that each row settles on a single column.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evidence::{pairwise_conflict, weight_of_conflict, SimpleEvidence};

/// Network constants. Field names double as the parameter-file keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    /// Gain factor.
    pub eta: f64,
    /// Output slope constant.
    pub u0: f64,
    /// Scale applied to conflict weights in the column term.
    pub dt: f64,
    /// Global inhibition.
    pub gi: f64,
    /// Row inhibition.
    pub ri: f64,
    /// Excitation bias.
    pub eb: f64,
    /// Initial noise half-width as a fraction of `u0`.
    pub noise_scale: f64,
    pub conv_epsilon: f64,
    pub conv_window: usize,
    pub max_iters: usize,
}

/// Shipped defaults, kept in sync with `params/network-v1.json`.
pub const DEFAULT_PARAMS: NetworkParams = NetworkParams {
    eta: 0.2,
    u0: 0.02,
    dt: 2.0,
    gi: -0.05,
    ri: -1.0,
    eb: 0.5,
    noise_scale: 0.1,
    conv_epsilon: 1e-4,
    conv_window: 3,
    max_iters: 1000,
};

impl Default for NetworkParams {
    fn default() -> Self {
        DEFAULT_PARAMS
    }
}

impl NetworkParams {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !(self.eta > 0.0) {
            return fail("eta must be > 0");
        }
        if !(self.u0 > 0.0) {
            return fail("u0 must be > 0");
        }
        if !(self.dt > 0.0) {
            return fail("dt must be > 0");
        }
        if !(self.gi <= 0.0) {
            return fail("gi must be <= 0");
        }
        if !(self.ri <= 0.0) {
            return fail("ri must be <= 0");
        }
        if !(self.eb >= 0.0) {
            return fail("eb must be >= 0");
        }
        if !(self.noise_scale >= 0.0) {
            return fail("noise_scale must be >= 0");
        }
        if !(self.conv_epsilon > 0.0) {
            return fail("conv_epsilon must be > 0");
        }
        if self.conv_window < 1 {
            return fail("conv_window must be >= 1");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }
}

/// Pairwise conflicts and their weights, both symmetric with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictMatrix {
    n_evidence: usize,
    c: Vec<f64>,
    w: Vec<f64>,
}

impl ConflictMatrix {
    pub fn new(evidence: &[SimpleEvidence]) -> Result<Self> {
        let n = evidence.len();
        let mut c = vec![0.0; n * n];
        let mut w = vec![0.0; n * n];
        for j in 0..n {
            for k in (j + 1)..n {
                let cjk = pairwise_conflict(&evidence[j], &evidence[k]);
                let wjk = weight_of_conflict(cjk)?;
                c[j * n + k] = cjk;
                c[k * n + j] = cjk;
                w[j * n + k] = wjk;
                w[k * n + j] = wjk;
            }
        }
        Ok(Self { n_evidence: n, c, w })
    }

    pub fn n_evidence(&self) -> usize {
        self.n_evidence
    }

    pub fn conflict(&self, j: usize, k: usize) -> f64 {
        self.c[j * self.n_evidence + k]
    }

    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.w[j * self.n_evidence + k]
    }

    /// Sum of weights over co-clustered pairs; the quantity the network
    /// actually minimizes.
    pub fn pairwise_surrogate(&self, assignment: &[usize]) -> f64 {
        let n = self.n_evidence;
        let mut total = 0.0;
        for j in 0..n {
            for k in (j + 1)..n {
                if assignment[j] == assignment[k] {
                    total += self.w[j * n + k];
                }
            }
        }
        total
    }
}

/// Input voltages `u` and output voltages `v`, row-major (evidence x cluster).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    rows: usize,
    cols: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    t: usize,
}

fn output_voltage(u: f64, u0: f64) -> f64 {
    0.5 * (1.0 + (u / u0).tanh())
}

impl NetworkState {
    /// State with the given input voltages and matching outputs.
    pub fn from_inputs(rows: usize, cols: usize, u: Vec<f64>, u0: f64) -> Self {
        assert_eq!(u.len(), rows * cols);
        let v = u.iter().map(|&x| output_voltage(x, u0)).collect();
        Self { rows, cols, u, v, t: 0 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn iteration(&self) -> usize {
        self.t
    }

    pub fn input(&self, m: usize, n: usize) -> f64 {
        self.u[m * self.cols + n]
    }

    pub fn output(&self, m: usize, n: usize) -> f64 {
        self.v[m * self.cols + n]
    }

    pub fn outputs(&self) -> &[f64] {
        &self.v
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.v[m * self.cols..(m + 1) * self.cols]
    }

    /// Largest `|v - g(u)|` over all neurons.
    pub fn coherence_error(&self, u0: f64) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(&u, &v)| (v - output_voltage(u, u0)).abs())
            .fold(0.0, f64::max)
    }

    fn max_output_change(&self, other: &NetworkState) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A built network: conflict matrix, constants and cluster count.
#[derive(Debug, Clone)]
pub struct Network {
    matrix: ConflictMatrix,
    params: NetworkParams,
    r: usize,
    /// `-dt * w[i][m] + gi`, zero on the diagonal.
    column_weights: Vec<f64>,
}

/// Precomputes the conflict matrix and the column interaction weights.
pub fn build_network(evidence: &[SimpleEvidence], r: usize, params: NetworkParams) -> Result<Network> {
    params.validate()?;
    if r == 0 {
        return Err(Error::InvalidParams("r must be at least 1".into()));
    }
    let matrix = ConflictMatrix::new(evidence)?;
    let n = matrix.n_evidence;
    let mut column_weights = vec![0.0; n * n];
    for i in 0..n {
        for m in 0..n {
            if i != m {
                column_weights[i * n + m] = -params.dt * matrix.weight(i, m) + params.gi;
            }
        }
    }
    Ok(Network {
        matrix,
        params,
        r,
        column_weights,
    })
}

impl Network {
    pub fn matrix(&self) -> &ConflictMatrix {
        &self.matrix
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn column_weight(&self, i: usize, m: usize) -> f64 {
        self.column_weights[i * self.matrix.n_evidence + m]
    }

    pub fn row_weight(&self) -> f64 {
        self.params.ri + self.params.gi
    }

    pub fn init_state<R: Rng + ?Sized>(&self, rng: &mut R) -> NetworkState {
        init_state(self.matrix.n_evidence, self.r, &self.params, rng)
    }

    /// One synchronous update of every neuron from the current outputs.
    pub fn step(&self, state: &NetworkState) -> NetworkState {
        let rows = state.rows;
        let cols = state.cols;
        debug_assert_eq!(rows, self.matrix.n_evidence);
        let p = &self.params;
        let row_weight = self.row_weight();
        let row_sums: Vec<f64> = (0..rows).map(|m| state.row(m).iter().sum()).collect();

        let mut u = vec![0.0; rows * cols];
        for (m, &row_sum) in row_sums.iter().enumerate() {
            for n in 0..cols {
                let column: f64 = (0..rows)
                    .filter(|&i| i != m)
                    .map(|i| self.column_weights[i * rows + m] * state.v[i * cols + n])
                    .sum();
                let idx = m * cols + n;
                let row = row_weight * (row_sum - state.v[idx]);
                u[idx] = state.u[idx] + p.eta * (column + row + p.eb - state.u[idx]);
            }
        }
        let mut next = NetworkState::from_inputs(rows, cols, u, p.u0);
        next.t = state.t + 1;
        next
    }

    /// Iterates until outputs stay within `conv_epsilon` for `conv_window`
    /// consecutive steps, or `max_iters` steps were taken. `observe` sees
    /// every new state.
    pub fn run_to_convergence_with<F: FnMut(&NetworkState)>(
        &self,
        mut state: NetworkState,
        mut observe: F,
    ) -> Convergence {
        let p = &self.params;
        let mut quiet = 0;
        let mut iterations = 0;
        while iterations < p.max_iters {
            let next = self.step(&state);
            iterations += 1;
            if next.max_output_change(&state) < p.conv_epsilon {
                quiet += 1;
            } else {
                quiet = 0;
            }
            state = next;
            observe(&state);
            if quiet >= p.conv_window {
                return Convergence {
                    state,
                    iterations,
                    converged: true,
                };
            }
        }
        Convergence {
            state,
            iterations,
            converged: false,
        }
    }

    pub fn run_to_convergence(&self, state: NetworkState) -> Convergence {
        self.run_to_convergence_with(state, |_| {})
    }
}

/// Outcome of [`Network::run_to_convergence`].
#[derive(Debug, Clone)]
pub struct Convergence {
    pub state: NetworkState,
    pub iterations: usize,
    pub converged: bool,
}

/// Starting input voltage, which puts every output at `1/r`. A single column
/// cannot use `atanh(1)` and starts saturated instead.
pub fn initial_input_voltage(r: usize, u0: f64) -> f64 {
    if r == 1 {
        4.0 * u0
    } else {
        u0 * (2.0 / r as f64 - 1.0).atanh()
    }
}

/// Every neuron at the common starting voltage plus uniform noise in
/// `[-noise_scale * u0, noise_scale * u0]`.
pub fn init_state<R: Rng + ?Sized>(
    n_evidence: usize,
    r: usize,
    params: &NetworkParams,
    rng: &mut R,
) -> NetworkState {
    let base = initial_input_voltage(r, params.u0);
    let half_width = params.noise_scale * params.u0;
    let u = (0..n_evidence * r)
        .map(|_| base + rng.gen_range(-half_width..=half_width))
        .collect();
    NetworkState::from_inputs(n_evidence, r, u, params.u0)
}

/// Hard decode of a network state.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub assignment: Vec<usize>,
    /// Minimum over rows of the largest output voltage in the row.
    pub crispness: f64,
    /// Every row has exactly one output above one half.
    pub one_hot: bool,
}

/// Crispness below this marks a decode as non-crisp.
pub const CRISP_THRESHOLD: f64 = 0.9;

impl Decoded {
    pub fn is_crisp(&self) -> bool {
        self.crispness >= CRISP_THRESHOLD && self.one_hot
    }
}

/// Each row goes to its largest output (lowest column on ties).
pub fn decode(state: &NetworkState) -> Decoded {
    let mut assignment = Vec::with_capacity(state.rows);
    let mut crispness = if state.rows == 0 { 1.0 } else { f64::INFINITY };
    let mut one_hot = true;
    for m in 0..state.rows {
        let row = state.row(m);
        let mut best = 0;
        for n in 1..row.len() {
            if row[n] > row[best] {
                best = n;
            }
        }
        assignment.push(best);
        crispness = crispness.min(row[best]);
        one_hot &= row.iter().filter(|&&v| v > 0.5).count() == 1;
    }
    Decoded {
        assignment,
        crispness,
        one_hot,
    }
}
