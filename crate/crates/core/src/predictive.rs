//! One-step predictive kernels and Monte Carlo forecasting.
//!
//! Given the prior and the statistics of an observed prefix ending in state
//! `i` with terminal age `l(t)`, the one-step predictive law of the next
//! state is available in closed form. Writing `x = l(t) + 1` and letting
//! `(B_x, W_x)` be the posterior Beta parameters of the hazard of `F^i` at
//! `x` and `N` the completed-block histogram of `i` from the prefix:
//!
//! ```text
//! stay:      k(i) = (W_x + N((x,inf)))                  / (B_x + W_x + N([x,inf)))
//! move to j: k(j) = (B_x + N({x})) / (B_x + W_x + N([x,inf)))
//!                   * (m_i(j) + M_ij) / (m_i(E) + sum_h M_ih)
//! ```
//!
//! Sampling from these kernels step by step, while folding each generated
//! step back into the statistics, yields the reinforced process whose
//! marginal law equals a semi-Markov path drawn under the prior.

use rand::Rng;

use crate::error::{Result, SmbsError};
use crate::model::{CountingStats, State, StateSequence};
use crate::smbs::{draw_categorical, SmbsParams};

/// Predictive position: the prior plus the statistics of everything observed
/// so far. The current state and its age are read off the statistics.
#[derive(Debug, Clone)]
pub struct PredictiveState<'a> {
    params: &'a SmbsParams,
    stats: CountingStats,
}

impl<'a> PredictiveState<'a> {
    pub fn from_prefix(params: &'a SmbsParams, prefix: &StateSequence) -> Result<Self> {
        let stats = CountingStats::from_path(prefix, params.n_states())?;
        Ok(Self { params, stats })
    }

    pub fn from_stats(params: &'a SmbsParams, stats: CountingStats) -> Result<Self> {
        if stats.n_states() != params.n_states() {
            return Err(SmbsError::StateOutOfRange {
                index: stats.n_states(),
                n_states: params.n_states(),
            });
        }
        Ok(Self { params, stats })
    }

    pub fn current(&self) -> State {
        self.stats.terminal_state()
    }

    /// `x(t) = l(t) + 1`
    pub fn age_next(&self) -> u64 {
        self.stats.age_next()
    }

    pub fn stats(&self) -> &CountingStats {
        &self.stats
    }

    /// One-step predictive pmf over the state space.
    pub fn kernel(&self) -> Result<Vec<f64>> {
        predictive_kernel(self.params, &self.stats)
    }

    /// Record one more observed step.
    pub fn advance(&mut self, next: State) -> Result<()> {
        if next >= self.params.n_states() {
            return Err(SmbsError::StateOutOfRange {
                index: next,
                n_states: self.params.n_states(),
            });
        }
        self.stats.push_state(next);
        Ok(())
    }
}

/// One-step predictive pmf for a prefix summarized by `stats` under `params`.
///
/// The statistics' counts combine with any observations already absorbed in
/// `params`, so predicting from a posterior with fresh statistics agrees
/// exactly with predicting from the prior with the full-path statistics.
pub fn predictive_kernel(params: &SmbsParams, stats: &CountingStats) -> Result<Vec<f64>> {
    let n = params.n_states();
    if stats.n_states() != n {
        return Err(SmbsError::StateOutOfRange {
            index: stats.n_states(),
            n_states: n,
        });
    }
    let i = stats.terminal_state();
    let x = stats.age_next();
    let sp = params.state(i);

    let (black, white) = sp.holding.beta_params_at(x);
    let blocks = stats.blocks(i);
    let n_at = blocks.count_at(x) as f64;
    let n_gt = blocks.count_gt(x) as f64;
    let denom = black + white + n_at + n_gt;
    if denom <= 0.0 {
        return Err(SmbsError::NoMassAtAge { state: i, age: x });
    }
    let stay = (white + n_gt) / denom;
    let move_factor = (black + n_at) / denom;

    let jump_total = sp.jump.total() + stats.transitions_from(i) as f64;
    let mut pmf = vec![0.0; n];
    for (j, p) in pmf.iter_mut().enumerate() {
        if j == i {
            *p = stay;
        } else {
            *p = move_factor * (sp.jump.mass(j) + stats.transition(i, j) as f64) / jump_total;
        }
    }
    Ok(pmf)
}

/// Rebuild `stats` extended by one step, validating the caller's view of the
/// current position. Equals a batch recount of the extended path.
pub fn update_stats_incremental(
    stats: &CountingStats,
    current: State,
    age_next: u64,
    next: State,
) -> Result<CountingStats> {
    if current != stats.terminal_state() || age_next != stats.age_next() {
        return Err(SmbsError::InconsistentIncrement {
            expected_state: stats.terminal_state(),
            expected_age: stats.age_next(),
            state: current,
            age: age_next,
        });
    }
    if next >= stats.n_states() {
        return Err(SmbsError::StateOutOfRange {
            index: next,
            n_states: stats.n_states(),
        });
    }
    let mut out = stats.clone();
    out.push_state(next);
    Ok(out)
}

/// Extend `prefix` by `steps` draws from the predictive kernel, reinforcing
/// the statistics with each generated step. Deterministic given the rng.
pub fn rsm_extend_path<R: Rng + ?Sized>(
    params: &SmbsParams,
    prefix: &StateSequence,
    steps: u64,
    rng: &mut R,
) -> Result<StateSequence> {
    let mut state = PredictiveState::from_prefix(params, prefix)?;
    let mut states = prefix.states().to_vec();
    states.reserve(steps as usize);
    for _ in 0..steps {
        let pmf = state.kernel()?;
        let next = draw_categorical(&pmf, rng);
        state.advance(next)?;
        states.push(next);
    }
    StateSequence::new(states)
}

/// Monte Carlo estimate of the `h`-step-ahead state distributions,
/// `h = 1..=horizon`. Counts partition the simulations, so each row sums to
/// one exactly.
#[derive(Debug, Clone)]
pub struct PredictiveMatrix {
    horizon: u64,
    n_states: usize,
    counts: Vec<Vec<u64>>,
    n_sims: u64,
}

impl PredictiveMatrix {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_sims(&self) -> u64 {
        self.n_sims
    }

    pub fn count(&self, h: u64, j: State) -> u64 {
        self.counts[h as usize - 1][j]
    }

    /// `P_h(j)`
    pub fn prob(&self, h: u64, j: State) -> f64 {
        self.count(h, j) as f64 / self.n_sims as f64
    }

    pub fn row(&self, h: u64) -> Vec<f64> {
        (0..self.n_states).map(|j| self.prob(h, j)).collect()
    }
}

/// Simulate `n_sims` futures of length `horizon` from the reinforced kernel
/// (cloning the prefix statistics per future, so reinforcement accumulates
/// within each simulated path) and tabulate state occupancies per step.
pub fn h_step_predictive<R: Rng + ?Sized>(
    params: &SmbsParams,
    prefix: &StateSequence,
    horizon: u64,
    n_sims: u64,
    rng: &mut R,
) -> Result<PredictiveMatrix> {
    if horizon == 0 || n_sims == 0 {
        return Err(SmbsError::Config(
            "horizon and n_sims must be at least 1".into(),
        ));
    }
    let n = params.n_states();
    let base = PredictiveState::from_prefix(params, prefix)?;
    let mut counts = vec![vec![0u64; n]; horizon as usize];
    for _ in 0..n_sims {
        let mut state = base.clone();
        for row in counts.iter_mut() {
            let pmf = state.kernel()?;
            let next = draw_categorical(&pmf, rng);
            state.advance(next)?;
            row[next] += 1;
        }
    }
    Ok(PredictiveMatrix {
        horizon,
        n_states: n,
        counts,
        n_sims,
    })
}
