//! Benchmark data-generating process and its long-run occupancy law.
//!
//! The built-in benchmark is a three-state reliability model (running /
//! degraded / stopped): from running the system always degrades, a degraded
//! system recovers with probability 0.95 or stops, and a stopped system
//! restarts. Holding times are geometric in the running state and
//! first-type discrete Weibull in the other two. The long-run occupancy is
//! `nu_j = e_j m_j / sum_i e_i m_i`, with `e` the equilibrium of the jump
//! chain and `m_j` the mean sojourn times.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::app::config::ResolvedTruth;
use crate::betastacy::CenteringDistribution;
use crate::error::{Result, SmbsError};
use crate::model::{State, StateSequence};
use crate::smbs::{CharacteristicCouple, HoldingLaw};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const SERIES_CAP: u64 = 1_000_000;

/// A fixed data-generating couple for simulation studies.
#[derive(Debug, Clone)]
pub struct SimStudyTruth {
    transition: Vec<Vec<f64>>,
    holdings: Vec<CenteringDistribution>,
    start: State,
}

impl SimStudyTruth {
    pub fn new(
        transition: Vec<Vec<f64>>,
        holdings: Vec<CenteringDistribution>,
        start: State,
    ) -> Result<Self> {
        let couple_check = CharacteristicCouple::new(
            transition.clone(),
            holdings.iter().cloned().map(HoldingLaw::Fixed).collect(),
        )?;
        drop(couple_check);
        Ok(Self {
            transition,
            holdings,
            start,
        })
    }

    pub fn from_resolved(truth: &ResolvedTruth) -> Result<Self> {
        Self::new(
            truth.transition.clone(),
            truth.holdings.clone(),
            truth.start,
        )
    }

    /// The three-state reliability benchmark.
    pub fn benchmark() -> Self {
        Self {
            transition: vec![
                vec![0.0, 1.0, 0.0],
                vec![0.95, 0.0, 0.05],
                vec![1.0, 0.0, 0.0],
            ],
            holdings: vec![
                CenteringDistribution::Geometric { p: 0.8 },
                CenteringDistribution::DiscreteWeibull1 { q: 0.3, k: 0.5 },
                CenteringDistribution::DiscreteWeibull1 { q: 0.6, k: 0.9 },
            ],
            start: 0,
        }
    }

    pub fn n_states(&self) -> usize {
        self.transition.len()
    }

    pub fn start(&self) -> State {
        self.start
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn holding(&self, i: State) -> &CenteringDistribution {
        &self.holdings[i]
    }

    pub fn couple(&self) -> Result<CharacteristicCouple> {
        CharacteristicCouple::new(
            self.transition.clone(),
            self.holdings
                .iter()
                .cloned()
                .map(HoldingLaw::Fixed)
                .collect(),
        )
    }

    /// Simulate one path `s_{0:horizon}` from the truth.
    pub fn generate(&self, horizon: u64, seed: u64) -> Result<StateSequence> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        self.couple()?.sample_path(self.start, horizon, &mut rng)
    }

    /// Long-run state occupancy `nu`.
    pub fn limiting_distribution(&self, tail_tol: f64) -> Result<Vec<f64>> {
        if tail_tol <= 0.0 {
            return Err(SmbsError::Config("tail_tol must be positive".into()));
        }
        let e = equilibrium_distribution(&self.transition)?;
        let mut weights = Vec::with_capacity(self.n_states());
        for (i, holding) in self.holdings.iter().enumerate() {
            weights.push(e[i] * mean_sojourn(holding, tail_tol, SERIES_CAP)?);
        }
        let total: f64 = weights.iter().sum();
        Ok(weights.into_iter().map(|w| w / total).collect())
    }
}

/// Equilibrium distribution of a stochastic matrix: the probability vector
/// solving `e P = e`, found by direct linear solve (valid for periodic jump
/// chains too, where power iteration fails).
#[allow(clippy::needless_range_loop)]
pub fn equilibrium_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    if n == 0 || p.iter().any(|row| row.len() != n) {
        return Err(SmbsError::InvalidTransitionMatrix("not square".into()));
    }
    // rows of A: (P^T - I) e = 0, last row replaced by sum(e) = 1
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[n - 1][j] = 1.0;
    }
    a[n - 1][n] = 1.0;

    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-13 {
            return Err(SmbsError::NoEquilibrium(format!(
                "singular system at column {col}"
            )));
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..=n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut e = Vec::with_capacity(n);
    for (i, row) in a.iter().enumerate() {
        let v = row[n] / row[i];
        if v < -1e-10 {
            return Err(SmbsError::NoEquilibrium(format!(
                "negative equilibrium mass {v} at state {i}"
            )));
        }
        e.push(v.max(0.0));
    }
    let total: f64 = e.iter().sum();
    Ok(e.into_iter().map(|x| x / total).collect())
}

/// Mean sojourn time `sum_{t>=0} F((t, +inf))`, truncated once the increment
/// drops below `tail_tol`.
pub fn mean_sojourn(dist: &CenteringDistribution, tail_tol: f64, cap: u64) -> Result<f64> {
    let mut total = 0.0;
    for t in 0..cap {
        let term = dist.survival_gt(t);
        total += term;
        if term < tail_tol {
            return Ok(total);
        }
    }
    Err(SmbsError::SeriesNotConverged(cap))
}
