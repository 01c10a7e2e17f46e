//! Dirichlet process on a finite state space.
//!
//! On a finite space the Dirichlet process is the Dirichlet distribution
//! with unnormalized concentration parameters given by the base measure:
//! `P(A) ~ Beta(m(A), m(A^c))`, `E[P(A)] = m(A)/m(E)`, and counts add to the
//! base measure under conjugate updating.

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{Result, SmbsError};
use crate::model::State;

/// Base measure `m` of a Dirichlet process, one non-negative mass per state.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    masses: Vec<f64>,
}

impl DirichletParams {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if masses.is_empty()
            || masses.iter().any(|m| !m.is_finite() || *m < 0.0)
            || !total.is_finite()
            || total <= 0.0
        {
            return Err(SmbsError::InvalidBaseMeasure);
        }
        Ok(Self { masses })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// `m({j})`
    pub fn mass(&self, j: State) -> f64 {
        self.masses[j]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `m(E)`
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Conjugate update: `m_*({j}) = m({j}) + counts[j]`.
    pub fn posterior(&self, counts: &[u64]) -> Result<Self> {
        if counts.len() != self.masses.len() {
            return Err(SmbsError::InvalidBaseMeasure);
        }
        let masses = self
            .masses
            .iter()
            .zip(counts)
            .map(|(m, &c)| m + c as f64)
            .collect();
        Self::new(masses)
    }

    /// `E[P({j})] = m({j}) / m(E)`
    pub fn mean(&self, j: State) -> f64 {
        self.masses[j] / self.total()
    }

    /// Draw a pmf via independent gamma draws normalized to the simplex.
    /// States with zero mass receive exactly zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut draws: Vec<f64> = self
            .masses
            .iter()
            .map(|&m| {
                if m == 0.0 {
                    0.0
                } else {
                    rand_distr::Gamma::new(m, 1.0)
                        .expect("positive finite shape")
                        .sample(rng)
                }
            })
            .collect();
        let total: f64 = draws.iter().sum();
        if total <= 0.0 {
            // all gamma draws underflowed; fall back to the mean
            let m_total = self.total();
            return self.masses.iter().map(|&m| m / m_total).collect();
        }
        for d in &mut draws {
            *d /= total;
        }
        draws
    }
}
