//! The discrete-time beta-Stacy process.
//!
//! A beta-Stacy process is a prior on distributions over positive integers,
//! built from independent discrete hazards `U_t ~ Beta(c(t)F0({t}),
//! c(t)F0((t,+inf)))` with survival `F((t,+inf)) = prod_{k<=t}(1 - U_k)`.
//! It is conjugate for both exact and right-censored observations: the
//! posterior is again beta-Stacy, with each observation adding unit mass to
//! the hazard numerator (exact, at its value) and to the at-risk denominator
//! (exact and censored, at every time it survived).
//!
//! [`BetaStacyParams`] stores the prior `(c, F0)` together with the absorbed
//! observation histograms; everything downstream reads the per-time Beta
//! parameters through [`BetaStacyParams::beta_params_at`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SmbsError};
use crate::model::LengthHistogram;

/// Overshoot beyond 1 tolerated in hazard arithmetic before it is treated as
/// a bug rather than roundoff.
const HAZARD_OVERSHOOT_TOL: f64 = 1e-14;

/// Precision function `c(t)`: explicit head values for `t = 1..=head.len()`,
/// a constant tail after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionFunction {
    head: Vec<f64>,
    tail: f64,
}

impl PrecisionFunction {
    pub fn new(head: Vec<f64>, tail: f64) -> Result<Self> {
        if !tail.is_finite() || tail <= 0.0 || head.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(SmbsError::InvalidPrecision);
        }
        Ok(Self { head, tail })
    }

    /// Constant precision `c(t) = c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), c)
    }

    /// `c(t)` for `t >= 1`.
    pub fn at(&self, t: u64) -> f64 {
        if t >= 1 && (t as usize) <= self.head.len() {
            self.head[t as usize - 1]
        } else {
            self.tail
        }
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

/// Centering distribution `F0` on the positive integers, restricted to
/// families whose hazard is available in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CenteringDistribution {
    /// `F({t}) = p (1-p)^{t-1}`
    Geometric { p: f64 },
    /// First-type discrete Weibull, `F(t) = 1 - q^{t^k}`.
    #[serde(rename = "discrete_weibull1")]
    DiscreteWeibull1 { q: f64, k: f64 },
    /// Uniform on `{1, ..., K}`.
    Uniform {
        #[serde(rename = "K")]
        max: u64,
    },
    /// Explicit pmf on `{1, ..., pmf.len()}` plus a geometric tail carrying
    /// the remaining mass with continuation rate `tail_rate`.
    Table { pmf: Vec<f64>, tail_rate: f64 },
}

/// CDF of the first-type discrete Weibull: `1 - q^{t^k}` for `t >= 1`, 0 at
/// `t = 0`. With `k = 1` this is the geometric distribution with parameter
/// `1 - q`.
pub fn discrete_weibull_cdf(q: f64, k: f64, t: u64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) || q == 0.0 || !k.is_finite() || k <= 0.0 {
        return Err(SmbsError::InvalidCentering(format!(
            "discrete_weibull1 requires q in (0,1) and k > 0, got q={q}, k={k}"
        )));
    }
    if t == 0 {
        return Ok(0.0);
    }
    Ok(1.0 - weibull_tail_gt(q, k, t))
}

/// `q^{t^k}`, i.e. the Weibull survival `F((t, +inf))`.
fn weibull_tail_gt(q: f64, k: f64, t: u64) -> f64 {
    ((t as f64).powf(k) * q.ln()).exp()
}

/// `t^k - (t-1)^k` without cancellation for large `t`.
fn weibull_exponent_gap(k: f64, t: u64) -> f64 {
    if t == 1 {
        return 1.0;
    }
    let t = t as f64;
    // t^k (1 - (1 - 1/t)^k)
    t.powf(k) * -(k * (-1.0 / t).ln_1p()).exp_m1()
}

impl CenteringDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            CenteringDistribution::Geometric { p } => {
                if !(0.0..=1.0).contains(p) || *p <= 0.0 {
                    return Err(SmbsError::InvalidCentering(format!(
                        "geometric requires p in (0,1], got {p}"
                    )));
                }
            }
            CenteringDistribution::DiscreteWeibull1 { q, k } => {
                discrete_weibull_cdf(*q, *k, 1)?;
            }
            CenteringDistribution::Uniform { max } => {
                if *max == 0 {
                    return Err(SmbsError::InvalidCentering(
                        "uniform requires K >= 1".into(),
                    ));
                }
            }
            CenteringDistribution::Table { pmf, tail_rate } => {
                if pmf.is_empty() || pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(SmbsError::InvalidCentering(
                        "table pmf must be non-empty and non-negative".into(),
                    ));
                }
                let head: f64 = pmf.iter().sum();
                if head > 1.0 + 1e-12 {
                    return Err(SmbsError::InvalidCentering(format!(
                        "table pmf mass {head} exceeds 1"
                    )));
                }
                let tail_mass = (1.0 - head).max(0.0);
                if tail_mass > 1e-12 && !(0.0..1.0).contains(tail_rate) {
                    return Err(SmbsError::InvalidCentering(format!(
                        "table tail carries mass {tail_mass} but tail_rate {tail_rate} is not in [0,1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `F0({t})`; zero for `t = 0`.
    pub fn mass_at(&self, t: u64) -> f64 {
        if t == 0 {
            return 0.0;
        }
        match self {
            CenteringDistribution::Geometric { p } => p * geometric_tail_ge(*p, t),
            CenteringDistribution::DiscreteWeibull1 { q, k } => {
                weibull_tail_gt(*q, *k, t - 1) - weibull_tail_gt(*q, *k, t)
            }
            CenteringDistribution::Uniform { max } => {
                if t <= *max {
                    1.0 / *max as f64
                } else {
                    0.0
                }
            }
            CenteringDistribution::Table { pmf, tail_rate } => {
                let m = pmf.len() as u64;
                if t <= m {
                    pmf[t as usize - 1]
                } else {
                    let tail_mass = self.table_tail_mass();
                    if tail_mass <= 1e-12 {
                        0.0
                    } else {
                        tail_mass * (1.0 - tail_rate) * tail_rate.powi((t - m - 1) as i32)
                    }
                }
            }
        }
    }

    /// `F0([t, +inf))`; equals 1 for `t <= 1`.
    pub fn survival_ge(&self, t: u64) -> f64 {
        if t <= 1 {
            return 1.0;
        }
        match self {
            CenteringDistribution::Geometric { p } => geometric_tail_ge(*p, t),
            CenteringDistribution::DiscreteWeibull1 { q, k } => weibull_tail_gt(*q, *k, t - 1),
            CenteringDistribution::Uniform { max } => {
                if t <= *max {
                    (*max - t + 1) as f64 / *max as f64
                } else {
                    0.0
                }
            }
            CenteringDistribution::Table { pmf, tail_rate } => {
                let m = pmf.len() as u64;
                let tail_mass = self.table_tail_mass();
                if t <= m {
                    pmf[(t as usize - 1)..].iter().sum::<f64>() + tail_mass
                } else if tail_mass <= 1e-12 {
                    0.0
                } else {
                    tail_mass * tail_rate.powi((t - m - 1) as i32)
                }
            }
        }
    }

    /// `F0((t, +inf))`; equals 1 for `t = 0`.
    pub fn survival_gt(&self, t: u64) -> f64 {
        self.survival_ge(t + 1)
    }

    /// `F0(t) = F0([1, t])`
    pub fn cdf(&self, t: u64) -> f64 {
        1.0 - self.survival_gt(t)
    }

    /// Hazard `F0({t}) / F0([t, +inf))` in closed form. Errors when there is
    /// no mass at or beyond `t`.
    pub fn hazard(&self, t: u64) -> Result<f64> {
        if t == 0 {
            return Ok(0.0);
        }
        match self {
            CenteringDistribution::Geometric { p } => Ok(*p),
            CenteringDistribution::DiscreteWeibull1 { q, k } => {
                Ok(-(weibull_exponent_gap(*k, t) * q.ln()).exp_m1())
            }
            CenteringDistribution::Uniform { max } => {
                if t <= *max {
                    Ok(1.0 / (*max - t + 1) as f64)
                } else {
                    Err(SmbsError::HazardUndefined(t))
                }
            }
            CenteringDistribution::Table { pmf, tail_rate } => {
                let m = pmf.len() as u64;
                if t > m {
                    if self.table_tail_mass() <= 1e-12 {
                        Err(SmbsError::HazardUndefined(t))
                    } else {
                        Ok(1.0 - tail_rate)
                    }
                } else {
                    let ge = self.survival_ge(t);
                    if ge <= 0.0 {
                        Err(SmbsError::HazardUndefined(t))
                    } else {
                        Ok((self.mass_at(t) / ge).min(1.0))
                    }
                }
            }
        }
    }

    fn table_tail_mass(&self) -> f64 {
        match self {
            CenteringDistribution::Table { pmf, .. } => (1.0 - pmf.iter().sum::<f64>()).max(0.0),
            _ => 0.0,
        }
    }

    /// Whether some mass lies at or beyond every finite time.
    pub fn has_unbounded_support(&self) -> bool {
        match self {
            CenteringDistribution::Geometric { .. }
            | CenteringDistribution::DiscreteWeibull1 { .. } => true,
            CenteringDistribution::Uniform { .. } => false,
            CenteringDistribution::Table { .. } => self.table_tail_mass() > 1e-12,
        }
    }
}

/// `(1-p)^{t-1}` via exp/log to stay accurate for large `t`.
fn geometric_tail_ge(p: f64, t: u64) -> f64 {
    if p >= 1.0 {
        if t <= 1 {
            1.0
        } else {
            0.0
        }
    } else {
        ((t - 1) as f64 * (-p).ln_1p()).exp()
    }
}

/// Beta-Stacy parameters: the prior `(c, F0)` plus the exact and censored
/// observations absorbed by conjugate updates.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaStacyParams {
    precision: PrecisionFunction,
    centering: CenteringDistribution,
    exact: LengthHistogram,
    censored: LengthHistogram,
}

impl BetaStacyParams {
    pub fn new(precision: PrecisionFunction, centering: CenteringDistribution) -> Result<Self> {
        centering.validate()?;
        Ok(Self {
            precision,
            centering,
            exact: LengthHistogram::new(),
            censored: LengthHistogram::new(),
        })
    }

    pub fn precision(&self) -> &PrecisionFunction {
        &self.precision
    }

    pub fn centering(&self) -> &CenteringDistribution {
        &self.centering
    }

    pub fn exact_observations(&self) -> &LengthHistogram {
        &self.exact
    }

    pub fn censored_observations(&self) -> &LengthHistogram {
        &self.censored
    }

    /// No data absorbed yet; the process mean is exactly the centering.
    pub fn is_fresh(&self) -> bool {
        self.exact.is_empty() && self.censored.is_empty()
    }

    /// Posterior after a multiset of exact observations. Exchangeable and
    /// composable with further updates in any order.
    pub fn posterior_exact(&self, observations: &[u64]) -> Result<Self> {
        if observations.contains(&0) {
            return Err(SmbsError::NonPositiveObservation);
        }
        let mut next = self.clone();
        for &t in observations {
            next.exact.add(t, 1);
        }
        Ok(next)
    }

    /// Posterior after one censored observation `T > t_star`.
    pub fn posterior_censored(&self, t_star: u64) -> Result<Self> {
        if t_star == 0 {
            return Err(SmbsError::NonPositiveObservation);
        }
        let mut next = self.clone();
        next.censored.add(t_star, 1);
        Ok(next)
    }

    /// Posterior Beta parameters of the hazard at `t`:
    /// `(c(t)F0({t}) + N({t}),  c(t)F0((t,+inf)) + N((t,+inf)) + C([t,+inf)))`
    /// where `N` are exact observations and `C` censoring times.
    pub fn beta_params_at(&self, t: u64) -> (f64, f64) {
        let c = self.precision.at(t);
        let black = c * self.centering.mass_at(t) + self.exact.count_at(t) as f64;
        let white = c * self.centering.survival_gt(t)
            + self.exact.count_gt(t) as f64
            + self.censored.count_ge(t) as f64;
        (black, white)
    }

    /// Posterior hazard `E[U_t]`. Clamped to `[0, 1]` only when the
    /// overshoot is below roundoff scale; larger overshoot is an error.
    pub fn hazard_at(&self, t: u64) -> Result<f64> {
        let (black, white) = self.beta_params_at(t);
        let total = black + white;
        if total <= 0.0 {
            return Err(SmbsError::HazardUndefined(t));
        }
        let h = black / total;
        if h > 1.0 {
            if h > 1.0 + HAZARD_OVERSHOOT_TOL {
                return Err(SmbsError::HazardOvershoot { t, value: h });
            }
            return Ok(1.0);
        }
        Ok(h.max(0.0))
    }

    /// Posterior mean survival `F_*((t, +inf)) = prod_{s<=t}(1 - hazard(s))`.
    pub fn survival_gt(&self, t: u64) -> Result<f64> {
        let mut s = 1.0;
        for u in 1..=t {
            if s == 0.0 {
                return Ok(0.0);
            }
            s *= 1.0 - self.hazard_at(u)?;
        }
        Ok(s)
    }

    /// Posterior mean CDF at `t`; for a fresh prior this equals `F0(t)`.
    pub fn mean(&self, t: u64) -> Result<f64> {
        Ok(1.0 - self.survival_gt(t)?)
    }

    /// Draw one survival function realization, lazily evaluated, with its
    /// own private random stream.
    pub fn sample(&self, seed: u64) -> SampledSurvival {
        SampledSurvival::new(self.clone(), ChaCha12Rng::seed_from_u64(seed))
    }

    /// As [`Self::sample`], deriving the private stream from `rng`.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledSurvival {
        self.sample(rng.random())
    }
}

/// One realization of a beta-Stacy survival function. Hazards `U_t` are
/// drawn lazily in increasing `t` and memoized, so the realization is
/// consistent across queries and deterministic given the seed. Single-owner:
/// transfer between threads, do not share.
#[derive(Debug, Clone)]
pub struct SampledSurvival {
    params: BetaStacyParams,
    rng: ChaCha12Rng,
    hazards: Vec<f64>,
    survival: Vec<f64>,
}

impl SampledSurvival {
    fn new(params: BetaStacyParams, rng: ChaCha12Rng) -> Self {
        Self {
            params,
            rng,
            hazards: Vec::new(),
            survival: Vec::new(),
        }
    }

    fn extend_to(&mut self, t: u64) -> Result<()> {
        while (self.hazards.len() as u64) < t {
            let u = self.hazards.len() as u64 + 1;
            let (black, white) = self.params.beta_params_at(u);
            let draw = if black <= 0.0 && white <= 0.0 {
                return Err(SmbsError::HazardUndefined(u));
            } else if black <= 0.0 {
                0.0
            } else if white <= 0.0 {
                1.0
            } else {
                let beta = rand_distr::Beta::new(black, white).map_err(|_| {
                    SmbsError::InvalidCentering(format!(
                        "invalid Beta parameters ({black}, {white}) at t={u}"
                    ))
                })?;
                beta.sample(&mut self.rng)
            };
            let prev = self.survival.last().copied().unwrap_or(1.0);
            self.hazards.push(draw);
            self.survival.push(prev * (1.0 - draw));
        }
        Ok(())
    }

    /// Realized hazard `U_t`.
    pub fn hazard(&mut self, t: u64) -> Result<f64> {
        if t == 0 {
            return Ok(0.0);
        }
        self.extend_to(t)?;
        Ok(self.hazards[t as usize - 1])
    }

    /// Realized survival `F((t, +inf)) = prod_{k<=t}(1 - U_k)`. Once the
    /// product reaches zero no further hazards are drawn; later queries
    /// return zero directly.
    pub fn survival(&mut self, t: u64) -> Result<f64> {
        if t == 0 {
            return Ok(1.0);
        }
        while (self.hazards.len() as u64) < t {
            if self.survival.last() == Some(&0.0) {
                return Ok(0.0);
            }
            self.extend_to(self.hazards.len() as u64 + 1)?;
        }
        Ok(self.survival[t as usize - 1])
    }

    /// Realized CDF `F(t)`.
    pub fn cdf(&mut self, t: u64) -> Result<f64> {
        Ok(1.0 - self.survival(t)?)
    }
}
