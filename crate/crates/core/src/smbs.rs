//! The semi-Markov beta-Stacy prior.
//!
//! A prior on the law of a discrete-time semi-Markov process assigns, per
//! state `i`, an independent Dirichlet process to the transition row
//! `P^i(.)` (with zero self-mass, so `P^{i,i} = 0` almost surely) and an
//! independent beta-Stacy process to the holding-time distribution `F^i`.
//! Observing a path updates every component in closed form:
//!
//! * each recorded `i -> j` transition adds one to `m^i({j})`;
//! * each completed `i`-block of length `s` is an exact observation of `F^i`;
//! * the terminal block of age `l(t) >= 1` is a censored observation of the
//!   terminal state's holding distribution.
//!
//! [`TimeIndexedJumpParams`] implements the conjugate generalization where
//! the next state may depend on the completed holding time: jump priors are
//! indexed by `(state, holding time)` and updated from the pair histograms.

use std::collections::BTreeMap;

use rand::Rng;

use crate::betastacy::{BetaStacyParams, CenteringDistribution, SampledSurvival};
use crate::dirichlet::DirichletParams;
use crate::error::{Result, SmbsError};
use crate::model::{CountingStats, State, StateSequence};

/// Prior for a single state: jump base measure plus holding-time process.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePrior {
    pub jump: DirichletParams,
    pub holding: BetaStacyParams,
}

/// Parameter bundle of the full prior, one [`StatePrior`] per state.
#[derive(Debug, Clone, PartialEq)]
pub struct SmbsParams {
    states: Vec<StatePrior>,
}

impl SmbsParams {
    pub fn new(states: Vec<StatePrior>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(SmbsError::InvalidStateSpace);
        }
        for (i, sp) in states.iter().enumerate() {
            if sp.jump.len() != n {
                return Err(SmbsError::InvalidBaseMeasure);
            }
            if sp.jump.mass(i) != 0.0 {
                return Err(SmbsError::NonZeroSelfMass(i));
            }
        }
        Ok(Self { states })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: State) -> &StatePrior {
        &self.states[i]
    }

    pub fn states(&self) -> &[StatePrior] {
        &self.states
    }

    /// Conjugate update on one observed path.
    pub fn posterior(&self, path: &StateSequence) -> Result<Self> {
        let stats = CountingStats::from_path(path, self.n_states())?;
        self.posterior_from_stats(&stats)
    }

    /// Conjugate update from precomputed statistics. The posterior depends
    /// on the path only through these.
    pub fn posterior_from_stats(&self, stats: &CountingStats) -> Result<Self> {
        let n = self.n_states();
        if stats.n_states() != n {
            return Err(SmbsError::StateOutOfRange {
                index: stats.n_states(),
                n_states: n,
            });
        }
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let counts: Vec<u64> = (0..n).map(|j| stats.transition(i, j)).collect();
            let jump = self.states[i].jump.posterior(&counts)?;

            let exact: Vec<u64> = stats
                .blocks(i)
                .iter()
                .flat_map(|(len, count)| std::iter::repeat_n(len, count as usize))
                .collect();
            let mut holding = self.states[i].holding.posterior_exact(&exact)?;
            if i == stats.terminal_state() && stats.terminal_age() >= 1 {
                holding = holding.posterior_censored(stats.terminal_age())?;
            }
            next.push(StatePrior { jump, holding });
        }
        Self::new(next)
    }

    /// Conjugate update on several independent paths; a left fold of
    /// [`Self::posterior`], invariant to the order of the paths.
    pub fn posterior_multi(&self, paths: &[StateSequence]) -> Result<Self> {
        paths
            .iter()
            .try_fold(self.clone(), |p, path| p.posterior(path))
    }

    /// Draw one characteristic couple: independent transition rows and
    /// holding-time realizations per state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CharacteristicCouple> {
        let transition: Vec<Vec<f64>> = self.states.iter().map(|sp| sp.jump.sample(rng)).collect();
        let holding: Vec<HoldingLaw> = self
            .states
            .iter()
            .map(|sp| HoldingLaw::Sampled(Box::new(sp.holding.sample_with(rng))))
            .collect();
        CharacteristicCouple::new(transition, holding)
    }
}

/// A holding-time law usable for forward simulation: either a fixed
/// distribution or one realization drawn from a beta-Stacy process.
#[derive(Debug, Clone)]
pub enum HoldingLaw {
    Fixed(CenteringDistribution),
    Sampled(Box<SampledSurvival>),
}

impl HoldingLaw {
    /// `P(T = t | T >= t)`
    pub fn hazard(&mut self, t: u64) -> Result<f64> {
        match self {
            HoldingLaw::Fixed(d) => d.hazard(t),
            HoldingLaw::Sampled(s) => s.hazard(t),
        }
    }

    /// `F(t)`
    pub fn cdf(&mut self, t: u64) -> Result<f64> {
        match self {
            HoldingLaw::Fixed(d) => Ok(d.cdf(t)),
            HoldingLaw::Sampled(s) => s.cdf(t),
        }
    }
}

/// A realization `(P, F)`: a transition matrix with zero diagonal plus one
/// holding-time law per state.
#[derive(Debug, Clone)]
pub struct CharacteristicCouple {
    transition: Vec<Vec<f64>>,
    holding: Vec<HoldingLaw>,
}

impl CharacteristicCouple {
    pub fn new(transition: Vec<Vec<f64>>, holding: Vec<HoldingLaw>) -> Result<Self> {
        let n = transition.len();
        if n == 0 || holding.len() != n {
            return Err(SmbsError::InvalidTransitionMatrix(
                "dimension mismatch".into(),
            ));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(SmbsError::InvalidTransitionMatrix(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            if row[i] != 0.0 {
                return Err(SmbsError::InvalidTransitionMatrix(format!(
                    "row {i} has non-zero diagonal {}",
                    row[i]
                )));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| !(0.0..=1.0 + 1e-12).contains(&p)) || (sum - 1.0).abs() > 1e-12 {
                return Err(SmbsError::InvalidTransitionMatrix(format!(
                    "row {i} sums to {sum}"
                )));
            }
        }
        Ok(Self {
            transition,
            holding,
        })
    }

    pub fn n_states(&self) -> usize {
        self.transition.len()
    }

    pub fn transition_row(&self, i: State) -> &[f64] {
        &self.transition[i]
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn holding_mut(&mut self, i: State) -> &mut HoldingLaw {
        &mut self.holding[i]
    }

    /// Simulate `s_{0:horizon}` from this couple. Holding times come from
    /// sequential hazard draws, truncated at the horizon; next states from
    /// the transition rows.
    pub fn sample_path<R: Rng + ?Sized>(
        &mut self,
        start: State,
        horizon: u64,
        rng: &mut R,
    ) -> Result<StateSequence> {
        let n = self.n_states();
        if start >= n {
            return Err(SmbsError::StateOutOfRange {
                index: start,
                n_states: n,
            });
        }
        let mut states = Vec::with_capacity(horizon as usize + 1);
        states.push(start);
        let mut current = start;
        let mut age_next = 1u64; // length the current block reaches next step
        while (states.len() as u64) <= horizon {
            let hazard = self.holding[current].hazard(age_next)?;
            if rng.random::<f64>() < hazard {
                current = draw_categorical(&self.transition[current], rng);
                age_next = 1;
            } else {
                age_next += 1;
            }
            states.push(current);
        }
        StateSequence::new(states)
    }
}

pub(crate) fn draw_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> State {
    let u: f64 = rng.random();
    pick_categorical(probs, u)
}

pub(crate) fn pick_categorical(probs: &[f64], u: f64) -> State {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (j, &p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return j;
        }
    }
    // roundoff pushed the target past the last positive entry
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Prior bundle for the generalization where the next state depends on the
/// completed holding time: per state a holding prior, a default jump base
/// measure, and optional per-holding-time overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeIndexedJumpParams {
    holdings: Vec<BetaStacyParams>,
    default_jumps: Vec<DirichletParams>,
    time_jumps: Vec<BTreeMap<u64, DirichletParams>>,
}

impl TimeIndexedJumpParams {
    pub fn new(
        holdings: Vec<BetaStacyParams>,
        default_jumps: Vec<DirichletParams>,
        time_jumps: Vec<BTreeMap<u64, DirichletParams>>,
    ) -> Result<Self> {
        let n = holdings.len();
        if n == 0 || default_jumps.len() != n || time_jumps.len() != n {
            return Err(SmbsError::InvalidStateSpace);
        }
        for (i, jump) in default_jumps.iter().enumerate() {
            if jump.len() != n {
                return Err(SmbsError::InvalidBaseMeasure);
            }
            if jump.mass(i) != 0.0 {
                return Err(SmbsError::NonZeroSelfMass(i));
            }
        }
        for (i, by_time) in time_jumps.iter().enumerate() {
            for jump in by_time.values() {
                if jump.len() != n {
                    return Err(SmbsError::InvalidBaseMeasure);
                }
                if jump.mass(i) != 0.0 {
                    return Err(SmbsError::NonZeroSelfMass(i));
                }
            }
        }
        Ok(Self {
            holdings,
            default_jumps,
            time_jumps,
        })
    }

    /// Same default jump prior at every holding time.
    pub fn uniform_over_time(
        holdings: Vec<BetaStacyParams>,
        default_jumps: Vec<DirichletParams>,
    ) -> Result<Self> {
        let n = holdings.len();
        Self::new(holdings, default_jumps, vec![BTreeMap::new(); n])
    }

    pub fn n_states(&self) -> usize {
        self.holdings.len()
    }

    pub fn holding(&self, i: State) -> &BetaStacyParams {
        &self.holdings[i]
    }

    /// Jump prior in force for blocks of state `i` of length `t`.
    pub fn jump_at(&self, i: State, t: u64) -> &DirichletParams {
        self.time_jumps[i].get(&t).unwrap_or(&self.default_jumps[i])
    }

    pub fn default_jump(&self, i: State) -> &DirichletParams {
        &self.default_jumps[i]
    }

    /// Explicit per-holding-time overrides for state `i`.
    pub fn time_overrides(&self, i: State) -> impl Iterator<Item = (u64, &DirichletParams)> {
        self.time_jumps[i].iter().map(|(&t, p)| (t, p))
    }

    /// Conjugate update: holding priors exactly as in [`SmbsParams`], jump
    /// priors per `(state, holding time)` from the pair histograms.
    pub fn posterior(&self, path: &StateSequence) -> Result<Self> {
        let n = self.n_states();
        let stats = CountingStats::from_path(path, n)?;
        let mut holdings = Vec::with_capacity(n);
        let mut time_jumps = self.time_jumps.clone();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let exact: Vec<u64> = stats
                .blocks(i)
                .iter()
                .flat_map(|(len, count)| std::iter::repeat_n(len, count as usize))
                .collect();
            let mut holding = self.holdings[i].posterior_exact(&exact)?;
            if i == stats.terminal_state() && stats.terminal_age() >= 1 {
                holding = holding.posterior_censored(stats.terminal_age())?;
            }
            holdings.push(holding);

            for j in 0..n {
                for (len, count) in stats.pair_blocks(i, j).iter() {
                    let entry = time_jumps[i]
                        .entry(len)
                        .or_insert_with(|| self.default_jumps[i].clone());
                    let mut counts = vec![0u64; n];
                    counts[j] = count;
                    *entry = entry.posterior(&counts)?;
                }
            }
        }
        Self::new(holdings, self.default_jumps.clone(), time_jumps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betastacy::PrecisionFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn geometric(p: f64) -> CenteringDistribution {
        CenteringDistribution::Geometric { p }
    }

    fn bs(c: f64, f0: CenteringDistribution) -> BetaStacyParams {
        BetaStacyParams::new(PrecisionFunction::constant(c).unwrap(), f0).unwrap()
    }

    /// Three states, uniform off-diagonal jump mass, geometric centerings.
    fn uniform_prior(n: usize, c: f64, p: f64) -> SmbsParams {
        let states = (0..n)
            .map(|i| {
                let masses = (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect();
                StatePrior {
                    jump: DirichletParams::new(masses).unwrap(),
                    holding: bs(c, geometric(p)),
                }
            })
            .collect();
        SmbsParams::new(states).unwrap()
    }

    fn seq(states: &[usize]) -> StateSequence {
        StateSequence::new(states.to_vec()).unwrap()
    }

    #[test]
    fn rejects_self_mass() {
        let bad = vec![StatePrior {
            jump: DirichletParams::new(vec![1.0]).unwrap(),
            holding: bs(1.0, geometric(0.5)),
        }];
        assert!(matches!(
            SmbsParams::new(bad),
            Err(SmbsError::NonZeroSelfMass(0))
        ));
    }

    #[test]
    fn posterior_worked_example() {
        // path (i0,i0,i1,i2,i2,i2): m0({1}) += 1, m1({2}) += 1,
        // F0 gets exact {2}, F1 exact {1}, F2 censored at 2
        let prior = uniform_prior(3, 1.0, 0.5);
        let post = prior.posterior(&seq(&[0, 0, 1, 2, 2, 2])).unwrap();

        assert_eq!(post.state(0).jump.mass(1), 2.0);
        assert_eq!(post.state(0).jump.mass(2), 1.0);
        assert_eq!(post.state(1).jump.mass(2), 2.0);
        assert_eq!(post.state(1).jump.mass(0), 1.0);
        assert_eq!(post.state(2).jump.mass(0), 1.0);

        assert_eq!(post.state(0).holding.exact_observations().count_at(2), 1);
        assert_eq!(post.state(0).holding.exact_observations().total(), 1);
        assert_eq!(post.state(1).holding.exact_observations().count_at(1), 1);
        assert!(post.state(0).holding.censored_observations().is_empty());
        assert_eq!(post.state(2).holding.censored_observations().count_at(2), 1);
        assert!(post.state(2).holding.exact_observations().is_empty());
    }

    #[test]
    fn no_jump_path_is_identity_when_age_zero() {
        let prior = uniform_prior(2, 1.0, 0.5);
        let post = prior.posterior(&seq(&[0])).unwrap();
        assert_eq!(prior, post);
    }

    #[test]
    fn terminal_censoring_skipped_only_at_age_zero() {
        let prior = uniform_prior(2, 1.0, 0.5);
        // (0,1): jump recorded, terminal age 0 -> no censoring stored
        let post = prior.posterior(&seq(&[0, 1])).unwrap();
        assert!(post.state(1).holding.censored_observations().is_empty());
        assert_eq!(post.state(0).holding.exact_observations().count_at(1), 1);
        // (0,1,1): terminal age 1 -> censored at 1
        let post = prior.posterior(&seq(&[0, 1, 1])).unwrap();
        assert_eq!(post.state(1).holding.censored_observations().count_at(1), 1);
    }

    #[test]
    fn multi_path_fold_and_order_invariance() {
        let prior = uniform_prior(3, 1.0, 0.5);
        let p1 = seq(&[0, 0, 1, 2, 2, 2]);

        // two copies double every count-based increment
        let twice = prior.posterior_multi(&[p1.clone(), p1.clone()]).unwrap();
        assert_eq!(twice.state(0).jump.mass(1), 3.0);
        assert_eq!(twice.state(0).holding.exact_observations().count_at(2), 2);
        assert_eq!(
            twice.state(2).holding.censored_observations().count_at(2),
            2
        );

        // empty list is the identity
        assert_eq!(prior.posterior_multi(&[]).unwrap(), prior);

        // order invariance over all permutations of three short paths
        let paths = [p1, seq(&[1, 0, 0]), seq(&[2, 1])];
        let mut results = Vec::new();
        for perm in [
            [0usize, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            let ordered: Vec<StateSequence> = perm.iter().map(|&k| paths[k].clone()).collect();
            results.push(prior.posterior_multi(&ordered).unwrap());
        }
        for r in &results[1..] {
            assert_eq!(*r, results[0]);
        }
    }

    #[test]
    fn sufficiency_on_matching_stats() {
        let prior = uniform_prior(3, 1.0, 0.5);
        // same counting statistics, different paths
        let a = seq(&[0, 1, 0, 2]);
        let b = seq(&[0, 1, 0, 2]);
        assert_eq!(prior.posterior(&a).unwrap(), prior.posterior(&b).unwrap());
        // posterior preserves zero self-mass
        let post = prior.posterior(&seq(&[0, 1, 2, 0, 1, 1])).unwrap();
        for i in 0..3 {
            assert_eq!(post.state(i).jump.mass(i), 0.0);
        }
    }

    #[test]
    fn sampled_couple_has_valid_rows_and_one_hot_degenerate() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let prior = uniform_prior(3, 1.0, 0.5);
        let couple = prior.sample(&mut rng).unwrap();
        for i in 0..3 {
            let row = couple.transition_row(i);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(row[i], 0.0);
        }

        // jump mass concentrated on one state -> deterministic one-hot row
        let concentrated = SmbsParams::new(vec![
            StatePrior {
                jump: DirichletParams::new(vec![0.0, 3.0]).unwrap(),
                holding: bs(1.0, geometric(0.5)),
            },
            StatePrior {
                jump: DirichletParams::new(vec![2.0, 0.0]).unwrap(),
                holding: bs(1.0, geometric(0.5)),
            },
        ])
        .unwrap();
        let couple = concentrated.sample(&mut rng).unwrap();
        assert_eq!(couple.transition_row(0), &[0.0, 1.0]);
        assert_eq!(couple.transition_row(1), &[1.0, 0.0]);
    }

    #[test]
    fn sampled_couple_moments_match_prior_means() {
        let prior = uniform_prior(3, 2.0, 0.4);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 10_000;
        let mut p01 = 0.0;
        let mut f0_at_2 = 0.0;
        for _ in 0..n {
            let mut couple = prior.sample(&mut rng).unwrap();
            p01 += couple.transition_row(0)[1];
            f0_at_2 += couple.holding_mut(0).cdf(2).unwrap();
        }
        let mean_p = p01 / n as f64;
        let expect_p = prior.state(0).jump.mean(1);
        // marginal is Beta(1,1): var 1/12
        let se_p = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean_p - expect_p).abs() < 3.0 * se_p, "{mean_p}");

        let mean_f = f0_at_2 / n as f64;
        let expect_f = prior.state(0).holding.mean(2).unwrap();
        let se_f = (0.25f64 / n as f64).sqrt(); // var of a [0,1] variable <= 1/4
        assert!((mean_f - expect_f).abs() < 3.0 * se_f, "{mean_f}");
    }

    #[test]
    fn sample_path_trivial_cases() {
        let prior = uniform_prior(2, 1.0, 0.5);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut couple = prior.sample(&mut rng).unwrap();
        let path = couple.sample_path(1, 0, &mut rng).unwrap();
        assert_eq!(path.states(), &[1]);

        // deterministic couple: P one-hot, F point mass at 1 -> alternating
        let mut det = CharacteristicCouple::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![
                HoldingLaw::Fixed(CenteringDistribution::Table {
                    pmf: vec![1.0],
                    tail_rate: 0.0,
                }),
                HoldingLaw::Fixed(CenteringDistribution::Table {
                    pmf: vec![1.0],
                    tail_rate: 0.0,
                }),
            ],
        )
        .unwrap();
        let path = det.sample_path(0, 6, &mut rng).unwrap();
        assert_eq!(path.states(), &[0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn geometric_holdings_reduce_to_markov_chain() {
        // With geometric holdings p_i the semi-Markov process is a Markov
        // chain: P(S_{t+1}=j | S_t=i) = p_i P^{i,j}, P(stay) = 1 - p_i.
        let p0 = 0.6;
        let p1 = 0.3;
        let mut couple = CharacteristicCouple::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![
                HoldingLaw::Fixed(geometric(p0)),
                HoldingLaw::Fixed(geometric(p1)),
            ],
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let n_steps = 100_000;
        let path = couple.sample_path(0, n_steps, &mut rng).unwrap();
        let mut stay = [0u64; 2];
        let mut seen = [0u64; 2];
        for w in path.states().windows(2) {
            seen[w[0]] += 1;
            if w[1] == w[0] {
                stay[w[0]] += 1;
            }
        }
        for (i, p) in [(0usize, p0), (1usize, p1)] {
            let frac = stay[i] as f64 / seen[i] as f64;
            let expect = 1.0 - p;
            let se = (expect * (1.0 - expect) / seen[i] as f64).sqrt();
            assert!(
                (frac - expect).abs() < 3.0 * se,
                "state {i}: stay freq {frac} vs {expect}"
            );
        }
    }

    #[test]
    fn time_indexed_posterior_worked_example() {
        // path (i0,i0,i1,i2,i2,i2): the i0-block of length 2 is followed by
        // i1, the i1-block of length 1 by i2.
        let n = 3;
        let holdings = vec![bs(1.0, geometric(0.5)); n];
        let jumps: Vec<DirichletParams> = (0..n)
            .map(|i| {
                DirichletParams::new((0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                    .unwrap()
            })
            .collect();
        let prior = TimeIndexedJumpParams::uniform_over_time(holdings, jumps).unwrap();
        let post = prior.posterior(&seq(&[0, 0, 1, 2, 2, 2])).unwrap();

        assert_eq!(post.jump_at(0, 2).mass(1), 2.0);
        assert_eq!(post.jump_at(0, 2).mass(2), 1.0);
        // unlisted times fall back to the untouched default
        assert_eq!(post.jump_at(0, 1).mass(1), 1.0);
        assert_eq!(post.jump_at(1, 1).mass(2), 2.0);
        assert_eq!(post.jump_at(2, 1).mass(0), 1.0);

        // holding updates identical to the base model
        assert_eq!(post.holding(0).exact_observations().count_at(2), 1);
        assert_eq!(post.holding(2).censored_observations().count_at(2), 1);

        // no-jump path leaves everything unchanged
        assert_eq!(prior.posterior(&seq(&[1])).unwrap(), prior);
    }

    #[test]
    fn time_indexed_increments_marginalize_to_transition_counts() {
        let n = 3;
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let holdings = vec![bs(1.0, geometric(0.5)); n];
        let jumps: Vec<DirichletParams> = (0..n)
            .map(|i| {
                DirichletParams::new((0..n).map(|j| if i == j { 0.0 } else { 0.5 }).collect())
                    .unwrap()
            })
            .collect();
        let prior = TimeIndexedJumpParams::uniform_over_time(holdings, jumps).unwrap();
        for _ in 0..50 {
            let len = rng.random_range(1..=30);
            let states: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
            let path = seq(&states);
            let stats = CountingStats::from_path(&path, n).unwrap();
            let post = prior.posterior(&path).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut summed = 0.0;
                    for (len, _) in stats.blocks(i).iter() {
                        summed += post.jump_at(i, len).mass(j) - prior.jump_at(i, len).mass(j);
                    }
                    assert_eq!(summed, stats.transition(i, j) as f64, "i={i} j={j}");
                }
            }
        }
    }
}
