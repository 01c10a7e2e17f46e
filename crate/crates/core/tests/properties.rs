//! Property tests for the structural invariants.

mod common;

use proptest::collection::vec;
use proptest::prelude::*;

use smbs::model::{CountingStats, StateSequence};
use smbs::predictive::PredictiveState;

use common::uniform_geometric_prior;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decompose_compose_round_trip(states in vec(0usize..4, 1..80)) {
        let path = StateSequence::new(states).unwrap();
        let decomposition = path.decompose();
        let covered: u64 = decomposition.holding().iter().sum::<u64>()
            + decomposition.terminal_age() + 1;
        prop_assert_eq!(covered, path.len() as u64);
        prop_assert_eq!(decomposition.compose(path.horizon()).unwrap(), path);
    }

    #[test]
    fn incremental_equals_batch_counting(states in vec(0usize..4, 1..80)) {
        let path = StateSequence::new(states).unwrap();
        let mut incremental = CountingStats::fresh(path.first(), 0, 4).unwrap();
        for &s in &path.states()[1..] {
            incremental.push_state(s);
        }
        prop_assert_eq!(incremental, CountingStats::from_path(&path, 4).unwrap());
    }

    #[test]
    fn pair_histograms_marginalize(states in vec(0usize..3, 1..60)) {
        let path = StateSequence::new(states).unwrap();
        let stats = CountingStats::from_path(&path, 3).unwrap();
        for i in 0..3 {
            let max_len = path.len() as u64;
            for l in 1..=max_len {
                let sum: u64 = (0..3).map(|j| stats.pair_blocks(i, j).count_at(l)).sum();
                prop_assert_eq!(sum, stats.blocks(i).count_at(l));
            }
            let m_total: u64 = (0..3).map(|j| stats.transition(i, j)).sum();
            prop_assert_eq!(stats.blocks(i).total(), m_total);
        }
        let jumps: u64 = (0..3).map(|i| stats.blocks(i).total()).sum();
        prop_assert_eq!(jumps, path.decompose().n_jumps() as u64);
    }

    #[test]
    fn kernel_is_a_distribution(states in vec(0usize..3, 1..40), c in 0.1f64..5.0, p in 0.05f64..0.95) {
        let prior = uniform_geometric_prior(3, c, p);
        let path = StateSequence::new(states).unwrap();
        let ps = PredictiveState::from_prefix(&prior, &path).unwrap();
        let k = ps.kernel().unwrap();
        prop_assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for &v in &k {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn sampled_survival_monotone(seed in 0u64..5000, c in 0.1f64..5.0, p in 0.05f64..0.95) {
        let prior = uniform_geometric_prior(2, c, p);
        let mut survival = prior.state(0).holding.sample(seed);
        let mut prev = 1.0;
        for t in 1..60 {
            let v = survival.survival(t).unwrap();
            prop_assert!(v <= prev + 1e-15);
            prop_assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn posterior_update_order_invariant(
        obs in vec(1u64..8, 0..6),
        censor in 1u64..6,
    ) {
        let prior = uniform_geometric_prior(2, 1.3, 0.4);
        let holding = &prior.state(0).holding;
        let batch = holding
            .posterior_exact(&obs).unwrap()
            .posterior_censored(censor).unwrap();
        // censor first, then exact observations one at a time, reversed
        let mut other = holding.posterior_censored(censor).unwrap();
        for &t in obs.iter().rev() {
            other = other.posterior_exact(&[t]).unwrap();
        }
        prop_assert_eq!(batch, other);
    }
}
