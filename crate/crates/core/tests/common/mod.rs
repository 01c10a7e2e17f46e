#![allow(dead_code)]

//! Shared test oracles, independent of the library's inference code paths.
//!
//! The moment oracle computes exact marginal path probabilities by
//! integrating the semi-Markov likelihood against the prior: Beta moments
//! for the per-time hazards and Dirichlet(-multinomial) moments for the
//! transition rows, all via rising factorials. It relies on its own block
//! scanner and its own pmf closures.

use smbs::betastacy::{BetaStacyParams, CenteringDistribution, PrecisionFunction};
use smbs::dirichlet::DirichletParams;
use smbs::model::StateSequence;
use smbs::predictive::PredictiveState;
use smbs::smbs::{SmbsParams, StatePrior};

/// A block from the naive scanner: (state, length, is_terminal).
pub fn scan_blocks(states: &[usize]) -> Vec<(usize, u64, bool)> {
    let mut out = Vec::new();
    let mut run_state = states[0];
    let mut run_len = 1u64;
    for &s in &states[1..] {
        if s == run_state {
            run_len += 1;
        } else {
            out.push((run_state, run_len, false));
            run_state = s;
            run_len = 1;
        }
    }
    out.push((run_state, run_len, true));
    out
}

/// Oracle-side prior description: per-state constant precision, centering
/// pmf and tail closures, and jump base masses.
pub struct OracleSpec {
    pub jump: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub f0_mass: Vec<Box<dyn Fn(u64) -> f64>>,
    pub f0_tail_gt: Vec<Box<dyn Fn(u64) -> f64>>,
}

impl OracleSpec {
    /// Uniform off-diagonal jump mass `1`, constant precision, geometric
    /// centerings.
    pub fn uniform_geometric(n: usize, c: f64, p: f64) -> Self {
        Self {
            jump: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .collect(),
            c: vec![c; n],
            f0_mass: (0..n)
                .map(|_| {
                    Box::new(move |t: u64| p * (1.0 - p).powi(t as i32 - 1))
                        as Box<dyn Fn(u64) -> f64>
                })
                .collect(),
            f0_tail_gt: (0..n)
                .map(|_| {
                    Box::new(move |t: u64| (1.0 - p).powi(t as i32)) as Box<dyn Fn(u64) -> f64>
                })
                .collect(),
        }
    }

    /// Uniform off-diagonal jump mass, two-atom centering on {1, 2} with
    /// mass `a` at 1.
    pub fn uniform_two_atom(n: usize, c: f64, a: f64) -> Self {
        Self {
            jump: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .collect(),
            c: vec![c; n],
            f0_mass: (0..n)
                .map(|_| {
                    Box::new(move |t: u64| match t {
                        1 => a,
                        2 => 1.0 - a,
                        _ => 0.0,
                    }) as Box<dyn Fn(u64) -> f64>
                })
                .collect(),
            f0_tail_gt: (0..n)
                .map(|_| {
                    Box::new(move |t: u64| match t {
                        0 => 1.0,
                        1 => 1.0 - a,
                        _ => 0.0,
                    }) as Box<dyn Fn(u64) -> f64>
                })
                .collect(),
        }
    }
}

fn rising(x: f64, n: u64) -> f64 {
    let mut out = 1.0;
    for k in 0..n {
        out *= x + k as f64;
    }
    out
}

/// Exact marginal probability of observing `path` under the prior, by
/// integrating the likelihood against Beta and Dirichlet moments.
pub fn oracle_path_probability(spec: &OracleSpec, path: &[usize]) -> f64 {
    let n = spec.jump.len();
    let blocks = scan_blocks(path);

    // transition factor: sequential Dirichlet-multinomial predictive products
    let mut prob = 1.0;
    let mut counts = vec![vec![0u64; n]; n];
    for w in blocks.windows(2) {
        let (i, j) = (w[0].0, w[1].0);
        let total: f64 = spec.jump[i].iter().sum::<f64>() + counts[i].iter().sum::<u64>() as f64;
        prob *= (spec.jump[i][j] + counts[i][j] as f64) / total;
        counts[i][j] += 1;
    }

    // holding factor per state: independent Beta moments per depth
    for i in 0..n {
        let exact: Vec<u64> = blocks
            .iter()
            .filter(|&&(s, _, term)| s == i && !term)
            .map(|&(_, len, _)| len)
            .collect();
        let censored_age: u64 = blocks
            .iter()
            .filter(|&&(s, _, term)| s == i && term)
            .map(|&(_, len, _)| len - 1)
            .sum();
        let max_depth = exact
            .iter()
            .copied()
            .chain(std::iter::once(censored_age))
            .max()
            .unwrap_or(0);
        for t in 1..=max_depth {
            let d = exact.iter().filter(|&&u| u == t).count() as u64;
            let s = exact.iter().filter(|&&u| u > t).count() as u64 + u64::from(censored_age >= t);
            if d + s == 0 {
                continue;
            }
            let a = spec.c[i] * (spec.f0_mass[i])(t);
            let b = spec.c[i] * (spec.f0_tail_gt[i])(t);
            if a + b <= 0.0 {
                return 0.0;
            }
            prob *= rising(a, d) * rising(b, s) / rising(a + b, d + s);
        }
    }
    prob
}

/// Library-side path probability: the chain-rule product of predictive
/// kernels, pruning once the running product hits zero.
pub fn rsm_path_probability(params: &SmbsParams, path: &[usize]) -> f64 {
    let prefix = StateSequence::new(vec![path[0]]).unwrap();
    let mut state = PredictiveState::from_prefix(params, &prefix).unwrap();
    let mut prob = 1.0;
    for &next in &path[1..] {
        let kernel = state
            .kernel()
            .expect("kernel defined on positive-probability prefix");
        prob *= kernel[next];
        if prob == 0.0 {
            return 0.0;
        }
        state.advance(next).unwrap();
    }
    prob
}

/// Library prior matching [`OracleSpec::uniform_geometric`].
pub fn uniform_geometric_prior(n: usize, c: f64, p: f64) -> SmbsParams {
    let states = (0..n)
        .map(|i| StatePrior {
            jump: DirichletParams::new((0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .unwrap(),
            holding: BetaStacyParams::new(
                PrecisionFunction::constant(c).unwrap(),
                CenteringDistribution::Geometric { p },
            )
            .unwrap(),
        })
        .collect();
    SmbsParams::new(states).unwrap()
}

/// Library prior matching [`OracleSpec::uniform_two_atom`].
pub fn uniform_two_atom_prior(n: usize, c: f64, a: f64) -> SmbsParams {
    let states = (0..n)
        .map(|i| StatePrior {
            jump: DirichletParams::new((0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
                .unwrap(),
            holding: BetaStacyParams::new(
                PrecisionFunction::constant(c).unwrap(),
                CenteringDistribution::Table {
                    pmf: vec![a, 1.0 - a],
                    tail_rate: 0.0,
                },
            )
            .unwrap(),
        })
        .collect();
    SmbsParams::new(states).unwrap()
}

/// All state sequences of exactly `len` over `n` states.
pub fn enumerate_paths(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for p in &out {
            for s in 0..n {
                let mut q = p.clone();
                q.push(s);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
