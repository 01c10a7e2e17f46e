//! State spaces, observed paths, and their sufficient statistics.
//!
//! A discrete-time semi-Markov path `s_{0:t}` can equivalently be described in
//! jump form: the number of jumps `N(t)`, the distinct visited states
//! `L_0, ..., L_{ N(t)}`, the holding times `T_0, ..., T_{N(t)-1}` of the
//! completed blocks, and the age `l(t)` of the (right-censored) terminal
//! block. Inference never needs the raw path beyond the counting statistics
//! derived here: per-state histograms of completed block lengths, the
//! transition count matrix, and the terminal block.

use std::collections::BTreeMap;

use crate::error::{Result, SmbsError};

/// Index of a state inside a [`StateSpace`]. All per-state structures are
/// dense vectors indexed by this.
pub type State = usize;

/// A finite, ordered set of states with external integer ids and optional
/// labels. Internally everything runs on dense indices `0..len()`; the ids
/// only matter at I/O boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    ids: Vec<u32>,
    labels: Vec<Option<String>>,
}

impl StateSpace {
    pub fn new(ids: Vec<u32>) -> Result<Self> {
        let labels = vec![None; ids.len()];
        Self::with_labels(ids, labels)
    }

    pub fn with_labels(ids: Vec<u32>, labels: Vec<Option<String>>) -> Result<Self> {
        if ids.is_empty() || labels.len() != ids.len() {
            return Err(SmbsError::InvalidStateSpace);
        }
        let mut seen = ids.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != ids.len() {
            return Err(SmbsError::InvalidStateSpace);
        }
        Ok(Self { ids, labels })
    }

    /// Space with ids `0..n`.
    pub fn indexed(n: usize) -> Self {
        Self {
            ids: (0..n as u32).collect(),
            labels: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id_of(&self, index: State) -> u32 {
        self.ids[index]
    }

    pub fn label_of(&self, index: State) -> Option<&str> {
        self.labels[index].as_deref()
    }

    pub fn index_of(&self, id: u32) -> Option<State> {
        self.ids.iter().position(|&x| x == id)
    }
}

/// An observed path `s_{0:t}`: a non-empty sequence of state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSequence {
    states: Vec<State>,
}

impl StateSequence {
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(SmbsError::EmptyPath);
        }
        Ok(Self { states })
    }

    /// Parse from external ids, validating membership in the space.
    pub fn from_ids(ids: &[u32], space: &StateSpace) -> Result<Self> {
        let states = ids
            .iter()
            .map(|&id| space.index_of(id).ok_or(SmbsError::UnknownStateId(id)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest time index, `t = len - 1`.
    pub fn horizon(&self) -> u64 {
        (self.states.len() - 1) as u64
    }

    pub fn first(&self) -> State {
        self.states[0]
    }

    pub fn last(&self) -> State {
        *self.states.last().unwrap()
    }

    /// Check every entry lies in a space of `n_states` states.
    pub fn validate_states(&self, n_states: usize) -> Result<()> {
        for &s in &self.states {
            if s >= n_states {
                return Err(SmbsError::StateOutOfRange { index: s, n_states });
            }
        }
        Ok(())
    }

    /// Rewrite the path in jump form.
    pub fn decompose(&self) -> PathDecomposition {
        let mut visited = vec![self.states[0]];
        let mut jump_times = Vec::new();
        for (t, &s) in self.states.iter().enumerate().skip(1) {
            if s != *visited.last().unwrap() {
                visited.push(s);
                jump_times.push(t as u64);
            }
        }
        let holding = jump_times
            .iter()
            .scan(0u64, |prev, &tau| {
                let t = tau - *prev;
                *prev = tau;
                Some(t)
            })
            .collect::<Vec<_>>();
        let terminal_age = self.horizon() - jump_times.last().copied().unwrap_or(0);
        PathDecomposition {
            visited,
            holding,
            jump_times,
            terminal_age,
        }
    }
}

/// Jump form of a path: visited states `L`, completed holding times `T`,
/// jump times `tau`, and the terminal block age `l(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    visited: Vec<State>,
    holding: Vec<u64>,
    jump_times: Vec<u64>,
    terminal_age: u64,
}

impl PathDecomposition {
    pub fn new(visited: Vec<State>, holding: Vec<u64>, terminal_age: u64) -> Result<Self> {
        if visited.is_empty() {
            return Err(SmbsError::EmptyPath);
        }
        if holding.len() + 1 != visited.len() {
            return Err(SmbsError::LengthMismatch {
                covered: holding.len() as u64,
                horizon: visited.len() as u64 - 1,
                required: visited.len() as u64 - 1,
            });
        }
        if visited.windows(2).any(|w| w[0] == w[1]) {
            return Err(SmbsError::RepeatedVisitedState);
        }
        if holding.contains(&0) {
            return Err(SmbsError::NonPositiveHolding);
        }
        let jump_times = holding
            .iter()
            .scan(0u64, |acc, &t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            visited,
            holding,
            jump_times,
            terminal_age,
        })
    }

    /// Number of jumps `N(t)`.
    pub fn n_jumps(&self) -> usize {
        self.holding.len()
    }

    /// Visited states `L_0..L_{N(t)}`.
    pub fn visited(&self) -> &[State] {
        &self.visited
    }

    /// Completed holding times `T_0..T_{N(t)-1}`.
    pub fn holding(&self) -> &[u64] {
        &self.holding
    }

    /// Jump times `tau_1..tau_{N(t)}`.
    pub fn jump_times(&self) -> &[u64] {
        &self.jump_times
    }

    /// Age `l(t)` of the terminal block.
    pub fn terminal_age(&self) -> u64 {
        self.terminal_age
    }

    /// `x(t) = l(t) + 1`, the length the terminal block reaches next step.
    pub fn terminal_age_next(&self) -> u64 {
        self.terminal_age + 1
    }

    pub fn terminal_state(&self) -> State {
        *self.visited.last().unwrap()
    }

    /// Rebuild the path `s_{0:horizon}`. The blocks plus the terminal block
    /// must cover exactly `horizon + 1` time points.
    pub fn compose(&self, horizon: u64) -> Result<StateSequence> {
        let covered: u64 = self.holding.iter().sum::<u64>() + self.terminal_age + 1;
        if covered != horizon + 1 {
            return Err(SmbsError::LengthMismatch {
                covered,
                horizon,
                required: horizon + 1,
            });
        }
        let mut states = Vec::with_capacity(covered as usize);
        for (k, &state) in self.visited.iter().enumerate() {
            let reps = if k < self.holding.len() {
                self.holding[k]
            } else {
                self.terminal_age + 1
            };
            states.extend(std::iter::repeat_n(state, reps as usize));
        }
        StateSequence::new(states)
    }
}

/// Sparse histogram over positive integer lengths with a cached total,
/// supporting the interval convention `H((a,b]) = H(b) - H(a)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LengthHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl LengthHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(value).or_insert(0) += count;
        self.total += count;
    }

    /// `H({v})`
    pub fn count_at(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// `H((0, v]) = H(v)` under the cumulative view.
    pub fn count_le(&self, value: u64) -> u64 {
        self.counts.range(..=value).map(|(_, c)| c).sum()
    }

    /// `H([v, +inf))`
    pub fn count_ge(&self, value: u64) -> u64 {
        self.total
            - if value == 0 {
                0
            } else {
                self.count_le(value - 1)
            }
    }

    /// `H((v, +inf))`
    pub fn count_gt(&self, value: u64) -> u64 {
        self.total - self.count_le(value)
    }

    /// `H((a, b])`
    pub fn count_interval(&self, a: u64, b: u64) -> u64 {
        if b <= a {
            0
        } else {
            self.count_le(b) - self.count_le(a)
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }
}

/// Sufficient statistics of an observed path: per-state histograms of
/// completed (non-terminal) block lengths, per-pair histograms of block
/// lengths split by the following state, the transition count matrix, and
/// the terminal block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingStats {
    n_states: usize,
    block_counts: Vec<LengthHistogram>,
    pair_block_counts: Vec<Vec<LengthHistogram>>,
    transitions: Vec<Vec<u64>>,
    terminal_state: State,
    terminal_age: u64,
}

impl CountingStats {
    /// Statistics of a path that has shown nothing yet beyond sitting in
    /// `state` for `age` extra steps. Used to continue predictions from a
    /// posterior without re-counting its data.
    pub fn fresh(state: State, age: u64, n_states: usize) -> Result<Self> {
        if state >= n_states {
            return Err(SmbsError::StateOutOfRange {
                index: state,
                n_states,
            });
        }
        Ok(Self {
            n_states,
            block_counts: vec![LengthHistogram::new(); n_states],
            pair_block_counts: vec![vec![LengthHistogram::new(); n_states]; n_states],
            transitions: vec![vec![0; n_states]; n_states],
            terminal_state: state,
            terminal_age: age,
        })
    }

    pub fn from_path(path: &StateSequence, n_states: usize) -> Result<Self> {
        path.validate_states(n_states)?;
        let mut stats = Self::fresh(path.first(), 0, n_states)?;
        for &next in &path.states()[1..] {
            stats.push_state(next);
        }
        Ok(stats)
    }

    /// Extend by one observed time step. A repeat of the terminal state ages
    /// the terminal block; a different state completes it.
    pub fn push_state(&mut self, next: State) {
        debug_assert!(next < self.n_states);
        if next == self.terminal_state {
            self.terminal_age += 1;
        } else {
            let completed_len = self.terminal_age + 1;
            let i = self.terminal_state;
            self.block_counts[i].add(completed_len, 1);
            self.pair_block_counts[i][next].add(completed_len, 1);
            self.transitions[i][next] += 1;
            self.terminal_state = next;
            self.terminal_age = 0;
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Histogram of completed `i`-block lengths, `N^{i,t}`.
    pub fn blocks(&self, i: State) -> &LengthHistogram {
        &self.block_counts[i]
    }

    /// Histogram of completed `i`-block lengths followed by `j`, `N^{i,j,t}`.
    pub fn pair_blocks(&self, i: State, j: State) -> &LengthHistogram {
        &self.pair_block_counts[i][j]
    }

    /// Transition count `M^{i,j}(t)`.
    pub fn transition(&self, i: State, j: State) -> u64 {
        self.transitions[i][j]
    }

    /// Total transitions out of `i`.
    pub fn transitions_from(&self, i: State) -> u64 {
        self.transitions[i].iter().sum()
    }

    /// Total number of completed blocks, which equals the jump count `N(t)`.
    pub fn n_jumps(&self) -> u64 {
        self.block_counts.iter().map(|h| h.total()).sum()
    }

    pub fn terminal_state(&self) -> State {
        self.terminal_state
    }

    /// `l(t)`
    pub fn terminal_age(&self) -> u64 {
        self.terminal_age
    }

    /// `x(t) = l(t) + 1`
    pub fn age_next(&self) -> u64 {
        self.terminal_age + 1
    }
}
