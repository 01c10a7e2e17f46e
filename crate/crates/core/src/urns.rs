//! Reinforced urn constructions.
//!
//! Two building blocks generate the conjugate families by reinforcement:
//!
//! * [`DirUrn`]: a generalized Polya urn whose initial composition is a
//!   base measure; every drawn color is replaced with one extra ball of the
//!   same color. Successive draws form an exchangeable sequence.
//! * [`BsSystem`]: a chain of two-color urns, urn `t` starting with
//!   `c(t)F0({t})` black and `c(t)F0((t,+inf))` white mass. A walk from urn 1
//!   draws until the first black ball; the stopping depth is a holding-time
//!   draw, and the visited urns keep their reinforcements.
//!
//! [`UrnProcessState`] wires one urn per state (or per pair, or per
//! state-and-time, depending on the [`UrnModelKind`]) into a random walk over
//! states whose one-step law reproduces the predictive kernel exactly.

use rand::Rng;

use crate::betastacy::{CenteringDistribution, PrecisionFunction};
use crate::dirichlet::DirichletParams;
use crate::error::{Result, SmbsError};
use crate::model::{PathDecomposition, State, StateSequence};
use crate::smbs::{SmbsParams, TimeIndexedJumpParams};

/// Default cap on urn-walk draws before a non-terminating walk is reported.
pub const DEFAULT_WALK_CAP: u64 = 1_000_000;

/// Generalized Polya urn over the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct DirUrn {
    composition: Vec<f64>,
    draws: u64,
}

impl DirUrn {
    pub fn new(composition: Vec<f64>) -> Result<Self> {
        if composition.is_empty()
            || composition.iter().any(|m| !m.is_finite() || *m < 0.0)
            || composition.iter().sum::<f64>() <= 0.0
        {
            return Err(SmbsError::EmptyUrn);
        }
        Ok(Self {
            composition,
            draws: 0,
        })
    }

    pub fn from_params(params: &DirichletParams) -> Self {
        Self {
            composition: params.masses().to_vec(),
            draws: 0,
        }
    }

    pub fn composition(&self) -> &[f64] {
        &self.composition
    }

    pub fn total(&self) -> f64 {
        self.composition.iter().sum()
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Draw a color and reinforce it with one extra ball.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<State> {
        let u: f64 = rng.random();
        self.draw_with(u)
    }

    /// Deterministic draw from a uniform variate in `[0,1)`.
    pub(crate) fn draw_with(&mut self, u: f64) -> Result<State> {
        let total = self.total();
        if total <= 0.0 {
            return Err(SmbsError::EmptyUrn);
        }
        let color = crate::smbs::pick_categorical(&self.composition, u);
        self.observe(color);
        Ok(color)
    }

    /// Reinforce `color` as if it had been drawn.
    pub fn observe(&mut self, color: State) {
        self.composition[color] += 1.0;
        self.draws += 1;
    }

    /// Exact probability of observing the given color sequence in successive
    /// draws, computed in closed form from the current composition.
    pub fn sequence_probability(&self, colors: &[State]) -> f64 {
        let mut comp = self.composition.clone();
        let mut prob = 1.0;
        for &c in colors {
            let total: f64 = comp.iter().sum();
            prob *= comp[c] / total;
            comp[c] += 1.0;
        }
        prob
    }
}

/// Chain of two-color reinforced urns characterizing one holding-time
/// distribution. Urns materialize lazily on first visit.
#[derive(Debug, Clone, PartialEq)]
pub struct BsSystem {
    precision: PrecisionFunction,
    centering: CenteringDistribution,
    /// (black, white) mass per depth, index `t-1`.
    urns: Vec<(f64, f64)>,
    walk_cap: u64,
}

impl BsSystem {
    pub fn new(precision: PrecisionFunction, centering: CenteringDistribution) -> Result<Self> {
        centering.validate()?;
        Ok(Self {
            precision,
            centering,
            urns: Vec::new(),
            walk_cap: DEFAULT_WALK_CAP,
        })
    }

    pub fn with_walk_cap(mut self, cap: u64) -> Self {
        self.walk_cap = cap;
        self
    }

    fn materialize(&mut self, t: u64) {
        while (self.urns.len() as u64) < t {
            let u = self.urns.len() as u64 + 1;
            let c = self.precision.at(u);
            self.urns.push((
                c * self.centering.mass_at(u),
                c * self.centering.survival_gt(u),
            ));
        }
    }

    /// Current (black, white) masses of urn `t`.
    pub fn urn(&mut self, t: u64) -> (f64, f64) {
        self.materialize(t);
        self.urns[t as usize - 1]
    }

    /// Walk the chain from urn 1, reinforcing every visited urn, until the
    /// first black draw; returns the stopping depth.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u64> {
        let mut depth = 1u64;
        loop {
            if depth > self.walk_cap {
                return Err(SmbsError::WalkCapExceeded(self.walk_cap));
            }
            if self.draw_step_with(depth, rng.random())? {
                return Ok(depth);
            }
            depth += 1;
        }
    }

    /// One urn visit at `depth` driven by a uniform variate: draws black
    /// (true, the walk stops) or white (false, it continues), and reinforces.
    pub(crate) fn draw_step_with(&mut self, depth: u64, u: f64) -> Result<bool> {
        let (black, white) = self.urn(depth);
        let total = black + white;
        if total <= 0.0 {
            return Err(SmbsError::EmptyUrn);
        }
        let is_black = u * total < black;
        self.reinforce(depth, is_black);
        Ok(is_black)
    }

    fn reinforce(&mut self, depth: u64, black: bool) {
        let urn = &mut self.urns[depth as usize - 1];
        if black {
            urn.0 += 1.0;
        } else {
            urn.1 += 1.0;
        }
    }

    /// Absorb an exact observation `T = t`: white into urns `1..t`, black
    /// into urn `t`.
    pub fn observe_exact(&mut self, t: u64) {
        self.materialize(t);
        for s in 1..t {
            self.reinforce(s, false);
        }
        self.reinforce(t, true);
    }

    /// Absorb a censored observation `T > l`: white into urns `1..=l`.
    pub fn observe_censored(&mut self, l: u64) {
        self.materialize(l);
        for s in 1..=l {
            self.reinforce(s, false);
        }
    }

    /// `P(T > t | history)` from the current compositions.
    pub fn survival_prob(&mut self, t: u64) -> Result<f64> {
        let mut prob = 1.0;
        for s in 1..=t {
            let (black, white) = self.urn(s);
            let total = black + white;
            if total <= 0.0 {
                return Err(SmbsError::EmptyUrn);
            }
            prob *= white / total;
        }
        Ok(prob)
    }

    /// (white ratio, black ratio) of the urn at `depth`.
    pub fn step_prob(&mut self, depth: u64) -> Result<(f64, f64)> {
        let (black, white) = self.urn(depth);
        let total = black + white;
        if total <= 0.0 {
            return Err(SmbsError::EmptyUrn);
        }
        Ok((white / total, black / total))
    }
}

/// Which urns drive the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrnModelKind {
    /// Holding time from the state's system, next state from the state's urn.
    Standard,
    /// Next state first from the state's urn, then holding time from the
    /// system attached to the (state, destination) pair.
    DestinationIndexedHolding,
    /// Holding time first from the state's system, then next state from the
    /// urn attached to (state, holding time).
    TimeIndexedJump,
}

enum UrnStores {
    Standard {
        jump: Vec<DirUrn>,
        hold: Vec<BsSystem>,
    },
    DestinationIndexedHolding {
        jump: Vec<DirUrn>,
        hold: Vec<Vec<Option<BsSystem>>>,
    },
    TimeIndexedJump {
        defaults: Vec<DirichletParams>,
        jump: Vec<std::collections::BTreeMap<u64, DirUrn>>,
        hold: Vec<BsSystem>,
    },
}

/// Per-state (and per-pair) visit counters accumulated while generating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceDiagnostics {
    pub state_visits: Vec<u64>,
    pub pair_visits: Vec<Vec<u64>>,
}

impl RecurrenceDiagnostics {
    fn new(n: usize) -> Self {
        Self {
            state_visits: vec![0; n],
            pair_visits: vec![vec![0; n]; n],
        }
    }
}

/// One urn draw, for optional trace output.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UrnTraceEvent {
    pub urn_id: String,
    pub color: String,
    pub pre_masses: Vec<f64>,
    pub post_masses: Vec<f64>,
}

/// The full urn system plus the walk position. Mutable and single-owner: a
/// generation run owns its state exclusively.
pub struct UrnProcessState {
    kind: UrnModelKind,
    stores: UrnStores,
    space_ids: Vec<u32>,
    current: State,
    /// Depth `x` of the next urn visit in the current state's system.
    depth: u64,
    /// Destination already drawn but not yet reached (destination-indexed
    /// model only).
    pending_next: Option<State>,
    diag: RecurrenceDiagnostics,
    trace: Option<Vec<UrnTraceEvent>>,
}

impl UrnProcessState {
    /// Urns matching a prior in the per-state model.
    pub fn standard(params: &SmbsParams, start: State) -> Result<Self> {
        let n = params.n_states();
        check_start(start, n)?;
        let jump = params
            .states()
            .iter()
            .map(|sp| DirUrn::from_params(&sp.jump))
            .collect();
        let hold = params
            .states()
            .iter()
            .map(|sp| {
                BsSystem::new(
                    sp.holding.precision().clone(),
                    sp.holding.centering().clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_stores(
            UrnModelKind::Standard,
            UrnStores::Standard { jump, hold },
            n,
            start,
        ))
    }

    /// Urns for the model where the holding time depends on the destination:
    /// one system per ordered pair.
    pub fn destination_indexed(
        jump: Vec<DirichletParams>,
        pair_systems: Vec<Vec<Option<BsSystem>>>,
        start: State,
    ) -> Result<Self> {
        let n = jump.len();
        check_start(start, n)?;
        if pair_systems.len() != n || pair_systems.iter().any(|row| row.len() != n) {
            return Err(SmbsError::InvalidStateSpace);
        }
        for (i, jp) in jump.iter().enumerate() {
            if jp.len() != n || jp.mass(i) != 0.0 {
                return Err(SmbsError::NonZeroSelfMass(i));
            }
        }
        let jump = jump.iter().map(DirUrn::from_params).collect();
        Ok(Self::with_stores(
            UrnModelKind::DestinationIndexedHolding,
            UrnStores::DestinationIndexedHolding {
                jump,
                hold: pair_systems,
            },
            n,
            start,
        ))
    }

    /// Urns matching a time-indexed-jump prior: Dirichlet urns materialize
    /// per (state, holding time) on first use.
    pub fn time_indexed(params: &TimeIndexedJumpParams, start: State) -> Result<Self> {
        let n = params.n_states();
        check_start(start, n)?;
        let hold = (0..n)
            .map(|i| {
                BsSystem::new(
                    params.holding(i).precision().clone(),
                    params.holding(i).centering().clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let defaults = (0..n).map(|i| params.default_jump(i).clone()).collect();
        let mut jump: Vec<std::collections::BTreeMap<u64, DirUrn>> =
            vec![std::collections::BTreeMap::new(); n];
        for (i, row) in jump.iter_mut().enumerate() {
            for (t, override_params) in params.time_overrides(i) {
                row.insert(t, DirUrn::from_params(override_params));
            }
        }
        Ok(Self::with_stores(
            UrnModelKind::TimeIndexedJump,
            UrnStores::TimeIndexedJump {
                defaults,
                jump,
                hold,
            },
            n,
            start,
        ))
    }

    fn with_stores(kind: UrnModelKind, stores: UrnStores, n: usize, start: State) -> Self {
        Self {
            kind,
            stores,
            space_ids: (0..n as u32).collect(),
            current: start,
            depth: 1,
            pending_next: None,
            diag: RecurrenceDiagnostics::new(n),
            trace: None,
        }
    }

    /// Use external ids in trace output.
    pub fn with_space_ids(mut self, ids: Vec<u32>) -> Self {
        self.space_ids = ids;
        self
    }

    /// Cap every holding-time walk at `cap` draws.
    pub fn set_walk_cap(&mut self, cap: u64) {
        match &mut self.stores {
            UrnStores::Standard { hold, .. } | UrnStores::TimeIndexedJump { hold, .. } => {
                for sys in hold {
                    sys.walk_cap = cap;
                }
            }
            UrnStores::DestinationIndexedHolding { hold, .. } => {
                for row in hold {
                    for sys in row.iter_mut().flatten() {
                        sys.walk_cap = cap;
                    }
                }
            }
        }
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_trace(&mut self) -> Vec<UrnTraceEvent> {
        self.trace.take().unwrap_or_default()
    }

    pub fn kind(&self) -> UrnModelKind {
        self.kind
    }

    pub fn n_states(&self) -> usize {
        self.diag.state_visits.len()
    }

    pub fn current(&self) -> State {
        self.current
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    /// Visit counters accumulated so far, a finite-horizon stand-in for the
    /// recurrence conditions.
    pub fn recurrence_diagnostics(&self) -> &RecurrenceDiagnostics {
        &self.diag
    }

    fn id_of(&self, state: State) -> u32 {
        self.space_ids[state]
    }

    fn record_hold_event(
        &mut self,
        state: State,
        dest: Option<State>,
        depth: u64,
        pre: (f64, f64),
        post: (f64, f64),
        black: bool,
    ) {
        if let Some(trace) = &mut self.trace {
            let urn_id = match dest {
                None => format!("V:{}:{}", self.space_ids[state], depth),
                Some(d) => format!(
                    "V:{}:{}:{}",
                    self.space_ids[state], self.space_ids[d], depth
                ),
            };
            trace.push(UrnTraceEvent {
                urn_id,
                color: if black { "black" } else { "white" }.into(),
                pre_masses: vec![pre.0, pre.1],
                post_masses: vec![post.0, post.1],
            });
        }
    }

    fn record_jump_event(
        &mut self,
        state: State,
        time: Option<u64>,
        pre: Vec<f64>,
        post: Vec<f64>,
        color: State,
    ) {
        let urn_id = match time {
            None => format!("U:{}", self.space_ids[state]),
            Some(t) => format!("U:{}:{}", self.space_ids[state], t),
        };
        let color = self.id_of(color).to_string();
        if let Some(trace) = &mut self.trace {
            trace.push(UrnTraceEvent {
                urn_id,
                color,
                pre_masses: pre,
                post_masses: post,
            });
        }
    }

    /// Draw a full holding time for `current` (standard and time-indexed
    /// models draw from the state's system; the destination-indexed model
    /// requires `dest`).
    fn draw_holding<R: Rng + ?Sized>(&mut self, dest: Option<State>, rng: &mut R) -> Result<u64> {
        let state = self.current;
        let mut depth = self.depth;
        loop {
            let (cap, pre, black, post) = {
                let system = self.hold_system(state, dest)?;
                let cap = system.walk_cap;
                let pre = system.urn(depth);
                let black = system.draw_step_with(depth, rng.random())?;
                let post = system.urn(depth);
                (cap, pre, black, post)
            };
            self.record_hold_event(state, dest, depth, pre, post, black);
            if black {
                return Ok(depth);
            }
            depth += 1;
            if depth > cap {
                return Err(SmbsError::WalkCapExceeded(cap));
            }
        }
    }

    fn hold_system(&mut self, state: State, dest: Option<State>) -> Result<&mut BsSystem> {
        match (&mut self.stores, dest) {
            (UrnStores::Standard { hold, .. }, None) => Ok(&mut hold[state]),
            (UrnStores::TimeIndexedJump { hold, .. }, None) => Ok(&mut hold[state]),
            (UrnStores::DestinationIndexedHolding { hold, .. }, Some(d)) => hold[state][d]
                .as_mut()
                .ok_or(SmbsError::UnsupportedUrnModel(
                    "missing holding system for pair",
                )),
            _ => Err(SmbsError::UnsupportedUrnModel(
                "holding draw does not match the model",
            )),
        }
    }

    fn draw_jump<R: Rng + ?Sized>(&mut self, holding: Option<u64>, rng: &mut R) -> Result<State> {
        let state = self.current;
        let u: f64 = rng.random();
        let (time_key, pre, color, post) = match &mut self.stores {
            UrnStores::Standard { jump, .. }
            | UrnStores::DestinationIndexedHolding { jump, .. } => {
                let urn = &mut jump[state];
                let pre = urn.composition().to_vec();
                let color = urn.draw_with(u)?;
                (None, pre, color, urn.composition().to_vec())
            }
            UrnStores::TimeIndexedJump { defaults, jump, .. } => {
                let t = holding.ok_or(SmbsError::UnsupportedUrnModel(
                    "time-indexed jump needs the holding time",
                ))?;
                let urn = jump[state]
                    .entry(t)
                    .or_insert_with(|| DirUrn::from_params(&defaults[state]));
                let pre = urn.composition().to_vec();
                let color = urn.draw_with(u)?;
                (Some(t), pre, color, urn.composition().to_vec())
            }
        };
        self.record_jump_event(state, time_key, pre, post, color);
        Ok(color)
    }

    /// Generate `n_jumps` complete blocks starting afresh from `start`,
    /// reinforcing every urn along the way. The returned decomposition ends
    /// with a just-entered terminal state of age zero.
    pub fn generate<R: Rng + ?Sized>(
        &mut self,
        start: State,
        n_jumps: u64,
        rng: &mut R,
    ) -> Result<PathDecomposition> {
        check_start(start, self.n_states())?;
        self.current = start;
        self.depth = 1;
        self.pending_next = None;
        self.diag.state_visits[start] += 1;

        let mut visited = vec![start];
        let mut holding = Vec::with_capacity(n_jumps as usize);
        for _ in 0..n_jumps {
            let (t, next) = match self.kind {
                UrnModelKind::Standard => {
                    let t = self.draw_holding(None, rng)?;
                    let next = self.draw_jump(None, rng)?;
                    (t, next)
                }
                UrnModelKind::DestinationIndexedHolding => {
                    let next = self.draw_jump(None, rng)?;
                    let t = self.draw_holding(Some(next), rng)?;
                    (t, next)
                }
                UrnModelKind::TimeIndexedJump => {
                    let t = self.draw_holding(None, rng)?;
                    let next = self.draw_jump(Some(t), rng)?;
                    (t, next)
                }
            };
            self.diag.pair_visits[self.current][next] += 1;
            self.diag.state_visits[next] += 1;
            holding.push(t);
            visited.push(next);
            self.current = next;
            self.depth = 1;
        }
        PathDecomposition::new(visited, holding, 0)
    }

    /// Condition the urns on one observed step from the current position.
    /// Not available for the destination-indexed model, whose terminal block
    /// cannot be attributed to a pair system.
    pub fn observe_step(&mut self, next: State) -> Result<()> {
        if next >= self.n_states() {
            return Err(SmbsError::StateOutOfRange {
                index: next,
                n_states: self.n_states(),
            });
        }
        let state = self.current;
        let depth = self.depth;
        match &mut self.stores {
            UrnStores::Standard { jump, hold } => {
                if next == state {
                    hold[state].materialize(depth);
                    hold[state].reinforce(depth, false);
                    self.depth += 1;
                } else {
                    hold[state].materialize(depth);
                    hold[state].reinforce(depth, true);
                    jump[state].observe(next);
                    self.current = next;
                    self.depth = 1;
                    self.diag.pair_visits[state][next] += 1;
                    self.diag.state_visits[next] += 1;
                }
            }
            UrnStores::TimeIndexedJump {
                defaults,
                jump,
                hold,
            } => {
                if next == state {
                    hold[state].materialize(depth);
                    hold[state].reinforce(depth, false);
                    self.depth += 1;
                } else {
                    hold[state].materialize(depth);
                    hold[state].reinforce(depth, true);
                    let urn = jump[state]
                        .entry(depth)
                        .or_insert_with(|| DirUrn::from_params(&defaults[state]));
                    urn.observe(next);
                    self.current = next;
                    self.depth = 1;
                    self.diag.pair_visits[state][next] += 1;
                    self.diag.state_visits[next] += 1;
                }
            }
            UrnStores::DestinationIndexedHolding { .. } => {
                return Err(SmbsError::UnsupportedUrnModel(
                    "conditioning on observed paths requires attributing the open block to a pair system",
                ));
            }
        }
        Ok(())
    }

    /// Condition on a whole observed prefix: the walk is placed at the
    /// prefix start and fed each subsequent step.
    pub fn observe_path(&mut self, path: &StateSequence) -> Result<()> {
        self.current = path.first();
        check_start(self.current, self.n_states())?;
        self.depth = 1;
        self.pending_next = None;
        self.diag.state_visits[self.current] += 1;
        for &next in &path.states()[1..] {
            self.observe_step(next)?;
        }
        Ok(())
    }

    /// Exact pmf of the next observable state, read off the current urn
    /// compositions: stay is the white-mass ratio at the current depth, a
    /// move to `j` is the black-mass ratio times the jump-urn ratio of `j`.
    pub fn step_prob(&mut self) -> Result<Vec<f64>> {
        let n = self.n_states();
        let state = self.current;
        let depth = self.depth;
        let mut pmf = vec![0.0; n];
        match &mut self.stores {
            UrnStores::Standard { jump, hold } => {
                let (white_ratio, black_ratio) = hold[state].step_prob(depth)?;
                let total = jump[state].total();
                if total <= 0.0 {
                    return Err(SmbsError::EmptyUrn);
                }
                for (j, p) in pmf.iter_mut().enumerate() {
                    if j == state {
                        *p = white_ratio;
                    } else {
                        *p = black_ratio * jump[state].composition()[j] / total;
                    }
                }
            }
            UrnStores::TimeIndexedJump {
                defaults,
                jump,
                hold,
            } => {
                let (white_ratio, black_ratio) = hold[state].step_prob(depth)?;
                let (comp, total): (Vec<f64>, f64) = match jump[state].get(&depth) {
                    Some(urn) => (urn.composition().to_vec(), urn.total()),
                    None => (defaults[state].masses().to_vec(), defaults[state].total()),
                };
                if total <= 0.0 {
                    return Err(SmbsError::EmptyUrn);
                }
                for (j, p) in pmf.iter_mut().enumerate() {
                    if j == state {
                        *p = white_ratio;
                    } else {
                        *p = black_ratio * comp[j] / total;
                    }
                }
            }
            UrnStores::DestinationIndexedHolding { jump, hold } => {
                match self.pending_next {
                    Some(dest) => {
                        let system =
                            hold[state][dest]
                                .as_mut()
                                .ok_or(SmbsError::UnsupportedUrnModel(
                                    "missing holding system for pair",
                                ))?;
                        let (white_ratio, black_ratio) = system.step_prob(depth)?;
                        pmf[state] = white_ratio;
                        pmf[dest] = black_ratio;
                    }
                    None => {
                        // mix over the not-yet-drawn destination
                        let total = jump[state].total();
                        if total <= 0.0 {
                            return Err(SmbsError::EmptyUrn);
                        }
                        let comp = jump[state].composition().to_vec();
                        for (j, &mass) in comp.iter().enumerate() {
                            if j == state || mass <= 0.0 {
                                continue;
                            }
                            let system =
                                hold[state][j]
                                    .as_mut()
                                    .ok_or(SmbsError::UnsupportedUrnModel(
                                        "missing holding system for pair",
                                    ))?;
                            let (white_ratio, black_ratio) = system.step_prob(depth)?;
                            let weight = mass / total;
                            pmf[state] += weight * white_ratio;
                            pmf[j] += weight * black_ratio;
                        }
                    }
                }
            }
        }
        Ok(pmf)
    }
}

fn check_start(start: State, n: usize) -> Result<()> {
    if start >= n {
        return Err(SmbsError::StateOutOfRange {
            index: start,
            n_states: n,
        });
    }
    Ok(())
}
