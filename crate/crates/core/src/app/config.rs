//! JSON run configuration and prior-bundle schema.
//!
//! A configuration names the state space, the prior (one block per state
//! with jump masses, precision head/tail and a centering distribution), and
//! the command parameters. The conjugate generalization with time-indexed
//! jump priors adds `default_masses` plus `time_indexed_jump_masses`
//! entries to a state block.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::betastacy::{BetaStacyParams, CenteringDistribution, PrecisionFunction};
use crate::dirichlet::DirichletParams;
use crate::error::{Result, SmbsError};
use crate::model::{StateSequence, StateSpace};
use crate::smbs::{SmbsParams, StatePrior, TimeIndexedJumpParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateConfig {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassEntry {
    pub state: u32,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionConfig {
    #[serde(default)]
    pub head: Vec<f64>,
    pub tail: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeMassEntry {
    pub t: u64,
    pub masses: Vec<MassEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatePriorConfig {
    pub state: u32,
    pub jump_masses: Vec<MassEntry>,
    pub precision: PrecisionConfig,
    pub centering: CenteringDistribution,
    /// Jump priors per holding time (time-indexed generalization only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_indexed_jump_masses: Option<Vec<TimeMassEntry>>,
    /// Default jump prior backing unlisted holding times; falls back to
    /// `jump_masses` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_masses: Option<Vec<MassEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorConfig {
    pub states: Vec<StatePriorConfig>,
}

/// Which urn construction drives `urn-trace`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UrnModelConfig {
    #[default]
    Standard,
    DestinationIndexedHolding,
    TimeIndexedJump,
}

/// Data-generating truth for simulation studies: a transition matrix plus
/// one holding distribution per state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthConfig {
    pub transition: Vec<Vec<f64>>,
    pub holdings: Vec<CenteringDistribution>,
    pub start: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    /// Evaluate posterior summaries on the grid `t = 1..=grid_max_t`.
    #[serde(default = "default_grid_max_t")]
    pub grid_max_t: u64,
    /// Number of posterior survival draws per combination.
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    /// Prefix lengths M of the first data path to condition on.
    #[serde(default)]
    pub prefix_lengths: Vec<u64>,
    /// Constant precision values c to sweep; empty keeps the configured
    /// precision blocks.
    #[serde(default)]
    pub c_values: Vec<f64>,
}

fn default_grid_max_t() -> u64 {
    20
}

fn default_n_samples() -> u64 {
    500
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            grid_max_t: default_grid_max_t(),
            n_samples: default_n_samples(),
            prefix_lengths: Vec::new(),
            c_values: Vec::new(),
        }
    }
}

/// Full run configuration. The RNG seed is mandatory and supplied on the
/// command line, never in the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub states: Vec<StateConfig>,
    pub prior: PriorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    /// Steps ahead for `predict`; independent of the data horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forecast_horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sims: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_jumps: Option<u64>,
    #[serde(default)]
    pub model: UrnModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk_cap: Option<u64>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        Ok(cfg)
    }

    pub fn state_space(&self) -> Result<StateSpace> {
        let ids = self.states.iter().map(|s| s.id).collect();
        let labels = self.states.iter().map(|s| s.label.clone()).collect();
        StateSpace::with_labels(ids, labels)
    }

    fn masses_vec(space: &StateSpace, entries: &[MassEntry]) -> Result<Vec<f64>> {
        let mut masses = vec![0.0; space.len()];
        for e in entries {
            let idx = space
                .index_of(e.state)
                .ok_or(SmbsError::UnknownStateId(e.state))?;
            masses[idx] = e.mass;
        }
        Ok(masses)
    }

    fn state_block(&self, space: &StateSpace, index: usize) -> Result<&StatePriorConfig> {
        let id = space.id_of(index);
        self.prior
            .states
            .iter()
            .find(|b| b.state == id)
            .ok_or_else(|| SmbsError::Config(format!("no prior block for state id {id}")))
    }

    /// Build the prior bundle, optionally overriding every precision with a
    /// constant `c`.
    pub fn smbs_params(&self, space: &StateSpace, c_override: Option<f64>) -> Result<SmbsParams> {
        let mut states = Vec::with_capacity(space.len());
        for i in 0..space.len() {
            let block = self.state_block(space, i)?;
            let jump = DirichletParams::new(Self::masses_vec(space, &block.jump_masses)?)?;
            let precision = match c_override {
                Some(c) => PrecisionFunction::constant(c)?,
                None => PrecisionFunction::new(block.precision.head.clone(), block.precision.tail)?,
            };
            let holding = BetaStacyParams::new(precision, block.centering.clone())?;
            states.push(StatePrior { jump, holding });
        }
        SmbsParams::new(states)
    }

    /// Build the time-indexed-jump bundle from the same blocks.
    pub fn time_indexed_params(&self, space: &StateSpace) -> Result<TimeIndexedJumpParams> {
        let n = space.len();
        let mut holdings = Vec::with_capacity(n);
        let mut defaults = Vec::with_capacity(n);
        let mut time_jumps = Vec::with_capacity(n);
        for i in 0..n {
            let block = self.state_block(space, i)?;
            let precision =
                PrecisionFunction::new(block.precision.head.clone(), block.precision.tail)?;
            holdings.push(BetaStacyParams::new(precision, block.centering.clone())?);
            let default_entries = block
                .default_masses
                .as_deref()
                .unwrap_or(&block.jump_masses);
            defaults.push(DirichletParams::new(Self::masses_vec(
                space,
                default_entries,
            )?)?);
            let mut by_time = BTreeMap::new();
            if let Some(entries) = &block.time_indexed_jump_masses {
                for e in entries {
                    by_time.insert(
                        e.t,
                        DirichletParams::new(Self::masses_vec(space, &e.masses)?)?,
                    );
                }
            }
            time_jumps.push(by_time);
        }
        TimeIndexedJumpParams::new(holdings, defaults, time_jumps)
    }

    /// Resolve the configured truth against the state space.
    pub fn truth(&self, space: &StateSpace) -> Result<Option<ResolvedTruth>> {
        let Some(t) = &self.truth else {
            return Ok(None);
        };
        let n = space.len();
        if t.transition.len() != n || t.holdings.len() != n {
            return Err(SmbsError::Config(
                "truth dimensions do not match the state space".into(),
            ));
        }
        let start = space
            .index_of(t.start)
            .ok_or(SmbsError::UnknownStateId(t.start))?;
        Ok(Some(ResolvedTruth {
            transition: t.transition.clone(),
            holdings: t.holdings.clone(),
            start,
        }))
    }

    pub fn start_index(&self, space: &StateSpace) -> Result<usize> {
        match self.start {
            Some(id) => space.index_of(id).ok_or(SmbsError::UnknownStateId(id)),
            None => Ok(0),
        }
    }
}

/// Truth with state ids resolved to indices.
#[derive(Debug, Clone)]
pub struct ResolvedTruth {
    pub transition: Vec<Vec<f64>>,
    pub holdings: Vec<CenteringDistribution>,
    pub start: usize,
}

/// Read a path file: one path per line, comma-separated integer state ids.
pub fn read_paths(path: &Path, space: &StateSpace) -> Result<Vec<StateSequence>> {
    let text = fs::read_to_string(path)?;
    parse_paths(&text, space)
}

pub fn parse_paths(text: &str, space: &StateSpace) -> Result<Vec<StateSequence>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ids = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| SmbsError::Config(format!("invalid state id '{tok}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(StateSequence::from_ids(&ids, space)?);
    }
    if out.is_empty() {
        return Err(SmbsError::Config("no paths in file".into()));
    }
    Ok(out)
}

/// Render paths in the same format.
pub fn format_paths(paths: &[StateSequence], space: &StateSpace) -> String {
    let mut out = String::new();
    for p in paths {
        let line: Vec<String> = p
            .states()
            .iter()
            .map(|&s| space.id_of(s).to_string())
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "states": [{"id": 1, "label": "run"}, {"id": 2}, {"id": 3}],
        "prior": {
            "states": [
                {"state": 1, "jump_masses": [{"state": 2, "mass": 1.0}],
                 "precision": {"head": [], "tail": 1.0},
                 "centering": {"family": "geometric", "p": 0.3}},
                {"state": 2, "jump_masses": [{"state": 1, "mass": 1.0}, {"state": 3, "mass": 1.0}],
                 "precision": {"tail": 1.0},
                 "centering": {"family": "geometric", "p": 0.3}},
                {"state": 3, "jump_masses": [{"state": 1, "mass": 1.0}],
                 "precision": {"tail": 1.0},
                 "centering": {"family": "geometric", "p": 0.3},
                 "default_masses": [{"state": 1, "mass": 0.5}],
                 "time_indexed_jump_masses": [{"t": 2, "masses": [{"state": 1, "mass": 4.0}]}]}
            ]
        },
        "start": 1,
        "horizon": 10
    }"#;

    #[test]
    fn parse_and_build_priors() {
        let cfg: RunConfig = serde_json::from_str(EXAMPLE).unwrap();
        let space = cfg.state_space().unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(space.label_of(0), Some("run"));

        let params = cfg.smbs_params(&space, None).unwrap();
        assert_eq!(params.state(0).jump.mass(1), 1.0);
        assert_eq!(params.state(0).jump.mass(0), 0.0);
        assert_eq!(params.state(1).jump.total(), 2.0);

        let c10 = cfg.smbs_params(&space, Some(10.0)).unwrap();
        assert_eq!(c10.state(2).holding.precision().at(5), 10.0);

        let ti = cfg.time_indexed_params(&space).unwrap();
        assert_eq!(ti.jump_at(2, 2).mass(0), 4.0);
        assert_eq!(ti.jump_at(2, 1).mass(0), 0.5);
        assert_eq!(cfg.start_index(&space).unwrap(), 0);
    }

    #[test]
    fn paths_round_trip_through_text() {
        let cfg: RunConfig = serde_json::from_str(EXAMPLE).unwrap();
        let space = cfg.state_space().unwrap();
        let text = "1,1,2,3\n3,1\n";
        let paths = parse_paths(text, &space).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].states(), &[0, 0, 1, 2]);
        assert_eq!(format_paths(&paths, &space), text);
        assert!(parse_paths("9,9", &space).is_err());
        assert!(parse_paths("", &space).is_err());
    }
}
