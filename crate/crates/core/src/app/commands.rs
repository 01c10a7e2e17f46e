//! Implementations of the CLI subcommands. Every command takes the parsed
//! configuration, a mandatory seed, and an output directory; with a fixed
//! seed the emitted files are byte-identical across runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::app::config::{self, RunConfig, UrnModelConfig};
use crate::app::simstudy::{SimStudyTruth, DEFAULT_TAIL_TOL};
use crate::error::{Result, SmbsError};
use crate::model::{StateSequence, StateSpace};
use crate::predictive::h_step_predictive;
use crate::smbs::SmbsParams;
use crate::urns::{BsSystem, UrnProcessState};

const FIT_SCHEMA: &str = "# smbs fit v1";
const FORECAST_SCHEMA: &str = "# smbs predict v1";
const LIMITING_SCHEMA: &str = "# smbs limiting v1";

pub struct CommandContext {
    pub config: RunConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl CommandContext {
    pub fn new(config: RunConfig, seed: u64, out_dir: PathBuf) -> Self {
        Self {
            config,
            seed,
            out_dir,
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }

    fn require_data(&self, space: &StateSpace) -> Result<Vec<StateSequence>> {
        let data = self
            .config
            .data
            .as_ref()
            .ok_or_else(|| SmbsError::Config("this command requires a 'data' file".into()))?;
        config::read_paths(data, space)
    }
}

/// Sample paths from the prior: per path one characteristic couple drawn
/// from the prior, then a forward simulation up to the horizon.
pub fn simulate(ctx: &CommandContext) -> Result<Vec<PathBuf>> {
    let space = ctx.config.state_space()?;
    let params = ctx.config.smbs_params(&space, None)?;
    let start = ctx.config.start_index(&space)?;
    let horizon = ctx.config.horizon.unwrap_or(100);
    let n_paths = ctx.config.n_paths.unwrap_or(1);

    let mut rng = ChaCha12Rng::seed_from_u64(ctx.seed);
    let mut paths = Vec::with_capacity(n_paths as usize);
    for _ in 0..n_paths {
        let mut couple = params.sample(&mut rng)?;
        paths.push(couple.sample_path(start, horizon, &mut rng)?);
    }
    let file = ctx.write("paths.txt", &config::format_paths(&paths, &space))?;
    Ok(vec![file])
}

/// Posterior summaries for every configured `(c, M)` combination: per state
/// and grid time the posterior mean CDF, the truth when known, and a set of
/// posterior CDF draws.
pub fn fit(ctx: &CommandContext) -> Result<Vec<PathBuf>> {
    let space = ctx.config.state_space()?;
    let data = ctx.require_data(&space)?;
    let truth = ctx.config.truth(&space)?;
    fit_inner(
        ctx,
        &space,
        &data[0],
        truth.as_ref().map(|t| &t.holdings[..]),
    )
}

fn fit_inner(
    ctx: &CommandContext,
    space: &StateSpace,
    path: &StateSequence,
    truth_holdings: Option<&[crate::betastacy::CenteringDistribution]>,
) -> Result<Vec<PathBuf>> {
    let fit_cfg = ctx.config.fit.clone().unwrap_or_default();
    let prefix_lengths = if fit_cfg.prefix_lengths.is_empty() {
        vec![path.horizon()]
    } else {
        fit_cfg.prefix_lengths.clone()
    };
    let c_labels: Vec<(Option<f64>, String)> = if fit_cfg.c_values.is_empty() {
        vec![(None, "config".to_string())]
    } else {
        fit_cfg
            .c_values
            .iter()
            .map(|&c| (Some(c), format!("{c}")))
            .collect()
    };

    let mut seed_rng = ChaCha12Rng::seed_from_u64(ctx.seed);
    let mut files = Vec::new();
    for (c_override, c_label) in &c_labels {
        for &m in &prefix_lengths {
            if m > path.horizon() {
                return Err(SmbsError::Config(format!(
                    "prefix length {m} exceeds the data horizon {}",
                    path.horizon()
                )));
            }
            let prefix = StateSequence::new(path.states()[..=(m as usize)].to_vec())?;
            let params = ctx.config.smbs_params(space, *c_override)?;
            let posterior = params.posterior(&prefix)?;
            let csv = render_fit_csv(space, &posterior, truth_holdings, &fit_cfg, &mut seed_rng)?;
            files.push(ctx.write(&format!("fit_c{c_label}_M{m}.csv"), &csv)?);
        }
    }
    Ok(files)
}

fn render_fit_csv<R: Rng + ?Sized>(
    space: &StateSpace,
    posterior: &SmbsParams,
    truth_holdings: Option<&[crate::betastacy::CenteringDistribution]>,
    fit_cfg: &crate::app::config::FitConfig,
    seed_rng: &mut R,
) -> Result<String> {
    let mut out = String::new();
    out.push_str(FIT_SCHEMA);
    out.push('\n');
    out.push_str("state,t,posterior_mean,truth,sample_id,sample_value\n");
    for i in 0..space.len() {
        let holding = &posterior.state(i).holding;
        // evaluate each posterior draw across the grid
        let mut draws = Vec::with_capacity(fit_cfg.n_samples as usize);
        for _ in 0..fit_cfg.n_samples {
            let mut sampled = holding.sample(seed_rng.random());
            let values: Vec<f64> = (1..=fit_cfg.grid_max_t)
                .map(|t| sampled.cdf(t))
                .collect::<Result<_>>()?;
            draws.push(values);
        }
        for t in 1..=fit_cfg.grid_max_t {
            let mean = holding.mean(t)?;
            let truth_str = match truth_holdings {
                Some(hs) => format!("{}", hs[i].cdf(t)),
                None => String::new(),
            };
            for (sample_id, values) in draws.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    space.id_of(i),
                    t,
                    mean,
                    truth_str,
                    sample_id,
                    values[t as usize - 1]
                )
                .expect("string write");
            }
        }
    }
    Ok(out)
}

/// Monte Carlo multi-step forecast from the configured prior and the first
/// data path, plus the limiting-distribution reference rows when the truth
/// is configured.
pub fn predict(ctx: &CommandContext) -> Result<Vec<PathBuf>> {
    let space = ctx.config.state_space()?;
    let data = ctx.require_data(&space)?;
    let params = ctx.config.smbs_params(&space, None)?;
    let truth = ctx.config.truth(&space)?;
    let nu = match &truth {
        Some(t) => Some(
            SimStudyTruth::from_resolved(t)?
                .limiting_distribution(ctx.config.tail_tol.unwrap_or(DEFAULT_TAIL_TOL))?,
        ),
        None => None,
    };
    let file = predict_inner(
        ctx,
        &space,
        &params,
        &data[0],
        nu.as_deref(),
        "forecast.csv",
    )?;
    Ok(vec![file])
}

fn predict_inner(
    ctx: &CommandContext,
    space: &StateSpace,
    params: &SmbsParams,
    prefix: &StateSequence,
    nu: Option<&[f64]>,
    file_name: &str,
) -> Result<PathBuf> {
    let horizon = ctx.config.forecast_horizon.unwrap_or(100);
    let n_sims = ctx.config.n_sims.unwrap_or(100_000);
    let mut rng = ChaCha12Rng::seed_from_u64(ctx.seed);
    let matrix = h_step_predictive(params, prefix, horizon, n_sims, &mut rng)?;

    let mut out = String::new();
    out.push_str(FORECAST_SCHEMA);
    out.push('\n');
    out.push_str("h,state,probability\n");
    for h in 1..=horizon {
        for j in 0..space.len() {
            writeln!(out, "{},{},{}", h, space.id_of(j), matrix.prob(h, j)).expect("string write");
        }
    }
    if let Some(nu) = nu {
        for (j, value) in nu.iter().enumerate() {
            writeln!(out, "limit,{},{}", space.id_of(j), value).expect("string write");
        }
    }
    ctx.write(file_name, &out)
}

/// Generate a path with the reinforced urn walk, recording one JSON line per
/// urn draw.
pub fn urn_trace(ctx: &CommandContext) -> Result<Vec<PathBuf>> {
    let space = ctx.config.state_space()?;
    let start = ctx.config.start_index(&space)?;
    let n_jumps = ctx.config.n_jumps.unwrap_or(10);
    let ids: Vec<u32> = (0..space.len()).map(|i| space.id_of(i)).collect();

    let mut state = match ctx.config.model {
        UrnModelConfig::Standard => {
            let params = ctx.config.smbs_params(&space, None)?;
            UrnProcessState::standard(&params, start)?
        }
        UrnModelConfig::TimeIndexedJump => {
            let params = ctx.config.time_indexed_params(&space)?;
            UrnProcessState::time_indexed(&params, start)?
        }
        UrnModelConfig::DestinationIndexedHolding => {
            // pair systems inherit the origin state's precision and centering
            let params = ctx.config.smbs_params(&space, None)?;
            let n = space.len();
            let jump = (0..n).map(|i| params.state(i).jump.clone()).collect();
            let systems: Vec<Vec<Option<BsSystem>>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                Ok(None)
                            } else {
                                let holding = &params.state(i).holding;
                                BsSystem::new(
                                    holding.precision().clone(),
                                    holding.centering().clone(),
                                )
                                .map(Some)
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            UrnProcessState::destination_indexed(jump, systems, start)?
        }
    }
    .with_space_ids(ids);

    if let Some(cap) = ctx.config.walk_cap {
        state.set_walk_cap(cap);
    }
    state.enable_trace();
    let mut rng = ChaCha12Rng::seed_from_u64(ctx.seed);
    let decomposition = state.generate(start, n_jumps, &mut rng)?;

    let mut trace_out = String::new();
    for event in state.take_trace() {
        trace_out.push_str(&serde_json::to_string(&event)?);
        trace_out.push('\n');
    }
    let trace_file = ctx.write("trace.jsonl", &trace_out)?;

    let covered: u64 = decomposition.holding().iter().sum::<u64>();
    let path = decomposition.compose(covered)?;
    let path_file = ctx.write("paths.txt", &config::format_paths(&[path], &space))?;
    Ok(vec![trace_file, path_file])
}

/// Full simulation study: generate benchmark data, sweep the posterior over
/// `(c, M)` combinations, forecast with `c = 1`, and tabulate the limiting
/// distribution.
pub fn simstudy(ctx: &CommandContext) -> Result<Vec<PathBuf>> {
    let space = ctx.config.state_space()?;
    let truth = match ctx.config.truth(&space)? {
        Some(t) => SimStudyTruth::from_resolved(&t)?,
        None => SimStudyTruth::benchmark(),
    };
    let horizon = ctx.config.horizon.unwrap_or(1000);
    let data = truth.generate(horizon, ctx.seed)?;
    let mut files = vec![ctx.write(
        "data.txt",
        &config::format_paths(std::slice::from_ref(&data), &space),
    )?];

    // posterior sweep
    let fit_cfg = ctx
        .config
        .fit
        .clone()
        .unwrap_or(crate::app::config::FitConfig {
            grid_max_t: 20,
            n_samples: 500,
            prefix_lengths: vec![0, 100, 1000],
            c_values: vec![0.1, 1.0, 10.0],
        });
    let truth_holdings: Vec<crate::betastacy::CenteringDistribution> =
        (0..space.len()).map(|i| truth.holding(i).clone()).collect();
    let fit_ctx = CommandContext {
        config: RunConfig {
            fit: Some(fit_cfg),
            ..ctx.config.clone()
        },
        seed: ctx.seed,
        out_dir: ctx.out_dir.clone(),
    };
    files.extend(fit_inner(&fit_ctx, &space, &data, Some(&truth_holdings))?);

    // limiting distribution
    let tail_tol = ctx.config.tail_tol.unwrap_or(DEFAULT_TAIL_TOL);
    let nu = truth.limiting_distribution(tail_tol)?;
    let mut nu_out = String::new();
    nu_out.push_str(LIMITING_SCHEMA);
    nu_out.push('\n');
    nu_out.push_str("state,nu\n");
    for (j, value) in nu.iter().enumerate() {
        writeln!(nu_out, "{},{}", space.id_of(j), value).expect("string write");
    }
    files.push(ctx.write("limiting.csv", &nu_out)?);

    // forecast from the full path under the c = 1 prior
    let params = ctx.config.smbs_params(&space, Some(1.0))?;
    files.push(predict_inner(
        ctx,
        &space,
        &params,
        &data,
        Some(&nu),
        "forecast.csv",
    )?);
    Ok(files)
}

/// Convenience for tests: run a command by name.
pub fn run_command(
    name: &str,
    config_path: &Path,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let config = RunConfig::from_file(config_path)?;
    let ctx = CommandContext::new(config, seed, out_dir.to_path_buf());
    match name {
        "simulate" => simulate(&ctx),
        "fit" => fit(&ctx),
        "predict" => predict(&ctx),
        "urn-trace" => urn_trace(&ctx),
        "simstudy" => simstudy(&ctx),
        other => Err(SmbsError::Config(format!("unknown command '{other}'"))),
    }
}
