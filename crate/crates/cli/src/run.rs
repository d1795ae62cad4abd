use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ecosim_core::config::{parse_config, ConfigError, RunConfig, SchemeSpec};
use ecosim_core::cyclic::cycle_table;
use ecosim_core::dynamics::simulate;
use ecosim_core::optimizer::{
    brute_force_revenue_opt_with, brute_force_welfare_opt_with, price_of_anarchy_with, solve_arms,
    BruteForceOptions,
};
use ecosim_core::regulator::{bound_gap, crude_welfare_bounds, noisy_welfare_bounds};
use ecosim_core::report::{
    g12, write_cycle_table_csv, write_optimization_report, write_share_paths_csv,
    write_trajectory_csv, write_verdict_report, write_welfare_comparison_csv,
};
use ecosim_core::{Error, TrainingScheme};

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "ECOSIM_THREADS";

const DEFAULT_STARTS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Simulate,
    Optimize,
    Cyclic,
    Regulate,
    Poa,
    Figure1,
    Figure2,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub scheme: Option<String>,
    pub eps: Option<f64>,
    pub delta: Option<usize>,
    pub p_hat: Option<f64>,
    pub k_max: Option<usize>,
    pub brute_cap: Option<usize>,
    pub p1_values: Vec<f64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Usage(String),
    Core(Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Core(Error::Eligibility { .. }) => 3,
            CliError::Core(Error::Capacity { .. }) => 4,
            CliError::Core(Error::Convergence(_)) => 5,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

/// Honour the thread cap, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(format!("could not size the thread pool: {e}")))
}

fn load(path: &Path, o: Overrides) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(CliError::Config)?;
    if let Some(s) = o.scheme {
        cfg.scheme = Some(
            s.parse::<SchemeSpec>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
        );
    }
    let opts = &mut cfg.options;
    opts.out = o.out.or(opts.out.take());
    opts.eps = o.eps.or(opts.eps);
    opts.delta = o.delta.or(opts.delta);
    opts.p_hat = o.p_hat.or(opts.p_hat);
    if let Some(k) = o.k_max {
        opts.k_max = k;
    }
    if let Some(c) = o.brute_cap {
        opts.brute_cap = c;
    }
    if !o.p1_values.is_empty() {
        opts.p1_values = o.p1_values;
    }
    Ok(cfg)
}

pub fn execute(kind: Kind, config: &Path, overrides: Overrides) -> Result<(), CliError> {
    let cfg = load(config, overrides)?;
    let mut buf = Vec::new();
    render(kind, &cfg, &mut buf)?;
    match &cfg.options.out {
        Some(path) => fs::write(path, &buf)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

/// Produce the command's full output in memory, so a failing run leaves no
/// partial artifact behind.
pub fn render(kind: Kind, cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let inst = &cfg.instance;
    let opts = &cfg.options;
    let brute = BruteForceOptions {
        cap: opts.brute_cap,
    };
    match kind {
        Kind::Simulate => {
            let spec = cfg.scheme.clone().unwrap_or(SchemeSpec::NoTraining);
            let scheme = spec.resolve(inst, brute)?;
            write_trajectory_csv(out, &simulate(inst, &scheme)?)?;
        }
        Kind::Optimize => {
            let spec = match (&cfg.scheme, opts.eps) {
                (Some(s), _) => s.clone(),
                (None, Some(eps)) => SchemeSpec::OptimalArms(eps),
                (None, None) => SchemeSpec::OptimalBrute,
            };
            match spec {
                SchemeSpec::OptimalBrute => write_optimization_report(
                    out,
                    &brute_force_revenue_opt_with(inst, brute)?,
                    None,
                )?,
                SchemeSpec::WelfareOpt => write_optimization_report(
                    out,
                    &brute_force_welfare_opt_with(inst, brute)?,
                    None,
                )?,
                SchemeSpec::OptimalArms(eps) => {
                    let sol = solve_arms(inst, eps)?;
                    write_optimization_report(out, &sol.result, Some(sol.guarantee))?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "optimize needs optimal:brute, optimal:arms:eps or welfare-opt, got {other}"
                    )))
                }
            }
        }
        Kind::Cyclic => {
            let pairs = match &cfg.scheme {
                Some(SchemeSpec::Alternating(a1, a2)) => vec![(*a1, *a2)],
                _ => Vec::new(),
            };
            write_cycle_table_csv(out, &cycle_table(inst, opts.k_max, &pairs)?)?;
        }
        Kind::Regulate => {
            let delta = match (opts.delta, &cfg.scheme) {
                (Some(d), _) => d,
                (None, Some(spec)) => spec.resolve(inst, brute)?.max_gap(),
                (None, None) => {
                    return Err(CliError::Usage("regulate needs --delta or a scheme".into()));
                }
            };
            let forum_only = delta as f64 * inst.rs(0.0);
            match (opts.p_hat, opts.eps) {
                (Some(p_hat), Some(eps)) => {
                    let bounds = noisy_welfare_bounds(inst, p_hat, eps, delta)?;
                    let gap = bound_gap(inst, eps, delta).ok();
                    write_verdict_report(out, &bounds, forum_only, gap)?;
                }
                (None, None) => write_verdict_report(
                    out,
                    &crude_welfare_bounds(inst, delta)?,
                    forum_only,
                    None,
                )?,
                _ => {
                    return Err(CliError::Usage(
                        "noisy bounds need both --p-hat and --eps".into(),
                    ));
                }
            }
        }
        Kind::Poa => {
            let poa = price_of_anarchy_with(inst, brute)?;
            writeln!(out, "{}", g12(poa)).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Kind::Figure1 => {
            let horizon = inst.horizon();
            let none = simulate(inst, &TrainingScheme::no_training(horizon)?)?;
            let rev = simulate(inst, &brute_force_revenue_opt_with(inst, brute)?.scheme)?;
            let wel = simulate(inst, &brute_force_welfare_opt_with(inst, brute)?.scheme)?;
            write_welfare_comparison_csv(out, &none, &rev, &wel)?;
        }
        Kind::Figure2 => {
            let starts = if opts.p1_values.is_empty() {
                DEFAULT_STARTS.to_vec()
            } else {
                opts.p1_values.clone()
            };
            let spec = cfg.scheme.clone().unwrap_or(SchemeSpec::NoTraining);
            let scheme = spec.resolve(inst, brute)?;
            let paths = starts
                .iter()
                .map(|&p| simulate(&inst.with_initial_proportion(p)?, &scheme))
                .collect::<Result<Vec<_>, Error>>()?;
            write_share_paths_csv(out, &starts, &paths)?;
        }
    }
    Ok(())
}
