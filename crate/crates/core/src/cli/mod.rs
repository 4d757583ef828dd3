//! Command-line front end. Every subcommand writes its outputs and a
//! `manifest.json` into the output directory.

mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use config::RunConfig;
use manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_STATISTICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "alaam", version, about = "Simulate and estimate autologistic actor attribute models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Declarative config file (`key = value`, `effect = Name [theta]`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Edge list, two node identifiers per line.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    #[arg(long, global = true)]
    pub directed: bool,
    /// Delimited file holding the binary outcome column.
    #[arg(long, global = true)]
    pub outcome: Option<PathBuf>,
    #[arg(long = "outcome-col", global = true)]
    pub outcome_col: Option<String>,
    /// Delimited node attribute file.
    #[arg(long, global = true)]
    pub attributes: Option<PathBuf>,
    /// Column types, e.g. `age:continuous,class:categorical`.
    #[arg(long = "attr-types", global = true)]
    pub attr_types: Option<String>,
    /// Comma-separated effect names; replaces the config's effects.
    #[arg(long, global = true)]
    pub effects: Option<String>,
    /// Comma-separated parameter values matching `--effects`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Override any config key, e.g. `--set samples=500`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps, replicates and enumeration.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Descriptive statistics of the network (and of the outcome, if given).
    Stats,
    /// Simulate outcome vectors at fixed parameters.
    Simulate,
    /// Sweep one parameter over a grid and classify the response.
    Sweep,
    /// Stochastic approximation estimate.
    EstimateSa,
    /// Equilibrium expectation estimate.
    EstimateEe,
    /// Goodness-of-fit t-ratios and attribute-node degree distributions.
    Gof,
    /// Degeneracy check: traces and 95% bands at the given parameters.
    DegenCheck,
    /// Exact enumeration on a tiny graph.
    Enumerate,
    /// Repeat a run from its manifest.
    Rerun {
        manifest: PathBuf,
        /// Run even if input files changed since the manifest was written.
        #[arg(long)]
        force: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::EstimateSa => "estimate-sa",
            Command::EstimateEe => "estimate-ee",
            Command::Gof => "gof",
            Command::DegenCheck => "degen-check",
            Command::Enumerate => "enumerate",
            Command::Rerun { .. } => "rerun",
        }
    }

    fn from_name(s: &str) -> Option<Command> {
        Some(match s {
            "stats" => Command::Stats,
            "simulate" => Command::Simulate,
            "sweep" => Command::Sweep,
            "estimate-sa" => Command::EstimateSa,
            "estimate-ee" => Command::EstimateEe,
            "gof" => Command::Gof,
            "degen-check" => Command::DegenCheck,
            "enumerate" => Command::Enumerate,
            _ => return None,
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_statistical() => EXIT_STATISTICAL,
        _ => EXIT_USAGE,
    }
}

/// Builds the effective configuration from the config file and flags.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let path = |p: &Path| p.to_string_lossy().into_owned();
    if let Some(p) = &common.graph {
        cfg.set("graph", &path(p))?;
    }
    if common.directed {
        cfg.set("directed", "true")?;
    }
    if let Some(p) = &common.outcome {
        cfg.set("outcome", &path(p))?;
    }
    if let Some(c) = &common.outcome_col {
        cfg.set("outcome_col", c)?;
    }
    if let Some(p) = &common.attributes {
        cfg.set("attributes", &path(p))?;
    }
    if let Some(t) = &common.attr_types {
        cfg.set("attr_types", t)?;
    }
    if let Some(s) = common.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(list) = &common.effects {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let thetas: Vec<Option<f64>> = match &common.theta {
            Some(t) => t
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::Config(format!("bad --theta value `{v}`")))
                })
                .collect::<Result<_>>()?,
            None => vec![None; names.len()],
        };
        if thetas.len() != names.len() {
            return Err(Error::Config(format!(
                "--theta has {} values for {} effects",
                thetas.len(),
                names.len()
            )));
        }
        cfg.effects = names
            .into_iter()
            .zip(thetas)
            .map(|(name, theta)| config::EffectLine { name: name.into(), theta })
            .collect();
    } else if let Some(t) = &common.theta {
        let vals: Vec<&str> = t.split(',').collect();
        if vals.len() != cfg.effects.len() {
            return Err(Error::Config(format!(
                "--theta has {} values for {} configured effects",
                vals.len(),
                cfg.effects.len()
            )));
        }
        for (line, v) in cfg.effects.iter_mut().zip(vals) {
            line.theta = Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad --theta value `{v}`")))?,
            );
        }
    }
    for pair in &common.set {
        cfg.set_pair(pair)?;
    }
    // Paths are stored absolute so that a manifest can be rerun elsewhere.
    for key in ["graph", "outcome", "attributes"] {
        if let Some(p) = cfg.get(key) {
            if let Ok(abs) = std::path::absolute(p) {
                cfg.values.insert(key.into(), abs.to_string_lossy().into_owned());
            }
        }
    }
    Ok(cfg)
}

/// Runs one subcommand with a resolved configuration, writing outputs and
/// the manifest into `out`. Returns the process exit code.
pub fn execute(command: &Command, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let start = Instant::now();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let run = commands::dispatch(command, cfg, out)?;
    let manifest = RunManifest {
        subcommand: command.name().into(),
        config: cfg.clone(),
        inputs: run.inputs,
        seed: run.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(out)?;
    Ok(run.exit_code)
}

/// Repeats the run recorded in a manifest. Refuses when an input file
/// changed, unless `force`.
pub fn rerun(manifest_path: &Path, force: bool, out: Option<&Path>) -> Result<i32> {
    let manifest = RunManifest::read(manifest_path)?;
    let drifted = manifest.drifted_inputs()?;
    if !drifted.is_empty() {
        if !force {
            return Err(Error::Config(format!(
                "inputs changed since the manifest was written: {}; pass --force to run anyway",
                drifted.join(", ")
            )));
        }
        log::warn!("rerunning despite changed inputs: {}", drifted.join(", "));
    }
    let command = Command::from_name(&manifest.subcommand)
        .ok_or_else(|| Error::Config(format!("manifest names unknown subcommand `{}`", manifest.subcommand)))?;
    let default_out = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    execute(&command, &manifest.config, out.unwrap_or(&default_out))
}

/// Entry point of the `alaam` binary.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(k) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            log::warn!("could not configure {k} threads: {e}");
        }
    }
    let result = match &cli.command {
        Command::Rerun { manifest, force } => rerun(manifest, *force, cli.common.out.as_deref()),
        command => resolve_config(&cli.common).and_then(|cfg| {
            let out = cli.common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            execute(command, &cfg, &out)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
