use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::manifest::{file_digest, InputFile};
use super::{Command, EXIT_OK, EXIT_STATISTICAL};
use crate::covariates::{load_covariates_by_id, AttrSchema, CovariateTable};
use crate::diagnostics::{attribute_degree_gof, degeneracy_check, gof};
use crate::effects::{default_gof_suite, EffectSpec, Model};
use crate::error::{Error, Result};
use crate::estimation::{default_theta0, estimate_ee, estimate_sa, EeConfig, EstimationResult, SaConfig};
use crate::experiments::{detect_transition, sweep, SweepConfig, TransitionThresholds};
use crate::graph::{descriptive_stats, load_graph, outcome_degree_stats, Graph};
use crate::oracle::enumerate_conditional;
use crate::outcome::{load_outcome_by_id, MissingPolicy, OutcomeVector};
use crate::sampler::{simulate, InitialOutcome, SamplerConfig};

pub(super) struct Finished {
    pub inputs: BTreeMap<String, InputFile>,
    pub seed: u64,
    pub exit_code: i32,
}

struct Context {
    graph: Graph,
    table: CovariateTable,
    outcome: Option<OutcomeVector>,
    inputs: BTreeMap<String, InputFile>,
    seed: u64,
}

impl Context {
    fn load(cfg: &RunConfig, out: &Path) -> Result<Self> {
        let graph_path = PathBuf::from(
            cfg.get("graph")
                .ok_or_else(|| Error::Config("no graph given (use --graph or `graph = ...`)".into()))?,
        );
        let mut inputs = BTreeMap::new();
        let mut record = |role: &str, path: &Path| -> Result<()> {
            inputs.insert(
                role.to_string(),
                InputFile {
                    path: path.to_path_buf(),
                    sha256: file_digest(path)?,
                },
            );
            Ok(())
        };
        let loaded = load_graph(&graph_path, cfg.flag("directed")?)?;
        record("graph", &graph_path)?;
        loaded.ids.write(&out.join("node_ids.tsv"))?;
        let n = loaded.graph.node_count();

        let table = match cfg.get("attributes") {
            Some(p) => {
                let schema = cfg.get("attr_types").map(str::parse::<AttrSchema>).transpose()?;
                let t = load_covariates_by_id(p, &loaded.ids, schema.as_ref())?;
                record("attributes", Path::new(p))?;
                t
            }
            None => CovariateTable::empty(n),
        };
        let policy = match cfg.get("missing").unwrap_or("fix-zero") {
            "fix-zero" | "fix_zero" | "zero" => MissingPolicy::FixZero,
            "reject" => MissingPolicy::Reject,
            v => return Err(Error::Config(format!("`missing` must be fix-zero or reject, got `{v}`"))),
        };
        let outcome = match cfg.get("outcome") {
            Some(p) => {
                let y = load_outcome_by_id(p, cfg.get("outcome_col").unwrap_or("outcome"), &loaded.ids, policy)?;
                record("outcome", Path::new(p))?;
                Some(y)
            }
            None => None,
        };
        Ok(Context {
            graph: loaded.graph,
            table,
            outcome,
            inputs,
            seed: cfg.parsed_or("seed", 1)?,
        })
    }

    fn require_outcome(&self, what: &str) -> Result<&OutcomeVector> {
        self.outcome
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{what} needs an observed outcome (use --outcome)")))
    }

    /// Observed outcome, or all zeros when none was given.
    fn outcome_or_zeros(&self) -> OutcomeVector {
        self.outcome
            .clone()
            .unwrap_or_else(|| OutcomeVector::zeros(self.graph.node_count()))
    }

    fn effects(&self, cfg: &RunConfig) -> Result<Vec<EffectSpec>> {
        if cfg.effects.is_empty() {
            return Err(Error::Config("no effects given (use --effects or `effect = ...`)".into()));
        }
        cfg.effects
            .iter()
            .map(|l| EffectSpec::parse(&l.name, Some(&self.table)))
            .collect()
    }

    /// Model with the configured parameters; unspecified ones take the
    /// corresponding entry of `fallback`.
    fn model(&self, cfg: &RunConfig, fallback: &[f64]) -> Result<Model> {
        let effects = self.effects(cfg)?;
        let theta = cfg
            .effects
            .iter()
            .zip(fallback)
            .map(|(l, &f)| l.theta.unwrap_or(f))
            .collect();
        let m = Model::new(effects, theta)?;
        m.validate(&self.graph, &self.table)?;
        Ok(m)
    }

    fn fixed_model(&self, cfg: &RunConfig) -> Result<Model> {
        self.model(cfg, &vec![0.0; cfg.effects.len()])
    }

    fn sampler(&self, cfg: &RunConfig, samples: usize, initial: InitialOutcome) -> Result<SamplerConfig> {
        let mut s = SamplerConfig::desk_scale(self.graph.node_count(), self.seed);
        s.n_samples = samples;
        s.initial = initial;
        if let Some(v) = cfg.parsed("burn_in")? {
            s.burn_in = v;
        }
        if let Some(v) = cfg.parsed("interval")? {
            s.interval = v;
        }
        if let Some(v) = cfg.parsed("samples")? {
            s.n_samples = v;
        }
        if let Some(v) = cfg.parsed("resync_every")? {
            s.resync_every = v;
        }
        if let Some(v) = cfg.get("initial") {
            s.initial = parse_initial(v)?;
        }
        s.validate()?;
        Ok(s)
    }
}

fn parse_initial(v: &str) -> Result<InitialOutcome> {
    match v {
        "observed" => Ok(InitialOutcome::Observed),
        "zero" => Ok(InitialOutcome::AllZero),
        _ => v
            .strip_prefix("random:")
            .and_then(|p| p.parse().ok())
            .map(InitialOutcome::Random)
            .ok_or_else(|| Error::Config(format!("`initial` must be observed, zero or random:<p>, got `{v}`"))),
    }
}

fn write(path: PathBuf, text: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub(super) fn dispatch(command: &Command, cfg: &RunConfig, out: &Path) -> Result<Finished> {
    let ctx = Context::load(cfg, out)?;
    let code = match command {
        Command::Stats => stats(&ctx, out)?,
        Command::Simulate => run_simulate(&ctx, cfg, out)?,
        Command::Sweep => run_sweep(&ctx, cfg, out)?,
        Command::EstimateSa | Command::EstimateEe => run_estimate(&ctx, cfg, out, command)?,
        Command::Gof => run_gof(&ctx, cfg, out)?,
        Command::DegenCheck => run_degen(&ctx, cfg, out)?,
        Command::Enumerate => run_enumerate(&ctx, cfg, out)?,
        Command::Rerun { .. } => unreachable!("rerun is resolved before dispatch"),
    };
    Ok(Finished {
        inputs: ctx.inputs,
        seed: ctx.seed,
        exit_code: code,
    })
}

fn stats(ctx: &Context, out: &Path) -> Result<i32> {
    let s = descriptive_stats(&ctx.graph);
    println!("{s}");
    write(out.join("stats.csv"), s.to_csv())?;
    write(out.join("stats.txt"), format!("{s}\n"))?;
    if let Some(y) = &ctx.outcome {
        let o = outcome_degree_stats(&ctx.graph, y);
        println!("{o}");
        write(out.join("outcome_degrees.csv"), o.to_csv())?;
    }
    Ok(EXIT_OK)
}

fn run_simulate(ctx: &Context, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let m = ctx.fixed_model(cfg)?;
    let initial = if ctx.outcome.is_some() {
        InitialOutcome::Observed
    } else {
        InitialOutcome::AllZero
    };
    let s = ctx.sampler(cfg, 100, initial)?;
    let batch = simulate(&m, &ctx.graph, &ctx.table, &ctx.outcome_or_zeros(), &s)?;
    batch.write_csv(out.join("samples.csv"))?;
    println!("{} samples, acceptance rate {:.4}", batch.len(), batch.acceptance_rate());
    for (name, (mean, sd)) in batch.names().iter().zip(batch.means().iter().zip(batch.std_devs())) {
        println!("{name:<32} mean {mean:>12.4} sd {sd:>10.4}");
    }
    Ok(EXIT_OK)
}

fn run_sweep(ctx: &Context, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let m = ctx.fixed_model(cfg)?;
    let y = ctx.outcome_or_zeros();
    let p0 = if ctx.outcome.is_some() { y.density() } else { 0.5 };
    let s = ctx.sampler(cfg, 100, InitialOutcome::Random(p0))?;
    let varied = match cfg.get("varied") {
        Some(v) => EffectSpec::parse(v, Some(&ctx.table))?,
        None => m.effects().last().expect("model has effects").clone(),
    };
    let mut sc = SweepConfig::new(varied, s);
    sc.lo = cfg.parsed_or("lo", sc.lo)?;
    sc.hi = cfg.parsed_or("hi", sc.hi)?;
    sc.step = cfg.parsed_or("step", sc.step)?;
    let table = sweep(&sc, &m, &ctx.graph, &ctx.table, &y)?;
    table.write_csv(out.join("sweep.csv"))?;
    write(out.join("sweep_summary.csv"), table.summary_csv())?;
    let th = TransitionThresholds {
        peak_ratio: cfg.parsed_or("peak_ratio", TransitionThresholds::default().peak_ratio)?,
        jump: cfg.parsed_or("jump", TransitionThresholds::default().jump)?,
    };
    match detect_transition(&table.summaries(), th) {
        Ok(report) => {
            println!("{report}");
            write(out.join("transition.txt"), format!("{report}\n"))?;
        }
        Err(e) => log::warn!("no transition report: {e}"),
    }
    Ok(EXIT_OK)
}

fn run_estimate(ctx: &Context, cfg: &RunConfig, out: &Path, command: &Command) -> Result<i32> {
    let y = ctx.require_outcome("estimation")?;
    let effects = ctx.effects(cfg)?;
    let m0 = ctx.model(cfg, &default_theta0(&effects, y))?;
    let res: EstimationResult = if matches!(command, Command::EstimateSa) {
        let d = SaConfig::default();
        let sc = SaConfig {
            phase1_samples: cfg.parsed_or("phase1_samples", d.phase1_samples)?,
            subphases: cfg.parsed_or("subphases", d.subphases)?,
            a0: cfg.parsed_or("a0", d.a0)?,
            phase2_multiplier: cfg.parsed_or("phase2_multiplier", d.phase2_multiplier)?,
            phase3_samples: cfg.parsed_or("phase3_samples", d.phase3_samples)?,
            chain_steps: cfg.parsed_or("chain_steps", d.chain_steps)?,
            burn_in: cfg.parsed_or("sa_burn_in", d.burn_in)?,
            divergence_bound: cfg.parsed_or("divergence_bound", d.divergence_bound)?,
            t_threshold: cfg.parsed_or("t_threshold", d.t_threshold)?,
            max_runs: cfg.parsed_or("max_runs", d.max_runs)?,
            seed: ctx.seed,
            keep_trajectory: true,
        };
        estimate_sa(&m0, &ctx.graph, &ctx.table, y, &sc)?
    } else {
        let d = EeConfig::default();
        let ec = EeConfig {
            updates: cfg.parsed_or("updates", d.updates)?,
            proposals_per_update: cfg.parsed_or("proposals_per_update", d.proposals_per_update)?,
            c1: cfg.parsed_or("c1", d.c1)?,
            epsilon: cfg.parsed_or("epsilon", d.epsilon)?,
            half_life: cfg.parsed_or("half_life", d.half_life)?,
            replicates: cfg.parsed_or("replicates", d.replicates)?,
            final_samples: cfg.parsed_or("final_samples", d.final_samples)?,
            divergence_bound: cfg.parsed_or("divergence_bound", d.divergence_bound)?,
            t_threshold: cfg.parsed_or("t_threshold", d.t_threshold)?,
            seed: ctx.seed,
            keep_trajectory: true,
            ..d
        };
        estimate_ee(&m0, &ctx.graph, &ctx.table, y, &ec)?
    };
    println!("{res}");
    res.write_csv(out.join("estimates.csv"))?;
    let mut traj = String::from("step");
    for n in &res.names {
        write!(traj, ",{n}").unwrap();
    }
    traj.push('\n');
    for (k, row) in res.trajectory.iter().enumerate() {
        write!(traj, "{k}").unwrap();
        for v in row {
            write!(traj, ",{v}").unwrap();
        }
        traj.push('\n');
    }
    write(out.join("trajectory.csv"), traj)?;
    Ok(if res.diverged { EXIT_STATISTICAL } else { EXIT_OK })
}

fn run_gof(ctx: &Context, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let y = ctx.require_outcome("goodness of fit")?;
    let m = ctx.fixed_model(cfg)?;
    let s = ctx.sampler(cfg, 1000, InitialOutcome::Observed)?;
    let suite = match cfg.get("suite") {
        Some(list) => list
            .split(',')
            .map(|e| EffectSpec::parse(e.trim(), Some(&ctx.table)))
            .collect::<Result<Vec<_>>>()?,
        None => default_gof_suite(ctx.graph.is_directed()),
    };
    let report = gof(&m, &ctx.graph, &ctx.table, y, &suite, &s)?;
    println!("{report}");
    report.write_csv(out.join("gof.csv"))?;
    let deg = attribute_degree_gof(&m, &ctx.graph, &ctx.table, y, &s)?;
    println!("{deg}");
    deg.write_csvs(out)?;
    Ok(EXIT_OK)
}

fn run_degen(ctx: &Context, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let y = ctx.require_outcome("the degeneracy check")?;
    let m = ctx.fixed_model(cfg)?;
    let s = ctx.sampler(cfg, 100, InitialOutcome::Observed)?;
    let check = degeneracy_check(&m, &ctx.graph, &ctx.table, y, &s)?;
    println!("{check}");
    check.write_csvs(out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EnumerationOutput {
    effects: Vec<String>,
    theta: Vec<f64>,
    free_nodes: usize,
    configurations: usize,
    log_kappa: f64,
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    z_min: Vec<f64>,
    z_max: Vec<f64>,
}

/// Configurations above this count are not listed in `probabilities.csv`.
const MAX_LISTED: usize = 1 << 16;

fn run_enumerate(ctx: &Context, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let m = ctx.fixed_model(cfg)?;
    let base = ctx.outcome_or_zeros();
    let d = enumerate_conditional(&m, &ctx.graph, &ctx.table, &base)?;
    let p = m.len();
    let res = EnumerationOutput {
        effects: m.names(),
        theta: m.theta().to_vec(),
        free_nodes: d.free_nodes().len(),
        configurations: d.configurations(),
        log_kappa: d.log_kappa,
        mean: d.mean.iter().copied().collect(),
        covariance: (0..p).map(|i| (0..p).map(|j| d.covariance[(i, j)]).collect()).collect(),
        z_min: d.z_min.clone(),
        z_max: d.z_max.clone(),
    };
    let json = serde_json::to_string_pretty(&res).expect("enumeration serialises");
    println!("{json}");
    write(out.join("enumeration.json"), json + "\n")?;
    if d.configurations() <= MAX_LISTED {
        let mut s = String::from("mask,outcome,probability\n");
        for (mask, pr) in d.probabilities().into_iter().enumerate() {
            let y: String = d.outcome_of_mask(mask).iter().map(|v| char::from(b'0' + v)).collect();
            writeln!(s, "{mask},{y},{pr}").unwrap();
        }
        write(out.join("probabilities.csv"), s)?;
    }
    Ok(EXIT_OK)
}
