use rayon::prelude::*;

use super::{fisher_std_err, prepare, t_ratios, EstimationResult};
use crate::covariates::CovariateTable;
use crate::effects::Model;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments;
use crate::outcome::OutcomeVector;
use crate::sampler::Chain;

/// Settings for equilibrium-expectation estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct EeConfig {
    /// Parameter updates per replicate.
    pub updates: usize,
    /// Proposals between updates; 0 means `n / 10` clamped to 10..=100000.
    pub proposals_per_update: u64,
    pub c1: f64,
    pub epsilon: f64,
    /// Half-life, in updates, of the running mean of squared deviations.
    pub half_life: f64,
    pub replicates: usize,
    /// Samples at the estimate used for standard errors and t-ratios.
    pub final_samples: usize,
    /// Proposals between final samples; 0 means `n`.
    pub final_interval: u64,
    pub divergence_bound: f64,
    pub t_threshold: f64,
    /// Replicates are unstable when their spread exceeds this multiple of
    /// the within-replicate batch-means error.
    pub instability_ratio: f64,
    pub seed: u64,
    pub keep_trajectory: bool,
}

impl Default for EeConfig {
    fn default() -> Self {
        EeConfig {
            updates: 2000,
            proposals_per_update: 0,
            c1: 0.01,
            epsilon: 1e-6,
            half_life: 100.0,
            replicates: 20,
            final_samples: 500,
            final_interval: 0,
            divergence_bound: 100.0,
            t_threshold: 0.1,
            instability_ratio: 5.0,
            seed: 1,
            keep_trajectory: false,
        }
    }
}

impl EeConfig {
    fn validate(&self) -> Result<()> {
        if self.updates < 4 || self.replicates == 0 || self.final_samples < 2 {
            return Err(Error::Config(
                "EE needs at least 4 updates, 1 replicate and 2 final samples".into(),
            ));
        }
        if !(self.c1 > 0.0) || !(self.epsilon > 0.0) || !(self.half_life > 0.0) {
            return Err(Error::Config("c1, epsilon and half_life must be positive".into()));
        }
        Ok(())
    }

    pub fn proposals(&self, n: usize) -> u64 {
        if self.proposals_per_update > 0 {
            self.proposals_per_update
        } else {
            (n as u64 / 10).clamp(10, 100_000)
        }
    }
}

struct Replicate {
    estimate: Vec<f64>,
    /// Batch-means standard error of the second-half trajectory mean.
    within_se: Vec<f64>,
    trajectory: Vec<Vec<f64>>,
    diverged: bool,
}

fn run_replicate(
    bound: &crate::effects::BoundModel<'_>,
    theta0: &[f64],
    y_obs: &OutcomeVector,
    z_obs: &[f64],
    cfg: &EeConfig,
    seed: u64,
) -> Result<Replicate> {
    let p = theta0.len();
    let m = cfg.proposals(y_obs.len());
    let decay = 0.5f64.powf(1.0 / cfg.half_life);
    let mut chain = Chain::new(bound, theta0, y_obs.as_slice().to_vec(), y_obs.free_nodes(), seed)?;
    let mut theta = theta0.to_vec();
    let mut v = vec![f64::NAN; p];
    let mut traj = Vec::with_capacity(cfg.updates);
    for step in 0..cfg.updates {
        chain.run(m);
        let z = chain.statistics();
        for k in 0..p {
            let d = z[k] - z_obs[k];
            v[k] = if v[k].is_nan() { d * d } else { decay * v[k] + (1.0 - decay) * d * d };
            theta[k] -= cfg.c1 / (cfg.epsilon + v[k]) * d;
        }
        traj.push(theta.clone());
        if theta.iter().any(|t| !t.is_finite() || t.abs() > cfg.divergence_bound) {
            log::warn!("EE replicate {seed} diverged at update {step}: {theta:?}");
            return Ok(Replicate {
                estimate: theta,
                within_se: vec![f64::NAN; p],
                trajectory: traj,
                diverged: true,
            });
        }
        chain.set_theta(&theta);
        if (step + 1) % 500 == 0 {
            chain.resync()?;
        }
    }
    let half = &traj[traj.len() / 2..];
    let mut estimate = Vec::with_capacity(p);
    let mut within_se = Vec::with_capacity(p);
    for k in 0..p {
        let col: Vec<f64> = half.iter().map(|t| t[k]).collect();
        estimate.push(moments::mean(&col));
        within_se.push(moments::batch_means_se(&col, 20));
    }
    Ok(Replicate {
        estimate,
        within_se,
        trajectory: traj,
        diverged: false,
    })
}

/// Equilibrium-expectation estimate: short chain segments started from the
/// observed outcome, each followed by a small parameter correction, over
/// independent replicates.
///
/// The standard error adds the Fisher information error at the pooled
/// estimate and the replicate-to-replicate spread of the estimate.
pub fn estimate_ee(
    m0: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    cfg: &EeConfig,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let (bound, z_obs) = prepare(m0, g, w, y_obs)?;
    let names = m0.names();
    let p = m0.len();
    let reps: Vec<Replicate> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(&bound, m0.theta(), y_obs, &z_obs, cfg, cfg.seed.wrapping_add(r as u64)))
        .collect::<Result<_>>()?;
    let trajectory = if cfg.keep_trajectory {
        reps.iter().flat_map(|r| r.trajectory.iter().cloned()).collect()
    } else {
        Vec::new()
    };
    if let Some(bad) = reps.iter().find(|r| r.diverged) {
        let traj = if cfg.keep_trajectory { trajectory } else { bad.trajectory.clone() };
        let mut res = EstimationResult::diverged(names, traj, cfg.replicates);
        res.theta_hat = bad.estimate.clone();
        return Ok(res);
    }
    let r = reps.len() as f64;
    let mut theta = vec![0.0; p];
    let mut between_var = vec![0.0; p];
    let mut unstable = false;
    for k in 0..p {
        let est: Vec<f64> = reps.iter().map(|x| x.estimate[k]).collect();
        theta[k] = moments::mean(&est);
        between_var[k] = moments::variance(&est);
        let within = moments::mean(&reps.iter().map(|x| x.within_se[k]).collect::<Vec<_>>());
        if reps.len() > 1 && between_var[k].sqrt() > cfg.instability_ratio * within {
            unstable = true;
        }
    }

    let n = g.node_count() as u64;
    let interval = if cfg.final_interval == 0 { n } else { cfg.final_interval };
    let mut chain = Chain::new(&bound, &theta, y_obs.as_slice().to_vec(), y_obs.free_nodes(), cfg.seed ^ 0xee)?;
    let batch = chain.sample(10 * interval, interval, cfg.final_samples, 100, false)?;
    let fisher = fisher_std_err(&batch.covariance(), &names)?;
    let std_err = (0..p).map(|k| (fisher[k].powi(2) + between_var[k] / r).sqrt()).collect();
    let convergence_t = t_ratios(&batch.means(), &batch.std_devs(), &z_obs);
    let converged = convergence_t.iter().all(|t| t.abs() < cfg.t_threshold);
    Ok(EstimationResult {
        names,
        theta_hat: theta,
        std_err,
        convergence_t,
        runs_used: cfg.replicates,
        converged,
        diverged: false,
        unstable,
        trajectory,
    })
}
