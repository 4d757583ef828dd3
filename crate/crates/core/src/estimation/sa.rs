use nalgebra::DMatrix;

use super::{fisher_std_err, prepare, t_ratios, EstimationResult};
use crate::covariates::CovariateTable;
use crate::effects::Model;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::outcome::OutcomeVector;
use crate::sampler::Chain;

/// Settings for three-phase stochastic approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    /// Samples used to estimate the scaling matrix at the starting values.
    pub phase1_samples: usize,
    pub subphases: usize,
    /// Gain of the first subphase; each later subphase halves it.
    pub a0: f64,
    /// Multiplier on the subphase lengths `ceil(2^(4(k-1)/3) (7 + p))`.
    pub phase2_multiplier: f64,
    pub phase3_samples: usize,
    /// Proposals between consecutive updates or samples; 0 means `10 n`.
    pub chain_steps: u64,
    /// Proposals before phase 1; 0 means `100 n`.
    pub burn_in: u64,
    pub divergence_bound: f64,
    pub t_threshold: f64,
    pub max_runs: usize,
    pub seed: u64,
    pub keep_trajectory: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            phase1_samples: 100,
            subphases: 5,
            a0: 0.1,
            phase2_multiplier: 1.0,
            phase3_samples: 1000,
            chain_steps: 0,
            burn_in: 0,
            divergence_bound: 100.0,
            t_threshold: 0.1,
            max_runs: 5,
            seed: 1,
            keep_trajectory: true,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<()> {
        if self.phase1_samples < 2 || self.phase3_samples < 2 {
            return Err(Error::Config("phase 1 and phase 3 need at least two samples".into()));
        }
        if self.subphases == 0 || self.max_runs == 0 {
            return Err(Error::Config("subphases and max_runs must be positive".into()));
        }
        if !(self.a0 > 0.0) || !(self.phase2_multiplier > 0.0) || !(self.divergence_bound > 0.0) {
            return Err(Error::Config("a0, phase2_multiplier and divergence_bound must be positive".into()));
        }
        Ok(())
    }

    /// Number of updates in subphase `k` (1-based) for `p` effects.
    pub fn subphase_length(&self, k: usize, p: usize) -> usize {
        let base = (2f64.powf(4.0 * (k as f64 - 1.0) / 3.0) * (7 + p) as f64).ceil();
        (base * self.phase2_multiplier).ceil() as usize
    }
}

/// Stochastic approximation (Robbins-Monro) estimate. `m0` gives the
/// effects and starting values. Diverging parameters are reported through
/// [`EstimationResult::diverged`], not as an error.
pub fn estimate_sa(
    m0: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    cfg: &SaConfig,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let (bound, z_obs) = prepare(m0, g, w, y_obs)?;
    let n = g.node_count() as u64;
    let steps = if cfg.chain_steps == 0 { 10 * n } else { cfg.chain_steps };
    let burn_in = if cfg.burn_in == 0 { 100 * n } else { cfg.burn_in };
    let p = m0.len();
    let names = m0.names();
    let mut chain = Chain::new(&bound, m0.theta(), y_obs.as_slice().to_vec(), y_obs.free_nodes(), cfg.seed)?;
    let mut trajectory = Vec::new();
    let mut theta = m0.theta().to_vec();
    let bound_ok = |t: &[f64]| t.iter().all(|v| v.is_finite() && v.abs() <= cfg.divergence_bound);

    // Phase 1: scaling from the statistics' variances at the start.
    let phase1 = chain.sample(burn_in, steps, cfg.phase1_samples, 100, false)?;
    let mut scale = diag_scale(&phase1.covariance());
    let mut last = None;

    for run in 1..=cfg.max_runs {
        // Phase 2.
        for k in 1..=cfg.subphases {
            let a = cfg.a0 * 0.5f64.powi(k as i32 - 1);
            let len = cfg.subphase_length(k, p);
            let mut sum = vec![0.0; p];
            for _ in 0..len {
                chain.run(steps);
                let z = chain.statistics();
                for j in 0..p {
                    theta[j] -= a * (z[j] - z_obs[j]) / scale[j];
                    sum[j] += theta[j];
                }
                if cfg.keep_trajectory {
                    trajectory.push(theta.clone());
                }
                if !bound_ok(&theta) {
                    log::warn!("stochastic approximation diverged in run {run}, subphase {k}: {theta:?}");
                    return Ok(EstimationResult::diverged(names, trajectory, run));
                }
                chain.set_theta(&theta);
            }
            theta = sum.iter().map(|s| s / len as f64).collect();
            chain.set_theta(&theta);
            chain.resync()?;
        }

        // Phase 3.
        let batch = chain.sample(steps * 10, steps, cfg.phase3_samples, 100, false)?;
        let cov = batch.covariance();
        let t = t_ratios(&batch.means(), &batch.std_devs(), &z_obs);
        let converged = t.iter().all(|v| v.abs() < cfg.t_threshold);
        log::info!("SA run {run}: theta {theta:?}, t {t:?}");
        let std_err = fisher_std_err(&cov, &names)?;
        last = Some(EstimationResult {
            names: names.clone(),
            theta_hat: theta.clone(),
            std_err,
            convergence_t: t,
            runs_used: run,
            converged,
            diverged: false,
            unstable: false,
            trajectory: Vec::new(),
        });
        if converged {
            break;
        }
        scale = diag_scale(&cov);
    }
    let mut result = last.expect("at least one run");
    result.trajectory = trajectory;
    Ok(result)
}

/// Diagonal of the covariance, with zero variances replaced by the
/// smallest positive one so constant statistics do not blow up the gain.
fn diag_scale(cov: &DMatrix<f64>) -> Vec<f64> {
    let d: Vec<f64> = cov.diagonal().iter().copied().collect();
    let floor = d.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };
    d.into_iter().map(|v| if v > 0.0 { v } else { floor }).collect()
}
