//! Maximum likelihood estimation by stochastic approximation and by
//! equilibrium expectation.
//!
//! Gains, phase lengths and the replicate scheme are implementation
//! defaults; every one of them is a field of the config structs.

mod ee;
mod sa;

pub use ee::{estimate_ee, EeConfig};
pub use sa::{estimate_sa, SaConfig};

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::effects::{BoundModel, EffectSpec, Model};
use crate::error::{Error, Result};
use crate::moments::logit;
use crate::oracle::check_interior;
use crate::outcome::OutcomeVector;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub names: Vec<String>,
    pub theta_hat: Vec<f64>,
    pub std_err: Vec<f64>,
    /// `(mean - observed) / sd` of each statistic simulated at the estimate.
    pub convergence_t: Vec<f64>,
    pub runs_used: usize,
    pub converged: bool,
    pub diverged: bool,
    /// Replicates disagree by more than their internal noise (EE only).
    pub unstable: bool,
    pub trajectory: Vec<Vec<f64>>,
}

impl EstimationResult {
    /// Rows `effect,estimate,std_err,t_ratio,significant`, the last being
    /// `|estimate| > 1.96 std_err`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("effect,estimate,std_err,t_ratio,significant\n");
        for k in 0..self.names.len() {
            let sig = self.theta_hat[k].abs() > 1.96 * self.std_err[k];
            writeln!(
                s,
                "{},{},{},{},{}",
                self.names[k], self.theta_hat[k], self.std_err[k], self.convergence_t[k], sig
            )
            .unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Whether `theta` lies inside every effect's 95% interval.
    pub fn covers(&self, theta: &[f64]) -> Vec<bool> {
        theta
            .iter()
            .zip(&self.theta_hat)
            .zip(&self.std_err)
            .map(|((t, e), se)| (t - e).abs() <= 1.96 * se)
            .collect()
    }

    fn diverged(names: Vec<String>, trajectory: Vec<Vec<f64>>, runs_used: usize) -> Self {
        let p = names.len();
        EstimationResult {
            names,
            theta_hat: trajectory.last().cloned().unwrap_or_else(|| vec![f64::NAN; p]),
            std_err: vec![f64::NAN; p],
            convergence_t: vec![f64::NAN; p],
            runs_used,
            converged: false,
            diverged: true,
            unstable: false,
            trajectory,
        }
    }
}

impl std::fmt::Display for EstimationResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.diverged {
            "diverged"
        } else if self.converged {
            "converged"
        } else {
            "not converged"
        };
        writeln!(f, "{status} after {} run(s){}", self.runs_used, if self.unstable { ", unstable" } else { "" })?;
        writeln!(f, "{:<28} {:>12} {:>12} {:>10}", "effect", "estimate", "std_err", "t_ratio")?;
        for k in 0..self.names.len() {
            let star = if self.theta_hat[k].abs() > 1.96 * self.std_err[k] { "*" } else { "" };
            writeln!(
                f,
                "{:<28} {:>12.5} {:>12.5} {:>10.4} {star}",
                self.names[k], self.theta_hat[k], self.std_err[k], self.convergence_t[k]
            )?;
        }
        Ok(())
    }
}

/// Starting values: logit of the observed density for Density, 0 otherwise.
pub fn default_theta0(effects: &[EffectSpec], y_obs: &OutcomeVector) -> Vec<f64> {
    let p = y_obs.density().clamp(1e-6, 1.0 - 1e-6);
    effects
        .iter()
        .map(|e| if *e == EffectSpec::Density { logit(p) } else { 0.0 })
        .collect()
}

/// Per-effect attainable range given the fixed nodes. Covariate statistics
/// add each free node's negative or positive values; every other change
/// statistic is non-negative, so the extremes are all-zero and all-one.
pub(crate) fn attainable_range(m: &BoundModel<'_>, y_obs: &OutcomeVector) -> (Vec<f64>, Vec<f64>) {
    let free = y_obs.free_nodes();
    let mut lo_y = y_obs.as_slice().to_vec();
    let mut hi_y = lo_y.clone();
    for &i in &free {
        lo_y[i as usize] = 0;
        hi_y[i as usize] = 1;
    }
    let mut lo = m.statistics(&lo_y);
    let mut hi = m.statistics(&hi_y);
    let mut delta = vec![0.0; m.len()];
    for (k, e) in m.effects().iter().enumerate() {
        if matches!(e, EffectSpec::Covariate(_)) {
            let base = lo[k];
            let (mut neg, mut pos) = (0.0, 0.0);
            for &i in &free {
                m.change_stats(&lo_y, i as usize, &mut delta);
                if delta[k] < 0.0 {
                    neg += delta[k];
                } else {
                    pos += delta[k];
                }
            }
            lo[k] = base + neg;
            hi[k] = base + pos;
        }
    }
    (lo, hi)
}

/// Binds the model and verifies that the observed statistics are strictly
/// inside their attainable range.
pub(crate) fn prepare<'g>(
    m: &Model,
    g: &'g crate::graph::Graph,
    w: &'g crate::covariates::CovariateTable,
    y_obs: &OutcomeVector,
) -> Result<(BoundModel<'g>, Vec<f64>)> {
    let bound = BoundModel::new(m.effects(), g, w)?;
    if y_obs.len() != g.node_count() {
        return Err(Error::Outcome(format!(
            "outcome has {} entries for a {}-node graph",
            y_obs.len(),
            g.node_count()
        )));
    }
    let z_obs = bound.statistics(y_obs.as_slice());
    let (lo, hi) = attainable_range(&bound, y_obs);
    check_interior(m.effects(), &z_obs, &lo, &hi)?;
    Ok((bound, z_obs))
}

/// `sqrt(diag(cov^-1))`, or an error naming the effects with no variance.
pub(crate) fn fisher_std_err(cov: &DMatrix<f64>, names: &[String]) -> Result<Vec<f64>> {
    let p = cov.nrows();
    let singular = || {
        let flat: Vec<&str> = (0..p)
            .filter(|&k| cov[(k, k)] <= 0.0)
            .map(|k| names[k].as_str())
            .collect();
        Error::SingularCovariance(if flat.is_empty() {
            names.join(", ")
        } else {
            flat.join(", ")
        })
    };
    let inv = cov.clone().cholesky().ok_or_else(singular)?.inverse();
    Ok((0..p).map(|k| inv[(k, k)].sqrt()).collect())
}

pub(crate) fn t_ratios(means: &[f64], sds: &[f64], z_obs: &[f64]) -> Vec<f64> {
    means
        .iter()
        .zip(sds)
        .zip(z_obs)
        .map(|((m, s), o)| if *s > 0.0 { (m - o) / s } else { f64::NAN })
        .collect()
}
