//! Exact enumeration of the outcome distribution on tiny graphs.
//!
//! Every configuration of the free nodes is visited in Gray-code order so
//! that consecutive states differ by one flip and the statistics can be
//! updated with a single change statistic. Closed forms are recomputed
//! every [`RECOMPUTE_EVERY`] steps and any drift is reported.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::covariates::CovariateTable;
use crate::effects::{BoundModel, EffectSpec, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::outcome::OutcomeVector;
use crate::sampler::RESYNC_TOLERANCE;

/// Largest number of free nodes [`enumerate`] accepts.
pub const MAX_FREE: usize = 22;
/// Largest number of free nodes [`exact_mle`] accepts.
pub const MAX_FREE_MLE: usize = 18;
pub const RECOMPUTE_EVERY: u64 = 1 << 12;

/// The exact distribution over the free nodes' outcomes.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    free: Vec<u32>,
    base: Vec<u8>,
    log_weights: Vec<f64>,
    pub log_kappa: f64,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Per-effect minimum and maximum over all configurations.
    pub z_min: Vec<f64>,
    pub z_max: Vec<f64>,
}

impl ExactDistribution {
    pub fn free_nodes(&self) -> &[u32] {
        &self.free
    }

    pub fn configurations(&self) -> usize {
        self.log_weights.len()
    }

    /// Probability of configuration `mask`, bit `k` being the outcome of
    /// the `k`-th free node.
    pub fn probability_of_mask(&self, mask: usize) -> f64 {
        (self.log_weights[mask] - self.log_kappa).exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_weights.iter().map(|lw| (lw - self.log_kappa).exp()).collect()
    }

    /// Outcome vector for a mask, fixed nodes taken from the base vector.
    pub fn outcome_of_mask(&self, mask: usize) -> Vec<u8> {
        let mut y = self.base.clone();
        for (k, &i) in self.free.iter().enumerate() {
            y[i as usize] = ((mask >> k) & 1) as u8;
        }
        y
    }

    pub fn mask_of(&self, y: &[u8]) -> usize {
        self.free
            .iter()
            .enumerate()
            .map(|(k, &i)| (y[i as usize] as usize) << k)
            .sum()
    }

    pub fn probability(&self, y: &[u8]) -> f64 {
        self.probability_of_mask(self.mask_of(y))
    }
}

/// Weighted running moments in a rescaled exponent frame.
struct Accumulator {
    shift: f64,
    weight: f64,
    mean: Vec<f64>,
    comoment: Vec<f64>,
    z_min: Vec<f64>,
    z_max: Vec<f64>,
}

impl Accumulator {
    fn new(p: usize) -> Self {
        Accumulator {
            shift: f64::NEG_INFINITY,
            weight: 0.0,
            mean: vec![0.0; p],
            comoment: vec![0.0; p * p],
            z_min: vec![f64::INFINITY; p],
            z_max: vec![f64::NEG_INFINITY; p],
        }
    }

    fn rescale(&mut self, shift: f64) {
        if shift > self.shift {
            let f = (self.shift - shift).exp();
            self.weight *= f;
            self.comoment.iter_mut().for_each(|c| *c *= f);
            self.shift = shift;
        }
    }

    fn push(&mut self, lw: f64, z: &[f64], diff: &mut [f64]) {
        self.rescale(lw);
        let w = (lw - self.shift).exp();
        self.weight += w;
        let r = w / self.weight;
        let p = z.len();
        for k in 0..p {
            diff[k] = z[k] - self.mean[k];
            self.mean[k] += r * diff[k];
            self.z_min[k] = self.z_min[k].min(z[k]);
            self.z_max[k] = self.z_max[k].max(z[k]);
        }
        for a in 0..p {
            for b in 0..p {
                self.comoment[a * p + b] += w * diff[a] * (z[b] - self.mean[b]);
            }
        }
    }

    fn merge(mut self, mut other: Accumulator) -> Accumulator {
        if other.weight == 0.0 {
            return self;
        }
        if self.weight == 0.0 {
            return other;
        }
        let shift = self.shift.max(other.shift);
        self.rescale(shift);
        other.rescale(shift);
        let p = self.mean.len();
        let total = self.weight + other.weight;
        let delta: Vec<f64> = (0..p).map(|k| other.mean[k] - self.mean[k]).collect();
        let cross = self.weight * other.weight / total;
        for a in 0..p {
            for b in 0..p {
                self.comoment[a * p + b] += other.comoment[a * p + b] + cross * delta[a] * delta[b];
            }
        }
        for k in 0..p {
            self.mean[k] += delta[k] * other.weight / total;
            self.z_min[k] = self.z_min[k].min(other.z_min[k]);
            self.z_max[k] = self.z_max[k].max(other.z_max[k]);
        }
        self.weight = total;
        self
    }
}

/// Enumerates every outcome vector of `g` (all nodes free).
pub fn enumerate(m: &Model, g: &Graph, w: &CovariateTable) -> Result<ExactDistribution> {
    enumerate_conditional(m, g, w, &OutcomeVector::zeros(g.node_count()))
}

/// Enumerates the free nodes of `base`; fixed nodes keep their values.
pub fn enumerate_conditional(
    m: &Model,
    g: &Graph,
    w: &CovariateTable,
    base: &OutcomeVector,
) -> Result<ExactDistribution> {
    let bound = BoundModel::new(m.effects(), g, w)?;
    enumerate_bound(&bound, m.theta(), base)
}

pub(crate) fn enumerate_bound(bound: &BoundModel<'_>, theta: &[f64], base: &OutcomeVector) -> Result<ExactDistribution> {
    let free = base.free_nodes();
    let f = free.len();
    if f > MAX_FREE {
        return Err(Error::TooLarge { free: f, cap: MAX_FREE });
    }
    if base.len() != bound.graph().node_count() {
        return Err(Error::Outcome("outcome length does not match the graph".into()));
    }
    let mut y0 = base.as_slice().to_vec();
    for &i in &free {
        y0[i as usize] = 0;
    }
    let lead = if f >= 12 { 4.min(f) } else { 0 };
    let low = f - lead;
    let parts: Vec<(Accumulator, Vec<f64>)> = (0..1usize << lead)
        .into_par_iter()
        .map(|h| enumerate_part(bound, theta, &free, &y0, h, low))
        .collect::<Result<_>>()?;
    let p = bound.len();
    let mut log_weights = Vec::with_capacity(1 << f);
    let mut acc = Accumulator::new(p);
    for (a, lw) in parts {
        acc = acc.merge(a);
        log_weights.extend(lw);
    }
    let cov = DMatrix::from_row_slice(p, p, &acc.comoment) / acc.weight;
    Ok(ExactDistribution {
        free,
        base: y0,
        log_weights,
        log_kappa: acc.shift + acc.weight.ln(),
        mean: DVector::from_vec(acc.mean),
        covariance: (&cov + cov.transpose()) * 0.5,
        z_min: acc.z_min,
        z_max: acc.z_max,
    })
}

/// Enumerates the `low` lowest bits with the higher bits fixed to `high`.
fn enumerate_part(
    bound: &BoundModel<'_>,
    theta: &[f64],
    free: &[u32],
    y0: &[u8],
    high: usize,
    low: usize,
) -> Result<(Accumulator, Vec<f64>)> {
    let p = bound.len();
    let mut y = y0.to_vec();
    for (k, &i) in free.iter().enumerate().skip(low) {
        y[i as usize] = ((high >> (k - low)) & 1) as u8;
    }
    let mut z = bound.statistics(&y);
    let mut acc = Accumulator::new(p);
    let mut lw = vec![0.0; 1 << low];
    let mut delta = vec![0.0; p];
    let mut diff = vec![0.0; p];
    let dot = |z: &[f64]| theta.iter().zip(z).map(|(t, v)| t * v).sum::<f64>();
    let mut record = |z: &[f64], y: &[u8], lw: &mut [f64], acc: &mut Accumulator| {
        let mask: usize = free[..low]
            .iter()
            .enumerate()
            .map(|(k, &i)| (y[i as usize] as usize) << k)
            .sum();
        let l = dot(z);
        lw[mask] = l;
        acc.push(l, z, &mut diff);
    };
    record(&z, &y, &mut lw, &mut acc);
    for t in 1..(1u64 << low) {
        let i = free[t.trailing_zeros() as usize] as usize;
        bound.change_stats(&y, i, &mut delta);
        let sign = if y[i] == 0 { 1.0 } else { -1.0 };
        y[i] ^= 1;
        for (zk, dk) in z.iter_mut().zip(&delta) {
            *zk += sign * dk;
        }
        if t % RECOMPUTE_EVERY == 0 {
            let fresh = bound.statistics(&y);
            for (k, (&inc, &rec)) in z.iter().zip(&fresh).enumerate() {
                if (inc - rec).abs() > RESYNC_TOLERANCE * rec.abs().max(1.0) {
                    return Err(Error::KernelMismatch {
                        effect: bound.effects()[k].to_string(),
                        incremental: inc,
                        recomputed: rec,
                    });
                }
            }
            z = fresh;
        }
        record(&z, &y, &mut lw, &mut acc);
    }
    Ok((acc, lw))
}

/// Result of exact maximum likelihood.
#[derive(Debug, Clone)]
pub struct ExactMle {
    pub theta: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    /// Inverse Fisher information at the estimate.
    pub std_err: Vec<f64>,
}

/// Checks that every observed statistic lies strictly inside its attainable
/// range; a boundary value means the MLE does not exist.
pub(crate) fn check_interior(effects: &[EffectSpec], z_obs: &[f64], z_min: &[f64], z_max: &[f64]) -> Result<()> {
    for (k, e) in effects.iter().enumerate() {
        let tol = 1e-9 * z_obs[k].abs().max(1.0);
        if z_obs[k] <= z_min[k] + tol || z_obs[k] >= z_max[k] - tol {
            return Err(Error::NonExistence {
                effect: e.to_string(),
                observed: z_obs[k],
                min: z_min[k],
                max: z_max[k],
            });
        }
    }
    Ok(())
}

/// Exact maximum likelihood estimate by damped Newton ascent, with the
/// exact covariance as the negative Hessian. `m` supplies the effects and
/// the starting value; `base` the fixed mask.
pub fn exact_mle(z_obs: &[f64], m: &Model, g: &Graph, w: &CovariateTable, base: &OutcomeVector) -> Result<ExactMle> {
    let bound = BoundModel::new(m.effects(), g, w)?;
    let f = base.free_nodes().len();
    if f > MAX_FREE_MLE {
        return Err(Error::TooLarge { free: f, cap: MAX_FREE_MLE });
    }
    if z_obs.len() != m.len() {
        return Err(Error::InvalidModel("observed statistics do not match the model".into()));
    }
    let p = m.len();
    let zo = DVector::from_column_slice(z_obs);
    let mut theta = DVector::from_column_slice(m.theta());
    let mut dist = enumerate_bound(&bound, theta.as_slice(), base)?;
    check_interior(m.effects(), z_obs, &dist.z_min, &dist.z_max)?;
    let loglik = |t: &DVector<f64>, d: &ExactDistribution| t.dot(&zo) - d.log_kappa;
    let mut ll = loglik(&theta, &dist);
    for iter in 0..200 {
        let grad = &zo - &dist.mean;
        if grad.amax() < 1e-8 {
            let info = dist
                .covariance
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::SingularCovariance(m.names().join(", ")))?;
            return Ok(ExactMle {
                theta: theta.as_slice().to_vec(),
                log_likelihood: ll,
                iterations: iter,
                std_err: (0..p).map(|k| info[(k, k)].sqrt()).collect(),
            });
        }
        let mut h = dist.covariance.clone();
        let step = loop {
            if let Some(c) = h.clone().cholesky() {
                break c.solve(&grad);
            }
            let ridge = 1e-10 * h.diagonal().amax().max(1e-300);
            for k in 0..p {
                h[(k, k)] += ridge.max(h[(k, k)] * 1e-6);
            }
        };
        let mut scale = 1.0;
        loop {
            let cand = &theta + &step * scale;
            let d = enumerate_bound(&bound, cand.as_slice(), base)?;
            let l = loglik(&cand, &d);
            if l >= ll - 1e-12 * ll.abs().max(1.0) || scale < 1e-8 {
                theta = cand;
                dist = d;
                ll = l;
                break;
            }
            scale *= 0.5;
        }
        if theta.amax() > 50.0 {
            return Err(Error::NoConvergence(format!(
                "parameters diverged past 50 at iteration {iter}: {:?}",
                theta.as_slice()
            )));
        }
    }
    Err(Error::NoConvergence("Newton iterations exhausted".into()))
}
