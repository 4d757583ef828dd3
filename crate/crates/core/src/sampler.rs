//! Single-flip Metropolis sampling of outcome vectors.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covariates::CovariateTable;
use crate::effects::{BoundModel, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments;
use crate::outcome::OutcomeVector;

/// Relative tolerance for incremental statistics at resynchronisation.
pub const RESYNC_TOLERANCE: f64 = 1e-6;

/// Where a chain starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialOutcome {
    Observed,
    /// Each free node independently 1 with this probability.
    Random(f64),
    AllZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Proposals discarded before the first retained sample.
    pub burn_in: u64,
    /// Proposals between retained samples.
    pub interval: u64,
    pub n_samples: usize,
    pub seed: u64,
    pub initial: InitialOutcome,
    /// Retained samples between closed-form resynchronisations.
    pub resync_every: usize,
    pub store_outcomes: bool,
}

impl SamplerConfig {
    /// Burn-in `100 n` and interval `10 n` proposals, 100 samples.
    pub fn desk_scale(n: usize, seed: u64) -> Self {
        SamplerConfig {
            burn_in: 100 * n as u64,
            interval: 10 * n as u64,
            n_samples: 100,
            seed,
            initial: InitialOutcome::Observed,
            resync_every: 100,
            store_outcomes: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval == 0 {
            return Err(Error::Config("sampler interval must be at least 1".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("sampler needs at least one sample".into()));
        }
        if self.resync_every == 0 {
            return Err(Error::Config("resync_every must be at least 1".into()));
        }
        if let InitialOutcome::Random(p) = self.initial {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("initial probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Mean degrees of the nodes with outcome 1 (NaN if there are none).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeSummary {
    pub mean_degree: f64,
    pub mean_in_degree: f64,
    pub mean_out_degree: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub burn_in: u64,
    pub interval: u64,
    pub theta: Vec<f64>,
    pub graph_digest: Option<String>,
}

/// Retained samples of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    names: Vec<String>,
    stats: Vec<Vec<f64>>,
    degrees: Vec<DegreeSummary>,
    outcomes: Option<Vec<Vec<u8>>>,
    acceptance_rate: f64,
    pub provenance: Provenance,
}

impl SampleBatch {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Statistic vectors, one per retained sample.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.stats
    }

    pub fn degrees(&self) -> &[DegreeSummary] {
        &self.degrees
    }

    pub fn outcomes(&self) -> Option<&[Vec<u8>]> {
        self.outcomes.as_deref()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.acceptance_rate
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.stats.iter().map(|r| r[k]).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.names.len()).map(|k| moments::mean(&self.column(k))).collect()
    }

    pub fn std_devs(&self) -> Vec<f64> {
        (0..self.names.len()).map(|k| moments::std_dev(&self.column(k))).collect()
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        moments::covariance(&self.stats)
    }

    /// CSV with header `sample,<effects>,mean_degree_y1,mean_indegree_y1,mean_outdegree_y1`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sample");
        for n in &self.names {
            s.push(',');
            s.push_str(n);
        }
        s.push_str(",mean_degree_y1,mean_indegree_y1,mean_outdegree_y1\n");
        for (k, (row, d)) in self.stats.iter().zip(&self.degrees).enumerate() {
            write!(s, "{k}").unwrap();
            for v in row {
                write!(s, ",{v}").unwrap();
            }
            writeln!(
                s,
                ",{},{},{}",
                fmt_na(d.mean_degree),
                fmt_na(d.mean_in_degree),
                fmt_na(d.mean_out_degree)
            )
            .unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn fmt_na(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        v.to_string()
    }
}

/// One Metropolis proposal. Picks a free node uniformly, and on acceptance
/// flips it and writes the statistic change into `dz`. Returns the flipped
/// node, or `None` if the proposal was rejected (`dz` is then scratch).
#[inline]
pub fn mcmc_step<R: Rng>(
    m: &BoundModel<'_>,
    theta: &[f64],
    y: &mut [u8],
    free: &[u32],
    rng: &mut R,
    dz: &mut [f64],
) -> Option<usize> {
    let i = free[rng.random_range(0..free.len())] as usize;
    m.change_stats(y, i, dz);
    let dot: f64 = theta.iter().zip(dz.iter()).map(|(t, d)| t * d).sum();
    let adding = y[i] == 0;
    let log_ratio = if adding { dot } else { -dot };
    let accept = log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp();
    if accept {
        y[i] = adding as u8;
        if !adding {
            dz.iter_mut().for_each(|d| *d = -*d);
        }
        return Some(i);
    }
    None
}

/// A Markov chain over outcome vectors with incrementally tracked statistics.
pub struct Chain<'m, 'g> {
    model: &'m BoundModel<'g>,
    theta: Vec<f64>,
    y: Vec<u8>,
    free: Vec<u32>,
    z: Vec<f64>,
    dz: Vec<f64>,
    rng: ChaCha8Rng,
    ones: usize,
    sum_in: u64,
    sum_out: u64,
    proposals: u64,
    accepted: u64,
}

impl<'m, 'g> Chain<'m, 'g> {
    pub fn new(model: &'m BoundModel<'g>, theta: &[f64], y: Vec<u8>, free: Vec<u32>, seed: u64) -> Result<Self> {
        let g = model.graph();
        if theta.len() != model.len() {
            return Err(Error::InvalidModel(format!(
                "{} parameters for {} effects",
                theta.len(),
                model.len()
            )));
        }
        if y.len() != g.node_count() {
            return Err(Error::Outcome(format!(
                "outcome has {} entries for a {}-node graph",
                y.len(),
                g.node_count()
            )));
        }
        let z = model.statistics(&y);
        let mut chain = Chain {
            model,
            theta: theta.to_vec(),
            dz: vec![0.0; model.len()],
            z,
            free,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ones: 0,
            sum_in: 0,
            sum_out: 0,
            proposals: 0,
            accepted: 0,
            y,
        };
        chain.recount_degrees();
        Ok(chain)
    }

    fn recount_degrees(&mut self) {
        let g = self.model.graph();
        self.ones = 0;
        self.sum_in = 0;
        self.sum_out = 0;
        for i in (0..self.y.len()).filter(|&i| self.y[i] == 1) {
            self.ones += 1;
            self.sum_in += g.in_degree(i) as u64;
            self.sum_out += g.out_degree(i) as u64;
        }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn set_theta(&mut self, theta: &[f64]) {
        self.theta.copy_from_slice(theta);
    }

    pub fn outcome(&self) -> &[u8] {
        &self.y
    }

    /// Current incrementally maintained statistics.
    pub fn statistics(&self) -> &[f64] {
        &self.z
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn degree_summary(&self) -> DegreeSummary {
        let g = self.model.graph();
        if self.ones == 0 {
            return DegreeSummary {
                mean_degree: f64::NAN,
                mean_in_degree: f64::NAN,
                mean_out_degree: f64::NAN,
            };
        }
        let k = self.ones as f64;
        let (din, dout) = (self.sum_in as f64 / k, self.sum_out as f64 / k);
        DegreeSummary {
            mean_degree: if g.is_directed() { din + dout } else { dout },
            mean_in_degree: din,
            mean_out_degree: dout,
        }
    }

    /// Advances the chain by `steps` proposals.
    pub fn run(&mut self, steps: u64) {
        if self.free.is_empty() {
            return;
        }
        let g = self.model.graph();
        for _ in 0..steps {
            if let Some(i) = mcmc_step(self.model, &self.theta, &mut self.y, &self.free, &mut self.rng, &mut self.dz) {
                self.accepted += 1;
                for (z, d) in self.z.iter_mut().zip(&self.dz) {
                    *z += d;
                }
                let (din, dout) = (g.in_degree(i) as u64, g.out_degree(i) as u64);
                if self.y[i] == 1 {
                    self.ones += 1;
                    self.sum_in += din;
                    self.sum_out += dout;
                } else {
                    self.ones -= 1;
                    self.sum_in -= din;
                    self.sum_out -= dout;
                }
            }
            self.proposals += 1;
        }
    }

    /// Recomputes the statistics from closed forms and fails if the
    /// incremental values drifted.
    pub fn resync(&mut self) -> Result<()> {
        let fresh = self.model.statistics(&self.y);
        for (k, (&inc, &rec)) in self.z.iter().zip(&fresh).enumerate() {
            if (inc - rec).abs() > RESYNC_TOLERANCE * rec.abs().max(1.0) {
                return Err(Error::KernelMismatch {
                    effect: self.model.effects()[k].to_string(),
                    incremental: inc,
                    recomputed: rec,
                });
            }
        }
        self.z = fresh;
        self.recount_degrees();
        Ok(())
    }

    /// Burns in, then retains `n_samples` statistic vectors `interval`
    /// proposals apart.
    pub fn sample(
        &mut self,
        burn_in: u64,
        interval: u64,
        n_samples: usize,
        resync_every: usize,
        store_outcomes: bool,
    ) -> Result<SampleBatch> {
        let start_proposals = self.proposals;
        let start_accepted = self.accepted;
        self.run(burn_in);
        let mut stats = Vec::with_capacity(n_samples);
        let mut degrees = Vec::with_capacity(n_samples);
        let mut outcomes = store_outcomes.then(Vec::new);
        for s in 0..n_samples {
            self.run(interval);
            if (s + 1) % resync_every == 0 || s + 1 == n_samples {
                self.resync()?;
            }
            stats.push(self.z.clone());
            degrees.push(self.degree_summary());
            if let Some(o) = outcomes.as_mut() {
                o.push(self.y.clone());
            }
        }
        let proposals = self.proposals - start_proposals;
        Ok(SampleBatch {
            names: self.model.names(),
            stats,
            degrees,
            outcomes,
            acceptance_rate: if proposals == 0 {
                0.0
            } else {
                (self.accepted - start_accepted) as f64 / proposals as f64
            },
            provenance: Provenance {
                seed: 0,
                burn_in,
                interval,
                theta: self.theta.clone(),
                graph_digest: None,
            },
        })
    }
}

/// Starting outcome for a chain given the observed vector (whose fixed mask
/// is respected) and the configured initialisation.
pub fn initial_outcome(y_obs: &OutcomeVector, initial: InitialOutcome, seed: u64) -> Vec<u8> {
    let mut y = y_obs.as_slice().to_vec();
    match initial {
        InitialOutcome::Observed => {}
        InitialOutcome::AllZero => {
            for i in y_obs.free_nodes() {
                y[i as usize] = 0;
            }
        }
        InitialOutcome::Random(p) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f14_17);
            for i in y_obs.free_nodes() {
                y[i as usize] = rng.random_bool(p) as u8;
            }
        }
    }
    y
}

/// Simulates outcome vectors from the model. `y_obs` supplies the fixed
/// mask and, for [`InitialOutcome::Observed`], the starting state.
pub fn simulate(
    m: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    cfg: &SamplerConfig,
) -> Result<SampleBatch> {
    cfg.validate()?;
    let bound = BoundModel::new(m.effects(), g, w)?;
    if y_obs.len() != g.node_count() {
        return Err(Error::Outcome(format!(
            "outcome has {} entries for a {}-node graph",
            y_obs.len(),
            g.node_count()
        )));
    }
    let y0 = initial_outcome(y_obs, cfg.initial, cfg.seed);
    let mut chain = Chain::new(&bound, m.theta(), y0, y_obs.free_nodes(), cfg.seed)?;
    let mut batch = chain.sample(cfg.burn_in, cfg.interval, cfg.n_samples, cfg.resync_every, cfg.store_outcomes)?;
    batch.provenance.seed = cfg.seed;
    batch.provenance.graph_digest = Some(g.digest());
    Ok(batch)
}
