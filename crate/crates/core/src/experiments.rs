//! Parameter sweeps and phase-transition detection.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::covariates::CovariateTable;
use crate::effects::{BoundModel, EffectSpec, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments;
use crate::outcome::OutcomeVector;
use crate::sampler::{fmt_na, initial_outcome, Chain, SampleBatch, SamplerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub varied: EffectSpec,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    /// Settings for every grid point; point `k` uses seed `seed + k`.
    pub sampler: SamplerConfig,
}

impl SweepConfig {
    /// Grid -1.0..=1.0 in steps of 0.01.
    pub fn new(varied: EffectSpec, sampler: SamplerConfig) -> Self {
        SweepConfig {
            varied,
            lo: -1.0,
            hi: 1.0,
            step: 0.01,
            sampler,
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(Error::Config(format!(
                "invalid sweep grid {}..{} step {}",
                self.lo, self.hi, self.step
            )));
        }
        let points = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..points).map(|k| self.lo + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub theta: f64,
    pub batch: std::result::Result<SampleBatch, String>,
}

/// Per-point summary of the varied effect's statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub theta: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_degree_y1: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub names: Vec<String>,
    pub varied: usize,
    pub directed: bool,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    pub fn summaries(&self) -> Vec<PointSummary> {
        self.points
            .iter()
            .map(|p| match &p.batch {
                Ok(b) => {
                    let col = b.column(self.varied);
                    let deg: Vec<f64> = b.degrees().iter().map(|d| d.mean_degree).filter(|v| !v.is_nan()).collect();
                    PointSummary {
                        theta: p.theta,
                        mean: moments::mean(&col),
                        variance: moments::variance(&col),
                        mean_degree_y1: moments::mean(&deg),
                    }
                }
                Err(_) => PointSummary {
                    theta: p.theta,
                    mean: f64::NAN,
                    variance: f64::NAN,
                    mean_degree_y1: f64::NAN,
                },
            })
            .collect()
    }

    /// Rows `theta,sample,<effects>,mean_degree_y1` plus in/out columns
    /// for directed graphs. Failed points are omitted.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,sample");
        for n in &self.names {
            write!(s, ",{n}").unwrap();
        }
        s.push_str(",mean_degree_y1");
        if self.directed {
            s.push_str(",mean_indegree_y1,mean_outdegree_y1");
        }
        s.push('\n');
        for p in &self.points {
            let Ok(b) = &p.batch else { continue };
            for (k, (row, d)) in b.rows().iter().zip(b.degrees()).enumerate() {
                write!(s, "{},{k}", p.theta).unwrap();
                for v in row {
                    write!(s, ",{v}").unwrap();
                }
                write!(s, ",{}", fmt_na(d.mean_degree)).unwrap();
                if self.directed {
                    write!(s, ",{},{}", fmt_na(d.mean_in_degree), fmt_na(d.mean_out_degree)).unwrap();
                }
                s.push('\n');
            }
        }
        s
    }

    /// Rows `theta,mean,variance,mean_degree_y1,error`.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("theta,mean,variance,mean_degree_y1,error\n");
        for (p, sum) in self.points.iter().zip(self.summaries()) {
            let err = p.batch.as_ref().err().map_or(String::new(), |e| e.replace(',', ";"));
            writeln!(
                s,
                "{},{},{},{},{err}",
                sum.theta,
                fmt_na(sum.mean),
                fmt_na(sum.variance),
                fmt_na(sum.mean_degree_y1)
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

/// Simulates the model at every grid value of the varied effect, one fresh
/// chain per point. Points run in parallel on the current rayon pool; the
/// table is in grid order regardless.
pub fn sweep(cfg: &SweepConfig, m: &Model, g: &Graph, w: &CovariateTable, y_obs: &OutcomeVector) -> Result<SweepTable> {
    cfg.sampler.validate()?;
    let varied = m
        .index_of(&cfg.varied)
        .ok_or_else(|| Error::Config(format!("varied effect {} is not in the model", cfg.varied)))?;
    let grid = cfg.grid()?;
    let bound = BoundModel::new(m.effects(), g, w)?;
    let free = y_obs.free_nodes();
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let seed = cfg.sampler.seed.wrapping_add(k as u64);
            let mut theta = m.theta().to_vec();
            theta[varied] = t;
            let y0 = initial_outcome(y_obs, cfg.sampler.initial, seed);
            let s = &cfg.sampler;
            let batch = Chain::new(&bound, &theta, y0, free.clone(), seed)
                .and_then(|mut c| c.sample(s.burn_in, s.interval, s.n_samples, s.resync_every, false))
                .map(|mut b| {
                    b.provenance.seed = seed;
                    b
                })
                .map_err(|e| e.to_string());
            if let Err(e) = &batch {
                log::warn!("sweep point {t}: {e}");
            }
            SweepPoint { theta: t, batch }
        })
        .collect();
    Ok(SweepTable {
        names: m.names(),
        varied,
        directed: g.is_directed(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionThresholds {
    pub peak_ratio: f64,
    pub jump: f64,
}

impl Default for TransitionThresholds {
    fn default() -> Self {
        TransitionThresholds {
            peak_ratio: 10.0,
            jump: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    pub peak_theta: f64,
    /// Largest per-point variance over the median per-point variance.
    pub peak_ratio: f64,
    /// Largest change in per-point mean between adjacent grid values,
    /// divided by the range of the per-point means.
    pub max_jump: f64,
    pub jump_theta: f64,
    /// Rank correlation of grid value and per-point mean.
    pub spearman: f64,
    pub near_degenerate: bool,
}

impl std::fmt::Display for TransitionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "peak variance at theta = {}", self.peak_theta)?;
        writeln!(f, "peak/median variance ratio = {:.4}", self.peak_ratio)?;
        writeln!(f, "largest normalised jump = {:.4} at theta = {}", self.max_jump, self.jump_theta)?;
        writeln!(f, "spearman(theta, mean) = {:.5}", self.spearman)?;
        write!(
            f,
            "classification: {}",
            if self.near_degenerate { "near-degenerate" } else { "smooth" }
        )
    }
}

/// Classifies a sweep as near-degenerate when the variance peak ratio and
/// the normalised jump both exceed their thresholds.
pub fn detect_transition(summaries: &[PointSummary], th: TransitionThresholds) -> Result<TransitionReport> {
    let pts: Vec<&PointSummary> = summaries.iter().filter(|s| s.mean.is_finite()).collect();
    if pts.len() < 20 {
        return Err(Error::Config(format!(
            "transition detection needs at least 20 grid points, got {}",
            pts.len()
        )));
    }
    let vars: Vec<f64> = pts.iter().map(|s| s.variance).collect();
    let means: Vec<f64> = pts.iter().map(|s| s.mean).collect();
    let thetas: Vec<f64> = pts.iter().map(|s| s.theta).collect();
    let (peak, &peak_var) = vars
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let med = moments::median(&vars);
    let peak_ratio = if med > 0.0 {
        peak_var / med
    } else if peak_var == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let (mut max_jump, mut jump_theta) = (0.0, thetas[0]);
    if range > 0.0 {
        for k in 1..means.len() {
            let j = (means[k] - means[k - 1]).abs() / range;
            if j > max_jump {
                max_jump = j;
                jump_theta = thetas[k];
            }
        }
    }
    Ok(TransitionReport {
        peak_theta: thetas[peak],
        peak_ratio,
        max_jump,
        jump_theta,
        spearman: moments::spearman(&thetas, &means),
        near_degenerate: peak_ratio > th.peak_ratio && max_jump > th.jump,
    })
}
