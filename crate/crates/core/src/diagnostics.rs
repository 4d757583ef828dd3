//! Goodness of fit, degeneracy checks and degree distributions of the
//! attribute nodes.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::covariates::CovariateTable;
use crate::effects::{EffectSpec, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments;
use crate::outcome::OutcomeVector;
use crate::sampler::{fmt_na, simulate, SampleBatch, SamplerConfig};

/// Model effects followed by the suite members not already in the model,
/// the latter at parameter 0 so they are tracked but do not affect the law.
fn augmented(m: &Model, suite: &[EffectSpec]) -> Result<(Model, usize)> {
    let mut effects = m.effects().to_vec();
    let mut theta = m.theta().to_vec();
    for e in suite {
        if !effects.contains(e) {
            effects.push(e.clone());
            theta.push(0.0);
        }
    }
    Ok((Model::new(effects, theta)?, m.len()))
}

fn write_file(path: &Path, contents: String) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofRow {
    pub name: String,
    pub included: bool,
    pub observed: f64,
    pub mean: f64,
    pub sd: f64,
    /// `None` when the simulated statistic has no variance.
    pub t: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GofReport {
    pub rows: Vec<GofRow>,
    pub batch: SampleBatch,
}

impl GofReport {
    /// True if every row with variance has `|t| < limit`.
    pub fn all_within(&self, limit: f64) -> bool {
        self.rows.iter().all(|r| r.t.is_none_or(|t| t.abs() < limit))
    }

    pub fn degenerate_rows(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| r.t.is_none()).map(|r| r.name.as_str()).collect()
    }

    /// Rows `effect,included,observed,mean,sd,t_ratio,good_fit`; degenerate
    /// rows have `t_ratio` NA and `good_fit` `degenerate`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("effect,included,observed,mean,sd,t_ratio,good_fit\n");
        for r in &self.rows {
            let (t, fit) = match r.t {
                Some(t) => (t.to_string(), (t.abs() < 1.0).to_string()),
                None => ("NA".into(), "degenerate".into()),
            };
            writeln!(s, "{},{},{},{},{},{t},{fit}", r.name, r.included, r.observed, r.mean, r.sd).unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_csv())
    }
}

impl std::fmt::Display for GofReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<28} {:>14} {:>14} {:>12} {:>9}", "effect", "observed", "mean", "sd", "t")?;
        for r in &self.rows {
            let t = r.t.map_or("degenerate".to_string(), |t| format!("{t:.3}"));
            let mark = if r.included { " (in model)" } else { "" };
            writeln!(
                f,
                "{:<28} {:>14.4} {:>14.4} {:>12.4} {:>9}{mark}",
                r.name, r.observed, r.mean, r.sd, t
            )?;
        }
        Ok(())
    }
}

/// Simulates at the model's parameters and compares every model and suite
/// statistic with its observed value.
pub fn gof(
    m: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    suite: &[EffectSpec],
    cfg: &SamplerConfig,
) -> Result<GofReport> {
    let (aug, included) = augmented(m, suite)?;
    let batch = simulate(&aug, g, w, y_obs, cfg)?;
    let observed = crate::effects::BoundModel::new(aug.effects(), g, w)?.statistics(y_obs.as_slice());
    let (means, sds) = (batch.means(), batch.std_devs());
    let rows = aug
        .names()
        .into_iter()
        .enumerate()
        .map(|(k, name)| GofRow {
            name,
            included: k < included,
            observed: observed[k],
            mean: means[k],
            sd: sds[k],
            t: (sds[k] > 0.0).then(|| (means[k] - observed[k]) / sds[k]),
        })
        .collect();
    Ok(GofReport { rows, batch })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyRow {
    pub name: String,
    pub observed: f64,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub zero_variance: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DegeneracyCheck {
    pub observed: Vec<f64>,
    pub batch: SampleBatch,
}

impl DegeneracyCheck {
    /// Rows at a central band of the given coverage (0.95 gives the
    /// 2.5 to 97.5 percentile band).
    pub fn rows_at(&self, coverage: f64) -> Vec<DegeneracyRow> {
        let tail = (1.0 - coverage) / 2.0;
        self.batch
            .names()
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let col = self.batch.column(k);
                let (lo, hi) = (moments::quantile(&col, tail), moments::quantile(&col, 1.0 - tail));
                let obs = self.observed[k];
                DegeneracyRow {
                    name: name.clone(),
                    observed: obs,
                    mean: moments::mean(&col),
                    lo,
                    hi,
                    zero_variance: moments::variance(&col) == 0.0,
                    pass: lo <= obs && obs <= hi,
                }
            })
            .collect()
    }

    pub fn rows(&self) -> Vec<DegeneracyRow> {
        self.rows_at(0.95)
    }

    pub fn pass(&self) -> bool {
        self.rows().iter().all(|r| r.pass)
    }

    /// Rows `effect,observed,mean,lo95,hi95,zero_variance,verdict`.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("effect,observed,mean,lo95,hi95,zero_variance,verdict\n");
        for r in self.rows() {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.name,
                r.observed,
                r.mean,
                r.lo,
                r.hi,
                r.zero_variance,
                if r.pass { "pass" } else { "fail" }
            )
            .unwrap();
        }
        s
    }

    /// Long-format trace `sample,effect,value,observed`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("sample,effect,value,observed\n");
        for (i, row) in self.batch.rows().iter().enumerate() {
            for (k, name) in self.batch.names().iter().enumerate() {
                writeln!(s, "{i},{name},{},{}", row[k], self.observed[k]).unwrap();
            }
        }
        s
    }

    /// Histogram `effect,bin_lo,bin_hi,count,observed` with `bins` equal
    /// bins per effect spanning the simulated range.
    pub fn histogram_csv(&self, bins: usize) -> String {
        let bins = bins.max(1);
        let mut s = String::from("effect,bin_lo,bin_hi,count,observed\n");
        for (k, name) in self.batch.names().iter().enumerate() {
            let col = self.batch.column(k);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
            let mut counts = vec![0usize; bins];
            for v in &col {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
            for (b, c) in counts.iter().enumerate() {
                let a = lo + b as f64 * width;
                writeln!(s, "{name},{a},{},{c},{}", a + width, self.observed[k]).unwrap();
            }
        }
        s
    }

    /// Writes `degeneracy_summary.csv`, `degeneracy_trace.csv` and
    /// `degeneracy_histogram.csv` into `dir`.
    pub fn write_csvs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        write_file(&dir.join("degeneracy_summary.csv"), self.summary_csv())?;
        write_file(&dir.join("degeneracy_trace.csv"), self.trace_csv())?;
        write_file(&dir.join("degeneracy_histogram.csv"), self.histogram_csv(20))
    }
}

impl std::fmt::Display for DegeneracyCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<28} {:>14} {:>14} {:>14} {:>14} verdict",
            "effect", "observed", "mean", "2.5%", "97.5%"
        )?;
        for r in self.rows() {
            writeln!(
                f,
                "{:<28} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {}{}",
                r.name,
                r.observed,
                r.mean,
                r.lo,
                r.hi,
                if r.pass { "pass" } else { "FAIL" },
                if r.zero_variance { " (zero variance)" } else { "" }
            )?;
        }
        Ok(())
    }
}

/// Simulates at the model's parameters (starting from the observed
/// outcome unless configured otherwise) and checks whether each observed
/// statistic sits inside the simulated 95% band.
pub fn degeneracy_check(
    m: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    cfg: &SamplerConfig,
) -> Result<DegeneracyCheck> {
    let batch = simulate(m, g, w, y_obs, cfg)?;
    let observed = crate::effects::BoundModel::new(m.effects(), g, w)?.statistics(y_obs.as_slice());
    Ok(DegeneracyCheck { observed, batch })
}

/// Which degree a distribution is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    Degree,
    In,
    Out,
}

impl DegreeKind {
    fn of(self, g: &Graph, i: usize) -> usize {
        match self {
            DegreeKind::Degree => g.degree(i),
            DegreeKind::In => g.in_degree(i),
            DegreeKind::Out => g.out_degree(i),
        }
    }

    fn label(self) -> &'static str {
        match self {
            DegreeKind::Degree => "degree",
            DegreeKind::In => "indegree",
            DegreeKind::Out => "outdegree",
        }
    }
}

/// Degree distribution of attribute nodes for one family of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub kind: DegreeKind,
    /// `counts[s][d]`: attribute nodes of degree `d` in sample `s`; the
    /// last bin collects every degree at or above it.
    pub counts: Vec<Vec<usize>>,
    /// Mean degree of attribute nodes per sample.
    pub mean_degree: Vec<f64>,
}

fn distribution(g: &Graph, outcomes: &[Vec<u8>], kind: DegreeKind, cap: usize) -> DegreeDistribution {
    let mut counts = Vec::with_capacity(outcomes.len());
    let mut means = Vec::with_capacity(outcomes.len());
    for y in outcomes {
        let mut c = vec![0usize; cap + 1];
        let (mut sum, mut ones) = (0usize, 0usize);
        for i in (0..y.len()).filter(|&i| y[i] == 1) {
            let d = kind.of(g, i);
            c[d.min(cap)] += 1;
            sum += d;
            ones += 1;
        }
        counts.push(c);
        means.push(if ones == 0 { f64::NAN } else { sum as f64 / ones as f64 });
    }
    DegreeDistribution {
        kind,
        counts,
        mean_degree: means,
    }
}

#[derive(Debug, Clone)]
pub struct AttributeDegreeReport {
    /// Mean over ALAAM samples of the fraction of attribute nodes.
    pub alaam_density: f64,
    pub baseline_density: f64,
    pub alaam: Vec<DegreeDistribution>,
    pub baseline: Vec<DegreeDistribution>,
    pub observed: Vec<DegreeDistribution>,
    /// Two-sided Welch test of equal mean attribute-node degree between
    /// ALAAM and baseline samples, per degree kind.
    pub welch_p: Vec<f64>,
}

impl AttributeDegreeReport {
    fn means(d: &DegreeDistribution) -> f64 {
        moments::mean(&d.mean_degree.iter().copied().filter(|v| !v.is_nan()).collect::<Vec<_>>())
    }

    /// Long format `source,sample,kind,degree,count`, sources `alaam`,
    /// `random` and `observed`.
    pub fn distribution_csv(&self) -> String {
        let mut s = String::from("source,sample,kind,degree,count\n");
        for (src, ds) in [("alaam", &self.alaam), ("random", &self.baseline), ("observed", &self.observed)] {
            for d in ds {
                for (i, c) in d.counts.iter().enumerate() {
                    for (deg, n) in c.iter().enumerate() {
                        writeln!(s, "{src},{i},{},{deg},{n}", d.kind.label()).unwrap();
                    }
                }
            }
        }
        s
    }

    /// Rows `kind,alaam_mean,random_mean,observed_mean,welch_p`: the three
    /// mean lines of the degree plots.
    pub fn means_csv(&self) -> String {
        let mut s = String::from("kind,alaam_mean,random_mean,observed_mean,welch_p\n");
        for k in 0..self.alaam.len() {
            writeln!(
                s,
                "{},{},{},{},{}",
                self.alaam[k].kind.label(),
                fmt_na(Self::means(&self.alaam[k])),
                fmt_na(Self::means(&self.baseline[k])),
                fmt_na(Self::means(&self.observed[k])),
                fmt_na(self.welch_p[k])
            )
            .unwrap();
        }
        s
    }

    /// Writes `degree_distribution.csv` and `degree_means.csv` into `dir`.
    pub fn write_csvs(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        write_file(&dir.join("degree_distribution.csv"), self.distribution_csv())?;
        write_file(&dir.join("degree_means.csv"), self.means_csv())
    }
}

impl std::fmt::Display for AttributeDegreeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "attribute density: ALAAM {:.6}, random baseline {:.6}",
            self.alaam_density, self.baseline_density
        )?;
        for k in 0..self.alaam.len() {
            writeln!(
                f,
                "mean {} of attribute nodes: ALAAM {:.4}, random {:.4}, observed {:.4} (Welch p = {:.4})",
                self.alaam[k].kind.label(),
                Self::means(&self.alaam[k]),
                Self::means(&self.baseline[k]),
                Self::means(&self.observed[k]),
                self.welch_p[k]
            )?;
        }
        Ok(())
    }
}

/// Two-sided Welch t-test p-value; NaN when either sample is degenerate.
pub fn welch_p_value(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (moments::variance(a) / na, moments::variance(b) / nb);
    let se2 = va + vb;
    if a.len() < 2 || b.len() < 2 || se2 == 0.0 {
        return f64::NAN;
    }
    let t = (moments::mean(a) - moments::mean(b)) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    match StudentsT::new(0.0, 1.0, df) {
        Ok(d) => 2.0 * (1.0 - d.cdf(t.abs())),
        Err(_) => f64::NAN,
    }
}

/// Compares degree distributions of attribute nodes in ALAAM samples, in
/// a random baseline with the same mean attribute density, and in the
/// observed outcome. Degrees are binned at unit width up to 110% of the
/// observed maximum.
pub fn attribute_degree_gof(
    m: &Model,
    g: &Graph,
    w: &CovariateTable,
    y_obs: &OutcomeVector,
    cfg: &SamplerConfig,
) -> Result<AttributeDegreeReport> {
    let mut cfg = cfg.clone();
    cfg.store_outcomes = true;
    let batch = simulate(m, g, w, y_obs, &cfg)?;
    let outcomes = batch.outcomes().expect("outcomes stored").to_vec();
    let n = g.node_count() as f64;
    let alaam_density = moments::mean(&outcomes.iter().map(|y| y.iter().map(|&v| v as f64).sum::<f64>() / n).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xba5e);
    let free = y_obs.free_nodes();
    let baseline: Vec<Vec<u8>> = (0..outcomes.len())
        .map(|_| {
            let mut y = y_obs.as_slice().to_vec();
            for &i in &free {
                y[i as usize] = rng.random_bool(alaam_density) as u8;
            }
            y
        })
        .collect();
    let baseline_density =
        moments::mean(&baseline.iter().map(|y| y.iter().map(|&v| v as f64).sum::<f64>() / n).collect::<Vec<_>>());

    let kinds: &[DegreeKind] = if g.is_directed() {
        &[DegreeKind::In, DegreeKind::Out]
    } else {
        &[DegreeKind::Degree]
    };
    let observed_y = vec![y_obs.as_slice().to_vec()];
    let mut report = AttributeDegreeReport {
        alaam_density,
        baseline_density,
        alaam: Vec::new(),
        baseline: Vec::new(),
        observed: Vec::new(),
        welch_p: Vec::new(),
    };
    for &kind in kinds {
        let max = (0..g.node_count()).map(|i| kind.of(g, i)).max().unwrap_or(0);
        let cap = (max as f64 * 1.1).ceil() as usize;
        let a = distribution(g, &outcomes, kind, cap);
        let b = distribution(g, &baseline, kind, cap);
        let finite = |v: &[f64]| v.iter().copied().filter(|x| !x.is_nan()).collect::<Vec<_>>();
        report.welch_p.push(welch_p_value(&finite(&a.mean_degree), &finite(&b.mean_degree)));
        report.alaam.push(a);
        report.baseline.push(b);
        report.observed.push(distribution(g, &observed_y, kind, cap));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::InitialOutcome;

    fn small() -> (Graph, CovariateTable) {
        let g = Graph::from_edges(6, false, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 3)]).unwrap();
        (g, CovariateTable::empty(6))
    }

    #[test]
    fn fixed_outcome_gives_zero_variance_rows() {
        let (g, w) = small();
        let y = OutcomeVector::new(vec![1, 0, 1, 0, 0, 1]).with_fixed(vec![true; 6]).unwrap();
        let m = Model::new(vec![EffectSpec::Density, EffectSpec::Contagion], vec![0.0, 0.0]).unwrap();
        let mut cfg = SamplerConfig::desk_scale(6, 1);
        cfg.n_samples = 20;
        let check = degeneracy_check(&m, &g, &w, &y, &cfg).unwrap();
        assert!(check.rows().iter().all(|r| r.zero_variance && r.pass));
        let report = gof(&m, &g, &w, &y, &[EffectSpec::Activity], &cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.degenerate_rows().len(), 3);
        assert!(report.to_csv().contains("degenerate"));
    }

    #[test]
    fn wider_band_never_turns_pass_into_fail() {
        let (g, w) = small();
        let y = OutcomeVector::new(vec![1, 1, 1, 1, 1, 0]);
        let m = Model::new(vec![EffectSpec::Density], vec![-1.0]).unwrap();
        let mut cfg = SamplerConfig::desk_scale(6, 3);
        cfg.initial = InitialOutcome::AllZero;
        let check = degeneracy_check(&m, &g, &w, &y, &cfg).unwrap();
        for (a, b) in check.rows_at(0.95).iter().zip(check.rows_at(0.99)) {
            assert!(!a.pass || b.pass);
        }
    }

    #[test]
    fn welch_detects_shift() {
        let a: Vec<f64> = (0..50).map(|i| i as f64 % 7.0).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 5.0).collect();
        assert!(welch_p_value(&a, &b) < 1e-6);
        assert!(welch_p_value(&a, &a) > 0.99);
    }
}
