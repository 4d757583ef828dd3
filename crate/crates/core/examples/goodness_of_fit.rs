//! Goodness of fit of a fitted model against the default statistic suite.

use alaam::diagnostics::gof;
use alaam::effects::{default_gof_suite, DEFAULT_ALPHA};
use alaam::fixtures::heavy_tailed_graph;
use alaam::sampler::{simulate, InitialOutcome, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

fn main() -> alaam::Result<()> {
    let g = heavy_tailed_graph(1000, 2)?;
    let n = g.node_count();
    let w = CovariateTable::empty(n);
    let m = Model::new(
        vec![EffectSpec::Density, EffectSpec::GwActivity(DEFAULT_ALPHA), EffectSpec::Contagion],
        vec![-1.3, 1.7, 0.01],
    )?;
    let mut cfg = SamplerConfig::desk_scale(n, 1);
    cfg.initial = InitialOutcome::Random(0.2);
    cfg.n_samples = 1;
    cfg.store_outcomes = true;
    let y = OutcomeVector::new(simulate(&m, &g, &w, &OutcomeVector::zeros(n), &cfg)?.outcomes().unwrap()[0].clone());

    let mut cfg = SamplerConfig::desk_scale(n, 2);
    cfg.n_samples = 1000;
    let report = gof(&m, &g, &w, &y, &default_gof_suite(false), &cfg)?;
    println!("{report}");
    println!("all |t| < 2: {}", report.all_within(2.0));
    Ok(())
}
