//! Degree distribution of attribute nodes under a fitted model, against a
//! random assignment with the same attribute density.
//!
//! cargo run --release --example degree_distribution -- [out_dir]

use alaam::diagnostics::attribute_degree_gof;
use alaam::effects::DEFAULT_ALPHA;
use alaam::fixtures::heavy_tailed_graph;
use alaam::sampler::{simulate, InitialOutcome, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

fn main() -> alaam::Result<()> {
    let g = heavy_tailed_graph(2000, 1)?;
    let n = g.node_count();
    let w = CovariateTable::empty(n);
    let m = Model::new(
        vec![EffectSpec::Density, EffectSpec::GwActivity(DEFAULT_ALPHA), EffectSpec::Contagion],
        vec![-1.287, 1.712, 0.002],
    )?;
    let mut cfg = SamplerConfig::desk_scale(n, 8);
    cfg.initial = InitialOutcome::Random(0.2);
    cfg.n_samples = 1;
    cfg.store_outcomes = true;
    let y = OutcomeVector::new(simulate(&m, &g, &w, &OutcomeVector::zeros(n), &cfg)?.outcomes().unwrap()[0].clone());

    let report = attribute_degree_gof(&m, &g, &w, &y, &SamplerConfig::desk_scale(n, 9))?;
    println!("{report}");
    if let Some(dir) = std::env::args().nth(1) {
        report.write_csvs(&dir)?;
    }
    Ok(())
}
