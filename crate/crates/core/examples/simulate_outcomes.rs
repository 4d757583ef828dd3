//! Draws outcomes from a fixed model on the heavy-tailed fixture and
//! writes the sampled statistics.
//!
//! cargo run --release --example simulate_outcomes -- [samples.csv]

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
    let mut cfg = SamplerConfig::desk_scale(n, 3);
    cfg.initial = InitialOutcome::Random(0.2);
    let batch = simulate(&m, &g, &w, &OutcomeVector::zeros(n), &cfg)?;
    println!("acceptance rate {:.3}", batch.acceptance_rate());
    for (k, name) in batch.names().iter().enumerate() {
        println!("{name:<24} mean {:>10.3} sd {:>8.3}", batch.means()[k], batch.std_devs()[k]);
    }
    if let Some(path) = std::env::args().nth(1) {
        batch.write_csv(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
