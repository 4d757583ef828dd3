//! Degeneracy check: is each observed statistic inside the 95% band of
//! outcomes simulated at the parameters? Compares a sensible model with
//! one whose Activity parameter pushes the chain to all ones.
//!
//! cargo run --release --example degeneracy_check -- [out_dir]

use alaam::diagnostics::degeneracy_check;
use alaam::fixtures::{bernoulli_outcome, heavy_tailed_graph};
use alaam::sampler::SamplerConfig;
use alaam::{CovariateTable, EffectSpec, Model};

fn main() -> alaam::Result<()> {
    let g = heavy_tailed_graph(1000, 3)?;
    let n = g.node_count();
    let w = CovariateTable::empty(n);
    let y = bernoulli_outcome(n, 0.25, 4);
    let effects = vec![EffectSpec::Density, EffectSpec::Activity, EffectSpec::Contagion];
    let p = y.density();
    for theta in [vec![(p / (1.0 - p)).ln(), 0.0, 0.0], vec![-1.1, 0.4, 0.0]] {
        let m = Model::new(effects.clone(), theta.clone())?;
        let check = degeneracy_check(&m, &g, &w, &y, &SamplerConfig::desk_scale(n, 5))?;
        println!("theta = {theta:?}");
        println!("{check}\n");
        if let Some(dir) = std::env::args().nth(1) {
            check.write_csvs(&dir)?;
        }
    }
    Ok(())
}
