//! Simulates an outcome from a GWActivity truth on the heavy-tailed fixture
//! and fits it by stochastic approximation with the GWActivity and the
//! Activity parameterisation.
//!
//! cargo run --release --example estimate_sa

use std::time::Instant;

use alaam::effects::DEFAULT_ALPHA;
use alaam::estimation::{default_theta0, estimate_sa, SaConfig};
use alaam::fixtures::heavy_tailed_graph;
use alaam::sampler::{simulate, InitialOutcome, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

fn main() -> alaam::Result<()> {
    env_logger::init();
    let g = heavy_tailed_graph(5000, 1)?;
    let n = g.node_count();
    let w = CovariateTable::empty(n);
    let truth_theta: Vec<f64> = std::env::args()
        .nth(1)
        .map(|s| s.split(',').map(|v| v.parse().expect("number")).collect())
        .unwrap_or(vec![-1.287, 1.712, 0.002]);
    let truth = Model::new(
        vec![EffectSpec::Density, EffectSpec::GwActivity(DEFAULT_ALPHA), EffectSpec::Contagion],
        truth_theta,
    )?;
    let mut cfg = SamplerConfig::desk_scale(n, 5);
    cfg.initial = InitialOutcome::Random(0.2);
    cfg.n_samples = 1;
    cfg.store_outcomes = true;
    let batch = simulate(&truth, &g, &w, &OutcomeVector::zeros(n), &cfg)?;
    let y = OutcomeVector::new(batch.outcomes().expect("stored")[0].clone());
    println!("simulated outcome: {} of {n} nodes, z = {:?}", y.ones(), batch.rows()[0]);

    for middle in [EffectSpec::GwActivity(DEFAULT_ALPHA), EffectSpec::Activity] {
        let effects = vec![EffectSpec::Density, middle.clone(), EffectSpec::Contagion];
        let theta0 = default_theta0(&effects, &y);
        let m0 = Model::new(effects, theta0)?;
        let start = Instant::now();
        let fit = estimate_sa(&m0, &g, &w, &y, &SaConfig::default())?;
        println!("== {middle} parameterisation ({:.1?})", start.elapsed());
        print!("{fit}");
    }
    Ok(())
}
