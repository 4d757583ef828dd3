//! Equilibrium expectation estimate on a simulated outcome, next to the
//! exact MLE on a graph small enough to enumerate.

use alaam::estimation::{default_theta0, estimate_ee, EeConfig};
use alaam::fixtures::random_graph;
use alaam::oracle::exact_mle;
use alaam::sampler::{simulate, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

fn main() -> alaam::Result<()> {
    let n = 16;
    let g = random_graph(n, 0.25, false, 2)?;
    let w = CovariateTable::empty(n);
    let effects = vec![EffectSpec::Density, EffectSpec::Contagion];
    let truth = Model::new(effects.clone(), vec![-0.5, 0.3])?;
    let mut cfg = SamplerConfig::desk_scale(n, 9);
    cfg.n_samples = 1;
    cfg.store_outcomes = true;
    let y = OutcomeVector::new(simulate(&truth, &g, &w, &OutcomeVector::zeros(n), &cfg)?.outcomes().unwrap()[0].clone());

    let m0 = Model::new(effects.clone(), default_theta0(&effects, &y))?;
    let fit = estimate_ee(&m0, &g, &w, &y, &EeConfig::default())?;
    print!("{fit}");
    let z = alaam::effects::statistic_vector(&effects, &g, &w, y.as_slice())?;
    let mle = exact_mle(&z, &m0, &g, &w, &OutcomeVector::zeros(n))?;
    println!("exact MLE {:?}", mle.theta);
    Ok(())
}
