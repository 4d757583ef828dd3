//! Exact distribution of a tiny model by enumeration, compared with MCMC,
//! and the exact maximum likelihood estimate.

use alaam::fixtures::random_graph;
use alaam::oracle::{enumerate, exact_mle};
use alaam::sampler::{simulate, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

fn main() -> alaam::Result<()> {
    let g = random_graph(12, 0.3, false, 4)?;
    let w = CovariateTable::empty(12);
    let m = Model::new(vec![EffectSpec::Density, EffectSpec::Contagion], vec![-0.8, 0.4])?;

    let exact = enumerate(&m, &g, &w)?;
    println!("{} configurations, log kappa = {:.6}", exact.configurations(), exact.log_kappa);

    let mut cfg = SamplerConfig::desk_scale(12, 7);
    cfg.n_samples = 20_000;
    cfg.interval = 24;
    let batch = simulate(&m, &g, &w, &OutcomeVector::zeros(12), &cfg)?;
    for (k, name) in m.names().iter().enumerate() {
        println!(
            "{name:<12} exact mean {:>8.4}  mcmc mean {:>8.4}  exact sd {:>7.4}",
            exact.mean[k],
            batch.means()[k],
            exact.covariance[(k, k)].sqrt()
        );
    }

    let y = OutcomeVector::new(vec![1, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0]);
    let z = alaam::effects::statistic_vector(m.effects(), &g, &w, y.as_slice())?;
    let mle = exact_mle(&z, &m, &g, &w, &OutcomeVector::zeros(12))?;
    println!("z_obs = {z:?}");
    println!("exact MLE {:?} (se {:?}) after {} iterations", mle.theta, mle.std_err, mle.iterations);
    Ok(())
}
