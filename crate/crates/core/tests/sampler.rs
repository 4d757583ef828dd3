mod common;

use alaam::effects::DEFAULT_ALPHA;
use alaam::fixtures::random_graph;
use alaam::moments::logistic;
use alaam::oracle::enumerate;
use alaam::sampler::{simulate, InitialOutcome, SamplerConfig};
use alaam::{CovariateTable, EffectSpec, Model, OutcomeVector};

#[test]
fn same_seed_same_samples() {
    let g = random_graph(40, 0.1, false, 3).unwrap();
    let w = CovariateTable::empty(40);
    let m = Model::new(vec![EffectSpec::Density, EffectSpec::Contagion], vec![-0.4, 0.2]).unwrap();
    let mut cfg = SamplerConfig::desk_scale(40, 17);
    cfg.initial = InitialOutcome::Random(0.3);
    let y = OutcomeVector::zeros(40);
    let a = simulate(&m, &g, &w, &y, &cfg).unwrap();
    let b = simulate(&m, &g, &w, &y, &cfg).unwrap();
    assert_eq!(a.rows(), b.rows());
    assert_eq!(a.to_csv(), b.to_csv());
    cfg.seed = 18;
    let c = simulate(&m, &g, &w, &y, &cfg).unwrap();
    assert_ne!(a.rows(), c.rows());
    assert_eq!(c.provenance.seed, 18);
}

#[test]
fn zero_density_parameter_accepts_everything() {
    let g = random_graph(20, 0.2, false, 1).unwrap();
    let w = CovariateTable::empty(20);
    let m = Model::new(vec![EffectSpec::Density], vec![0.0]).unwrap();
    let batch = simulate(&m, &g, &w, &OutcomeVector::zeros(20), &SamplerConfig::desk_scale(20, 1)).unwrap();
    assert_eq!(batch.acceptance_rate(), 1.0);
}

#[test]
fn density_only_marginal_is_logistic() {
    let n = 300;
    let g = random_graph(n, 0.02, false, 2).unwrap();
    let w = CovariateTable::empty(n);
    let theta = 0.7;
    let m = Model::new(vec![EffectSpec::Density], vec![theta]).unwrap();
    let mut cfg = SamplerConfig::desk_scale(n, 4);
    cfg.n_samples = 400;
    cfg.interval = 2 * n as u64;
    let batch = simulate(&m, &g, &w, &OutcomeVector::zeros(n), &cfg).unwrap();
    let dens: Vec<f64> = batch.column(0).iter().map(|z| z / n as f64).collect();
    let mean = alaam::moments::mean(&dens);
    let se = alaam::moments::std_dev(&dens) / (dens.len() as f64).sqrt();
    assert!((mean - logistic(theta)).abs() < 3.0 * se + 1e-3, "{mean} vs {}", logistic(theta));
}

#[test]
fn fixed_nodes_never_change() {
    let n = 30;
    let g = random_graph(n, 0.15, false, 5).unwrap();
    let w = CovariateTable::empty(n);
    let m = Model::new(vec![EffectSpec::Density], vec![2.0]).unwrap();
    let fixed: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
    let y = OutcomeVector::zeros(n).with_fixed(fixed).unwrap();
    let mut cfg = SamplerConfig::desk_scale(n, 6);
    cfg.store_outcomes = true;
    cfg.n_samples = 20;
    let batch = simulate(&m, &g, &w, &y, &cfg).unwrap();
    for out in batch.outcomes().unwrap() {
        for i in (0..n).step_by(3) {
            assert_eq!(out[i], 0);
        }
    }
}

#[test]
fn matches_exact_moments_on_small_graph() {
    let n = 9;
    let g = random_graph(n, 0.35, false, 11).unwrap();
    let w = CovariateTable::empty(n);
    let m = Model::new(
        vec![EffectSpec::Density, EffectSpec::GwActivity(DEFAULT_ALPHA), EffectSpec::Contagion],
        vec![-0.3, 0.5, 0.2],
    )
    .unwrap();
    let exact = enumerate(&m, &g, &w).unwrap();
    let mut cfg = SamplerConfig::desk_scale(n, 21);
    cfg.n_samples = 5000;
    cfg.interval = 3 * n as u64;
    let batch = simulate(&m, &g, &w, &OutcomeVector::zeros(n), &cfg).unwrap();
    for k in 0..3 {
        let col = batch.column(k);
        let se = alaam::moments::batch_means_se(&col, 50);
        assert!(
            (alaam::moments::mean(&col) - exact.mean[k]).abs() < 4.0 * se,
            "effect {k}: {} vs {} (se {se})",
            alaam::moments::mean(&col),
            exact.mean[k]
        );
    }
}
