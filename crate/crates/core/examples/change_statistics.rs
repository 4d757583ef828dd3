//! Change statistics of a few effects on a small directed network, checked
//! against differences of the full statistics.

use alaam::effects::{statistic, BoundModel, DEFAULT_ALPHA};
use alaam::{CovariateTable, EffectSpec, Graph};

fn main() -> alaam::Result<()> {
    let g = Graph::from_edges(5, true, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 2), (4, 2)])?;
    let w = CovariateTable::empty(5);
    let effects = vec![
        EffectSpec::Density,
        EffectSpec::Sender,
        EffectSpec::Contagion,
        EffectSpec::Reciprocity,
        EffectSpec::GwReceiver(DEFAULT_ALPHA),
        EffectSpec::CyclicTriangleC1,
    ];
    let m = BoundModel::new(&effects, &g, &w)?;
    let mut y = vec![1, 0, 1, 0, 0];
    let mut delta = vec![0.0; m.len()];

    println!("{:<24}{:>8}{:>14}", "effect", "node", "change");
    for i in 0..5 {
        m.change_stats(&y, i, &mut delta);
        for (k, e) in effects.iter().enumerate() {
            y[i] = 1;
            let on = statistic(e, &g, &w, &y)?;
            y[i] = 0;
            let off = statistic(e, &g, &w, &y)?;
            assert!((on - off - delta[k]).abs() < 1e-12);
            println!("{:<24}{:>8}{:>14.6}", e.to_string(), i, delta[k]);
        }
        y[i] = [1, 0, 1, 0, 0][i];
    }
    println!("z(y) = {:?}", m.statistics(&y));
    Ok(())
}
