//! Descriptive statistics of a network, and of the outcome on it.
//!
//! cargo run --release --example descriptive_stats -- [edges.txt [outcome.csv]]

use alaam::fixtures::{bernoulli_outcome, heavy_tailed_graph};
use alaam::graph::{descriptive_stats, load_graph, outcome_degree_stats};
use alaam::outcome::{load_outcome_by_id, MissingPolicy};

fn main() -> alaam::Result<()> {
    let mut args = std::env::args().skip(1);
    let (g, y) = match args.next() {
        Some(path) => {
            let loaded = load_graph(&path, false)?;
            let y = match args.next() {
                Some(p) => load_outcome_by_id(p, "outcome", &loaded.ids, MissingPolicy::FixZero)?,
                None => bernoulli_outcome(loaded.graph.node_count(), 0.2, 1),
            };
            (loaded.graph, y)
        }
        None => {
            let g = heavy_tailed_graph(5000, 1)?;
            let y = bernoulli_outcome(g.node_count(), 0.2, 1);
            (g, y)
        }
    };
    println!("{}", descriptive_stats(&g));
    println!("{}", outcome_degree_stats(&g, &y));
    Ok(())
}
