//! Writes the heavy-tailed test network and a Bernoulli outcome to disk,
//! in the formats the `alaam` binary reads.
//!
//! cargo run --release --example generate_fixture -- out_dir [n] [seed]

use std::fmt::Write as _;
use std::path::PathBuf;

use alaam::fixtures::{bernoulli_outcome, heavy_tailed_graph};
use alaam::graph::{write_edge_list, NodeIdMap};

fn main() -> alaam::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fixture".into()));
    let n: usize = args.next().map_or(5000, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    std::fs::create_dir_all(&dir).map_err(|e| alaam::Error::Io { path: dir.clone(), source: e })?;

    let g = heavy_tailed_graph(n, seed)?;
    write_edge_list(&g, &NodeIdMap::identity(n), &dir.join("edges.txt"))?;
    let y = bernoulli_outcome(n, 0.2, seed);
    let mut s = String::from("id,outcome\n");
    for (i, v) in y.as_slice().iter().enumerate() {
        writeln!(s, "{i},{v}").unwrap();
    }
    let path = dir.join("outcome.csv");
    std::fs::write(&path, s).map_err(|e| alaam::Error::Io { path, source: e })?;
    println!(
        "{} nodes, {} edges, max degree {} -> {}",
        g.node_count(),
        g.edge_count(),
        g.max_degree(),
        dir.display()
    );
    Ok(())
}
