use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::Graph;
use crate::error::{Error, Result};

/// Maps the identifiers found in an edge list onto dense node indices,
/// in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeIdMap {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    /// Identity map `0..n` named by the decimal index.
    pub fn identity(n: usize) -> Self {
        let mut m = NodeIdMap::default();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    /// Writes `index<TAB>identifier` lines.
    pub fn write(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        (|| -> std::io::Result<()> {
            writeln!(w, "index\tid")?;
            for (i, name) in self.names.iter().enumerate() {
                writeln!(w, "{i}\t{name}")?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: NodeIdMap,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

pub fn load_graph(path: impl AsRef<Path>, directed: bool) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(f), path, directed)
}

/// Parses a whitespace-separated edge list. `#` starts a comment; blank
/// lines are ignored. `origin` is only used in error messages.
pub fn parse_edge_list<R: BufRead>(reader: R, origin: &Path, directed: bool) -> Result<LoadedGraph> {
    let mut ids = NodeIdMap::default();
    let mut edges = Vec::new();
    let mut self_loops = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                path: origin.to_owned(),
                line: lineno + 1,
                message: format!("expected two node identifiers, found `{content}`"),
            });
        };
        let (a, b) = (ids.intern(a), ids.intern(b));
        if a == b {
            self_loops += 1;
            continue;
        }
        edges.push((a, b));
    }

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if self_loops > 0 {
        warn!("{}: dropped {self_loops} self-loop(s)", origin.display());
    }
    let raw = edges.len();
    let graph = Graph::from_edges(ids.len(), directed, edges)?;
    let duplicates_collapsed = raw - graph.edge_count();
    Ok(LoadedGraph {
        graph,
        ids,
        self_loops_dropped: self_loops,
        duplicates_collapsed,
    })
}

/// Writes the graph as an edge list using the identifiers in `ids`.
pub fn write_edge_list(g: &Graph, ids: &NodeIdMap, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    (|| -> std::io::Result<()> {
        writeln!(
            w,
            "# {} {} nodes, {} {}",
            if g.is_directed() { "directed" } else { "undirected" },
            g.node_count(),
            g.edge_count(),
            if g.is_directed() { "arcs" } else { "edges" }
        )?;
        for (i, j) in g.arcs() {
            writeln!(w, "{} {}", ids.name(i), ids.name(j))?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}
