//! Immutable network representation.
//!
//! Adjacency is stored in compressed sparse row form with every neighbour
//! list sorted, so a tie query is a binary search over one row. Undirected
//! graphs store a single symmetric adjacency that serves as both the in- and
//! out-neighbour lists.

mod io;
mod stats;

pub use io::{load_graph, parse_edge_list, write_edge_list, LoadedGraph, NodeIdMap};
pub use stats::{descriptive_stats, outcome_degree_stats, DescriptiveStats, OutcomeDegreeStats};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// `pairs` must be sorted and deduplicated.
    fn from_sorted_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, b)| b).collect();
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    out: Csr,
    // None for undirected graphs: the in-adjacency aliases `out`.
    inn: Option<Csr>,
    mutual: Vec<u32>,
    arc_count: usize,
}

impl Graph {
    /// Builds a graph over nodes `0..n`. Self-loops are dropped and repeated
    /// ties collapse to one; for undirected graphs `(a, b)` and `(b, a)` are
    /// the same edge.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph(format!("{n} nodes exceeds u32 index range")));
        }
        let mut arcs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                continue;
            }
            let (a, b) = (a as u32, b as u32);
            arcs.push((a, b));
            if !directed {
                arcs.push((b, a));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();

        let out = Csr::from_sorted_pairs(n, &arcs);
        let (inn, arc_count) = if directed {
            let mut rev: Vec<(u32, u32)> = arcs.iter().map(|&(a, b)| (b, a)).collect();
            rev.sort_unstable();
            (Some(Csr::from_sorted_pairs(n, &rev)), arcs.len())
        } else {
            (None, arcs.len() / 2)
        };

        let mut g = Graph {
            directed,
            out,
            inn,
            mutual: Vec::new(),
            arc_count,
        };
        g.mutual = (0..n)
            .map(|i| {
                if directed {
                    sorted_intersection_count(g.out_neighbors(i), g.in_neighbors(i)) as u32
                } else {
                    0
                }
            })
            .collect();
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out.offsets.len() - 1
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Arcs for a directed graph, edges for an undirected one.
    pub fn edge_count(&self) -> usize {
        self.arc_count
    }

    #[inline]
    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        self.out.row(i)
    }

    #[inline]
    pub fn in_neighbors(&self, i: usize) -> &[u32] {
        match &self.inn {
            Some(inn) => inn.row(i),
            None => self.out.row(i),
        }
    }

    /// Neighbours of an undirected graph; out-neighbours of a directed one.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        self.out.row(i)
    }

    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.out.offsets[i + 1] - self.out.offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors(i).len()
    }

    /// Degree of an undirected node; in-degree plus out-degree when directed.
    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        if self.directed {
            self.in_degree(i) + self.out_degree(i)
        } else {
            self.out_degree(i)
        }
    }

    /// Number of `j` with both `i -> j` and `j -> i`. Zero for undirected graphs.
    #[inline]
    pub fn mutual_degree(&self, i: usize) -> usize {
        self.mutual[i] as usize
    }

    /// Is there a tie `i -> j` (or edge `{i, j}` when undirected)?
    #[inline]
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out.row(i).binary_search(&(j as u32)).is_ok()
    }

    /// Every arc `(i, j)` in row-major order; undirected edges appear once
    /// with `i < j`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.out_neighbors(i)
                .iter()
                .map(move |&j| (i, j as usize))
                .filter(move |&(i, j)| self.directed || i < j)
        })
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Digest of the adjacency structure, used for provenance records.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update([self.directed as u8]);
        h.update((self.node_count() as u64).to_le_bytes());
        for (i, j) in self.arcs() {
            h.update((i as u32).to_le_bytes());
            h.update((j as u32).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Size of the intersection of two sorted slices.
pub(crate) fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    let (mut p, mut q, mut count) = (0, 0, 0);
    while p < a.len() && q < b.len() {
        match a[p].cmp(&b[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                p += 1;
                q += 1;
            }
        }
    }
    count
}

/// Calls `f` for every element common to two sorted slices.
pub(crate) fn for_each_common(a: &[u32], b: &[u32], mut f: impl FnMut(u32)) {
    let (mut p, mut q) = (0, 0);
    while p < a.len() && q < b.len() {
        match a[p].cmp(&b[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                f(a[p]);
                p += 1;
                q += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, false, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn undirected_path_degrees() {
        let g = path3();
        assert_eq!((0..3).map(|i| g.degree(i)).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(g.in_neighbors(1), g.out_neighbors(1));
        assert!(g.has_arc(1, 0) && g.has_arc(0, 1) && !g.has_arc(0, 2));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn mutual_dyad() {
        let g = Graph::from_edges(2, true, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.mutual_degree(0), 1);
        assert_eq!(g.mutual_degree(1), 1);
        assert_eq!(g.out_degree(0), 1);
        assert_eq!(g.out_degree(1), 1);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn self_loops_and_duplicates_dropped() {
        let g = Graph::from_edges(3, true, [(0, 1), (0, 1), (2, 2), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_neighbors(2), &[] as &[u32]);
        let u = Graph::from_edges(2, false, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(u.edge_count(), 1);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Graph::from_edges(2, false, [(0, 2)]).is_err());
    }

    #[test]
    fn intersection_helpers() {
        assert_eq!(sorted_intersection_count(&[1, 3, 5, 7], &[3, 4, 5, 8]), 2);
        let mut seen = vec![];
        for_each_common(&[1, 3, 5], &[0, 1, 5], |x| seen.push(x));
        assert_eq!(seen, vec![1, 5]);
    }
}
