use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::{sorted_intersection_count, Graph};
use crate::outcome::OutcomeVector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub directed: bool,
    pub nodes: usize,
    pub ties: usize,
    pub giant_component: usize,
    pub mean_degree: f64,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
    pub density: f64,
    pub clustering: f64,
}

impl DescriptiveStats {
    pub fn to_csv(&self) -> String {
        format!(
            "directed,nodes,ties,giant_component,mean_degree,max_in_degree,max_out_degree,density,clustering\n\
             {},{},{},{},{},{},{},{},{}\n",
            self.directed,
            self.nodes,
            self.ties,
            self.giant_component,
            self.mean_degree,
            self.max_in_degree,
            self.max_out_degree,
            self.density,
            self.clustering
        )
    }
}

impl fmt::Display for DescriptiveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "directed: {}", self.directed)?;
        writeln!(f, "nodes: {}", self.nodes)?;
        writeln!(f, "ties: {}", self.ties)?;
        writeln!(f, "giant_component: {}", self.giant_component)?;
        writeln!(f, "mean_degree: {:.2}", self.mean_degree)?;
        writeln!(f, "max_in_degree: {}", self.max_in_degree)?;
        writeln!(f, "max_out_degree: {}", self.max_out_degree)?;
        writeln!(f, "density: {:.5}", self.density)?;
        write!(f, "clustering: {:.5}", self.clustering)
    }
}

/// Whole-network summary. Mean degree is ties per node for directed graphs
/// (mean out-degree) and twice the edge count per node otherwise. The giant
/// component uses weak connectivity and the clustering coefficient
/// (transitivity) is computed on the undirected skeleton.
pub fn descriptive_stats(g: &Graph) -> DescriptiveStats {
    let n = g.node_count();
    let ties = g.edge_count();
    let (mean_degree, density) = if g.is_directed() {
        (ties as f64 / n as f64, ties as f64 / (n as f64 * (n as f64 - 1.0)))
    } else {
        (
            2.0 * ties as f64 / n as f64,
            2.0 * ties as f64 / (n as f64 * (n as f64 - 1.0)),
        )
    };
    let density = if n < 2 { 0.0 } else { density };
    let skeleton = skeleton(g);
    DescriptiveStats {
        directed: g.is_directed(),
        nodes: n,
        ties,
        giant_component: giant_component_size(&skeleton),
        mean_degree,
        max_in_degree: (0..n).map(|i| g.in_degree(i)).max().unwrap_or(0),
        max_out_degree: (0..n).map(|i| g.out_degree(i)).max().unwrap_or(0),
        density,
        clustering: transitivity(&skeleton),
    }
}

fn skeleton(g: &Graph) -> Vec<Vec<u32>> {
    (0..g.node_count())
        .map(|i| {
            if !g.is_directed() {
                return g.neighbors(i).to_vec();
            }
            let mut row: Vec<u32> = g
                .out_neighbors(i)
                .iter()
                .chain(g.in_neighbors(i))
                .copied()
                .collect();
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect()
}

fn giant_component_size(adj: &[Vec<u32>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut best = 0;
    let mut queue = VecDeque::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &u in &adj[v] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u as usize);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn transitivity(adj: &[Vec<u32>]) -> f64 {
    // Each triangle is found once per edge (i, j) with i < j and common
    // neighbour k > j.
    let mut triangles = 0u64;
    let mut triples = 0u64;
    for (i, row) in adj.iter().enumerate() {
        let d = row.len() as u64;
        triples += d * d.saturating_sub(1) / 2;
        for &j in row.iter().filter(|&&j| j as usize > i) {
            let nj = &adj[j as usize];
            let hi_i = &row[row.partition_point(|&k| k <= j)..];
            let hi_j = &nj[nj.partition_point(|&k| k <= j)..];
            triangles += sorted_intersection_count(hi_i, hi_j) as u64;
        }
    }
    if triples == 0 {
        0.0
    } else {
        3.0 * triangles as f64 / triples as f64
    }
}

/// Degree summary of the nodes with and without the outcome attribute.
/// Means of an empty group are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDegreeStats {
    pub percent_ones: f64,
    pub ones: usize,
    pub zeros: usize,
    pub y0_mean_in_degree: Option<f64>,
    pub y0_mean_out_degree: Option<f64>,
    pub y1_mean_in_degree: Option<f64>,
    pub y1_mean_out_degree: Option<f64>,
}

impl OutcomeDegreeStats {
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), |x| x.to_string());
        format!(
            "percent_ones,ones,zeros,y0_mean_in_degree,y0_mean_out_degree,y1_mean_in_degree,y1_mean_out_degree\n\
             {},{},{},{},{},{},{}\n",
            self.percent_ones,
            self.ones,
            self.zeros,
            f(self.y0_mean_in_degree),
            f(self.y0_mean_out_degree),
            f(self.y1_mean_in_degree),
            f(self.y1_mean_out_degree)
        )
    }
}

impl fmt::Display for OutcomeDegreeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |x: Option<f64>| x.map_or_else(|| "undefined".to_owned(), |x| format!("{x:.2}"));
        writeln!(f, "percent_ones: {:.0}", self.percent_ones)?;
        writeln!(f, "y0_mean_in_degree: {}", v(self.y0_mean_in_degree))?;
        writeln!(f, "y0_mean_out_degree: {}", v(self.y0_mean_out_degree))?;
        writeln!(f, "y1_mean_in_degree: {}", v(self.y1_mean_in_degree))?;
        write!(f, "y1_mean_out_degree: {}", v(self.y1_mean_out_degree))
    }
}

pub fn outcome_degree_stats(g: &Graph, y: &OutcomeVector) -> OutcomeDegreeStats {
    let mut sums = [[0usize; 2]; 2]; // [group][in, out]
    let mut counts = [0usize; 2];
    for i in 0..g.node_count() {
        let group = y[i] as usize;
        counts[group] += 1;
        sums[group][0] += g.in_degree(i);
        sums[group][1] += g.out_degree(i);
    }
    let mean = |group: usize, k: usize| {
        (counts[group] > 0).then(|| sums[group][k] as f64 / counts[group] as f64)
    };
    OutcomeDegreeStats {
        percent_ones: 100.0 * counts[1] as f64 / g.node_count() as f64,
        ones: counts[1],
        zeros: counts[0],
        y0_mean_in_degree: mean(0, 0),
        y0_mean_out_degree: mean(0, 1),
        y1_mean_in_degree: mean(1, 0),
        y1_mean_out_degree: mean(1, 1),
    }
}
