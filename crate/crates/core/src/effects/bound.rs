use super::change::{dynamic_delta, ego_delta, ColumnValues};
use super::statistic::closed_form;
use super::EffectSpec;
use crate::covariates::CovariateTable;
use crate::error::Result;
use crate::graph::Graph;

/// Effects bound to a graph and covariate table.
///
/// Change statistics that do not depend on other outcomes are tabulated
/// once per node (node-major), so only the outcome-dependent effects scan
/// neighbourhoods on each call.
pub struct BoundModel<'a> {
    graph: &'a Graph,
    effects: Vec<EffectSpec>,
    columns: Vec<ColumnValues<'a>>,
    table: Vec<f64>,
    dynamic: Vec<usize>,
}

impl<'a> BoundModel<'a> {
    pub fn new(effects: &[EffectSpec], graph: &'a Graph, w: &'a CovariateTable) -> Result<Self> {
        for e in effects {
            e.validate(graph, w)?;
        }
        let columns = effects
            .iter()
            .map(|e| ColumnValues::resolve(e, w))
            .collect::<Result<Vec<_>>>()?;
        let p = effects.len();
        let n = graph.node_count();
        let mut table = vec![0.0; n * p];
        let mut dynamic = Vec::new();
        for (k, (e, col)) in effects.iter().zip(&columns).enumerate() {
            if ego_delta(e, graph, col, 0).is_none() {
                dynamic.push(k);
                continue;
            }
            for i in 0..n {
                table[i * p + k] = ego_delta(e, graph, col, i).expect("static kernel");
            }
        }
        Ok(BoundModel {
            graph,
            effects: effects.to_vec(),
            columns,
            table,
            dynamic,
        })
    }

    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn effects(&self) -> &[EffectSpec] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.effects.iter().map(|e| e.to_string()).collect()
    }

    /// True if no change statistic depends on the outcomes of other nodes.
    pub fn is_static(&self) -> bool {
        self.dynamic.is_empty()
    }

    /// Writes the change statistics of node `i` (with `y_i` treated as 0)
    /// into `out`.
    #[inline]
    pub fn change_stats(&self, y: &[u8], i: usize, out: &mut [f64]) {
        let p = self.effects.len();
        out.copy_from_slice(&self.table[i * p..(i + 1) * p]);
        for &k in &self.dynamic {
            out[k] = dynamic_delta(&self.effects[k], self.graph, y, i);
        }
    }

    /// Statistics by closed-form enumeration.
    pub fn statistics(&self, y: &[u8]) -> Vec<f64> {
        self.effects
            .iter()
            .zip(&self.columns)
            .map(|(e, col)| closed_form(e, self.graph, col, y))
            .collect()
    }

    /// Statistics obtained by switching on `nodes` in order, starting from
    /// the all-zero outcome, and summing their change statistics.
    pub(crate) fn build_up(&self, y: &[u8], nodes: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let p = self.effects.len();
        let mut z = vec![0.0; p];
        let mut delta = vec![0.0; p];
        let mut cur = vec![0u8; y.len()];
        for i in nodes {
            self.change_stats(&cur, i, &mut delta);
            for (zk, dk) in z.iter_mut().zip(&delta) {
                *zk += dk;
            }
            cur[i] = 1;
        }
        debug_assert_eq!(cur, y);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_and_dynamic_kernels_agree_with_closed_form() {
        let g = Graph::from_edges(5, false, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let w = CovariateTable::empty(5);
        let effects = [EffectSpec::Density, EffectSpec::Contagion, EffectSpec::GwActivity(0.7)];
        let m = BoundModel::new(&effects, &g, &w).unwrap();
        assert!(!m.is_static());
        let y = [1u8, 1, 0, 1, 1];
        let built = m.build_up(&y, [4, 0, 3, 1]);
        let closed = m.statistics(&y);
        for (a, b) in built.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(closed[1], 2.0);
    }
}
