//! Change-statistic kernels.

use super::EffectSpec;
use crate::covariates::CovariateTable;
use crate::error::{Error, Result};
use crate::graph::{for_each_common, sorted_intersection_count, Graph};

/// Covariate data an effect needs, looked up once.
pub(crate) enum ColumnValues<'a> {
    None,
    Real(&'a [f64]),
    Codes(Vec<u32>),
}

impl<'a> ColumnValues<'a> {
    pub(crate) fn resolve(e: &EffectSpec, w: &'a CovariateTable) -> Result<Self> {
        Ok(match e {
            EffectSpec::Covariate(c) => ColumnValues::Real(w.continuous(c)?),
            EffectSpec::SenderMatch(c) | EffectSpec::ReceiverMatch(c) | EffectSpec::ReciprocityMatch(c) => {
                ColumnValues::Codes(w.categories(c)?)
            }
            _ => ColumnValues::None,
        })
    }

    fn real(&self) -> &[f64] {
        match self {
            ColumnValues::Real(v) => v,
            _ => unreachable!("covariate effect resolved without values"),
        }
    }

    fn codes(&self) -> &[u32] {
        match self {
            ColumnValues::Codes(v) => v,
            _ => unreachable!("match effect resolved without codes"),
        }
    }
}

#[inline]
fn choose2(d: usize) -> f64 {
    (d * d.saturating_sub(1) / 2) as f64
}

#[inline]
fn choose3(d: usize) -> f64 {
    if d < 3 {
        0.0
    } else {
        (d * (d - 1) * (d - 2) / 6) as f64
    }
}

/// Change statistic of effects whose delta does not depend on the outcomes
/// of other nodes. `None` for the outcome-dependent effects.
pub(crate) fn ego_delta(e: &EffectSpec, g: &Graph, col: &ColumnValues<'_>, i: usize) -> Option<f64> {
    use EffectSpec::*;
    let v = match e {
        Density => 1.0,
        Activity => g.degree(i) as f64,
        GwActivity(a) => (-a * g.degree(i) as f64).exp(),
        Sender => g.out_degree(i) as f64,
        Receiver => g.in_degree(i) as f64,
        GwSender(a) => (-a * g.out_degree(i) as f64).exp(),
        GwReceiver(a) => (-a * g.in_degree(i) as f64).exp(),
        Reciprocity => g.mutual_degree(i) as f64,
        EgoInTwoStar => choose2(g.in_degree(i)),
        EgoOutTwoStar => choose2(g.out_degree(i)),
        EgoInThreeStar => choose3(g.in_degree(i)),
        EgoOutThreeStar => choose3(g.out_degree(i)),
        MixedTwoStar => (g.in_degree(i) * g.out_degree(i) - g.mutual_degree(i)) as f64,
        MixedTwoStarSource => g
            .out_neighbors(i)
            .iter()
            .map(|&v| g.out_degree(v as usize) - g.has_arc(v as usize, i) as usize)
            .sum::<usize>() as f64,
        MixedTwoStarSink => g
            .in_neighbors(i)
            .iter()
            .map(|&v| g.in_degree(v as usize) - g.has_arc(i, v as usize) as usize)
            .sum::<usize>() as f64,
        TransitiveTriangleT1 => sum_intersections(g, g.in_neighbors(i), g.out_neighbors(i)),
        TransitiveTriangleD1 => sum_intersections(g, g.out_neighbors(i), g.out_neighbors(i)),
        TransitiveTriangleU1 => sum_intersections(g, g.in_neighbors(i), g.in_neighbors(i)),
        CyclicTriangleC1 => sum_intersections(g, g.out_neighbors(i), g.in_neighbors(i)),
        Covariate(_) => col.real()[i],
        SenderMatch(_) => {
            let c = col.codes();
            g.out_neighbors(i).iter().filter(|&&j| c[j as usize] == c[i]).count() as f64
        }
        ReceiverMatch(_) => {
            let c = col.codes();
            g.in_neighbors(i).iter().filter(|&&j| c[j as usize] == c[i]).count() as f64
        }
        ReciprocityMatch(_) => {
            let c = col.codes();
            let mut count = 0usize;
            for_each_common(g.out_neighbors(i), g.in_neighbors(i), |j| {
                count += (c[j as usize] == c[i]) as usize;
            });
            count as f64
        }
        Contagion | ContagionReciprocity | TransitiveTriangleT3 | CyclicTriangleC3 | AlterInTwoStar2
        | AlterOutTwoStar2 => return None,
    };
    Some(v)
}

/// `sum_{j in first} |out(j) ∩ second|`.
fn sum_intersections(g: &Graph, first: &[u32], second: &[u32]) -> f64 {
    first
        .iter()
        .map(|&j| sorted_intersection_count(g.out_neighbors(j as usize), second))
        .sum::<usize>() as f64
}

#[inline]
fn count_ones(y: &[u8], nodes: &[u32]) -> usize {
    nodes.iter().map(|&j| y[j as usize] as usize).sum()
}

/// Change statistic of the outcome-dependent effects. `y[i]` is ignored.
#[inline]
pub(crate) fn dynamic_delta(e: &EffectSpec, g: &Graph, y: &[u8], i: usize) -> f64 {
    use EffectSpec::*;
    match e {
        Contagion => {
            if g.is_directed() {
                (count_ones(y, g.out_neighbors(i)) + count_ones(y, g.in_neighbors(i))) as f64
            } else {
                count_ones(y, g.neighbors(i)) as f64
            }
        }
        ContagionReciprocity => {
            let mut count = 0usize;
            for_each_common(g.out_neighbors(i), g.in_neighbors(i), |j| count += y[j as usize] as usize);
            count as f64
        }
        TransitiveTriangleT3 => {
            let out_i = g.out_neighbors(i);
            let in_i = g.in_neighbors(i);
            let mut count = 0usize;
            // i as source: i -> b -> c, i -> c.
            for &b in out_i.iter().filter(|&&b| y[b as usize] == 1) {
                for_each_common(g.out_neighbors(b as usize), out_i, |c| count += y[c as usize] as usize);
            }
            // i as broker: a -> i -> c, a -> c.
            for &a in in_i.iter().filter(|&&a| y[a as usize] == 1) {
                for_each_common(g.out_neighbors(a as usize), out_i, |c| count += y[c as usize] as usize);
            }
            // i as sink: a -> b -> i, a -> i.
            for &b in in_i.iter().filter(|&&b| y[b as usize] == 1) {
                for_each_common(g.in_neighbors(b as usize), in_i, |a| count += y[a as usize] as usize);
            }
            count as f64
        }
        CyclicTriangleC3 => {
            let in_i = g.in_neighbors(i);
            let mut count = 0usize;
            for &j in g.out_neighbors(i).iter().filter(|&&j| y[j as usize] == 1) {
                for_each_common(g.out_neighbors(j as usize), in_i, |k| count += y[k as usize] as usize);
            }
            count as f64
        }
        AlterInTwoStar2 => g
            .out_neighbors(i)
            .iter()
            .map(|&v| {
                let in_v = g.in_neighbors(v as usize);
                // i itself is always in in(v); it counts as 0.
                count_ones(y, in_v) - y[i] as usize
            })
            .sum::<usize>() as f64,
        AlterOutTwoStar2 => g
            .in_neighbors(i)
            .iter()
            .map(|&v| count_ones(y, g.out_neighbors(v as usize)) - y[i] as usize)
            .sum::<usize>() as f64,
        _ => unreachable!("{e} has a static change statistic"),
    }
}

/// `z_e(y with y_i = 1) - z_e(y with y_i = 0)`.
pub fn change_stat(e: &EffectSpec, g: &Graph, w: &CovariateTable, y: &[u8], i: usize) -> Result<f64> {
    e.validate(g, w)?;
    if i >= g.node_count() || y.len() != g.node_count() {
        return Err(Error::Outcome(format!(
            "node {i} / outcome length {} invalid for a {}-node graph",
            y.len(),
            g.node_count()
        )));
    }
    let col = ColumnValues::resolve(e, w)?;
    Ok(ego_delta(e, g, &col, i).unwrap_or_else(|| dynamic_delta(e, g, y, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::DEFAULT_ALPHA;

    fn empty(n: usize) -> CovariateTable {
        CovariateTable::empty(n)
    }

    #[test]
    fn gw_activity_closed_form() {
        // Star: centre degree 2, leaves degree 1; isolated node 3 degree 0.
        let g = Graph::from_edges(4, false, [(0, 1), (0, 2)]).unwrap();
        let w = empty(4);
        let y = [0u8; 4];
        let e = EffectSpec::GwActivity(DEFAULT_ALPHA);
        assert_eq!(change_stat(&e, &g, &w, &y, 3).unwrap(), 1.0);
        assert!((change_stat(&e, &g, &w, &y, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((change_stat(&e, &g, &w, &y, 0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn activity_is_degree() {
        let g = Graph::from_edges(8, false, (1..8).map(|j| (0, j))).unwrap();
        assert_eq!(change_stat(&EffectSpec::Activity, &g, &empty(8), &[0; 8], 0).unwrap(), 7.0);
    }

    #[test]
    fn contagion_triangle() {
        let g = Graph::from_edges(3, false, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let y = [0u8, 1, 1];
        assert_eq!(change_stat(&EffectSpec::Contagion, &g, &empty(3), &y, 0).unwrap(), 2.0);
    }

    #[test]
    fn ego_in_two_star() {
        let g = Graph::from_edges(5, true, (1..5).map(|j| (j, 0))).unwrap();
        assert_eq!(change_stat(&EffectSpec::EgoInTwoStar, &g, &empty(5), &[0; 5], 0).unwrap(), 6.0);
        assert_eq!(change_stat(&EffectSpec::EgoInThreeStar, &g, &empty(5), &[0; 5], 0).unwrap(), 4.0);
    }

    #[test]
    fn transitive_triad_broker() {
        // 0 -> 1 -> 2 and bypass 0 -> 2: node 1 is the broker.
        let g = Graph::from_edges(3, true, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = empty(3);
        let y = [0u8; 3];
        assert_eq!(change_stat(&EffectSpec::TransitiveTriangleT1, &g, &w, &y, 1).unwrap(), 1.0);
        assert_eq!(change_stat(&EffectSpec::TransitiveTriangleT1, &g, &w, &y, 0).unwrap(), 0.0);
        assert_eq!(change_stat(&EffectSpec::TransitiveTriangleD1, &g, &w, &y, 0).unwrap(), 1.0);
        assert_eq!(change_stat(&EffectSpec::TransitiveTriangleU1, &g, &w, &y, 2).unwrap(), 1.0);
        let y = [1u8, 0, 1];
        assert_eq!(change_stat(&EffectSpec::TransitiveTriangleT3, &g, &w, &y, 1).unwrap(), 1.0);
    }

    #[test]
    fn mixed_two_star_excludes_reciprocated_path() {
        // 1 <-> 0 -> 2: paths through 0 are 1 -> 0 -> 2 only.
        let g = Graph::from_edges(3, true, [(0, 1), (1, 0), (0, 2)]).unwrap();
        assert_eq!(change_stat(&EffectSpec::MixedTwoStar, &g, &empty(3), &[0; 3], 0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_wrong_direction_and_missing_column() {
        let g = Graph::from_edges(2, false, [(0, 1)]).unwrap();
        assert!(change_stat(&EffectSpec::Sender, &g, &empty(2), &[0; 2], 0).is_err());
        assert!(change_stat(&EffectSpec::Covariate("age".into()), &g, &empty(2), &[0; 2], 0).is_err());
    }
}
