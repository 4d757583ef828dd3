//! Closed-form statistics.
//!
//! These enumerate configurations directly (over arcs, dyads and triads)
//! rather than summing change statistics, so they serve as the reference
//! the incremental sampler is resynchronised against.

use super::change::ColumnValues;
use super::{BoundModel, EffectSpec};
use crate::covariates::CovariateTable;
use crate::error::{Error, Result};
use crate::graph::{for_each_common, Graph};

fn sum_over_ones(y: &[u8], f: impl Fn(usize) -> f64) -> f64 {
    y.iter()
        .enumerate()
        .filter(|(_, &v)| v == 1)
        .map(|(i, _)| f(i))
        .sum()
}

fn choose(d: usize, k: usize) -> f64 {
    match k {
        2 => (d * d.saturating_sub(1) / 2) as f64,
        3 if d >= 3 => (d * (d - 1) * (d - 2) / 6) as f64,
        _ => 0.0,
    }
}

/// The statistic `z_e(y)`.
pub fn statistic(e: &EffectSpec, g: &Graph, w: &CovariateTable, y: &[u8]) -> Result<f64> {
    e.validate(g, w)?;
    if y.len() != g.node_count() {
        return Err(Error::Outcome(format!(
            "outcome has {} entries for a {}-node graph",
            y.len(),
            g.node_count()
        )));
    }
    let col = ColumnValues::resolve(e, w)?;
    Ok(closed_form(e, g, &col, y))
}

pub(crate) fn closed_form(e: &EffectSpec, g: &Graph, col: &ColumnValues<'_>, y: &[u8]) -> f64 {
    use EffectSpec::*;
    let on = |i: usize| y[i] == 1;
    match e {
        Density => y.iter().map(|&v| v as f64).sum(),
        Activity => sum_over_ones(y, |i| g.degree(i) as f64),
        GwActivity(a) => sum_over_ones(y, |i| (-a * g.degree(i) as f64).exp()),
        Sender => sum_over_ones(y, |i| g.out_degree(i) as f64),
        Receiver => sum_over_ones(y, |i| g.in_degree(i) as f64),
        GwSender(a) => sum_over_ones(y, |i| (-a * g.out_degree(i) as f64).exp()),
        GwReceiver(a) => sum_over_ones(y, |i| (-a * g.in_degree(i) as f64).exp()),
        Contagion => g.arcs().filter(|&(i, j)| on(i) && on(j)).count() as f64,
        Reciprocity => g
            .arcs()
            .filter(|&(i, j)| g.has_arc(j, i) && on(i))
            .count() as f64,
        ContagionReciprocity => g
            .arcs()
            .filter(|&(i, j)| i < j && on(i) && on(j) && g.has_arc(j, i))
            .count() as f64,
        EgoInTwoStar => sum_over_ones(y, |i| choose(g.in_degree(i), 2)),
        EgoOutTwoStar => sum_over_ones(y, |i| choose(g.out_degree(i), 2)),
        EgoInThreeStar => sum_over_ones(y, |i| choose(g.in_degree(i), 3)),
        EgoOutThreeStar => sum_over_ones(y, |i| choose(g.out_degree(i), 3)),
        MixedTwoStar => {
            // Pairs of arcs j -> i -> k with j != k, enumerated from the second arc.
            let mut total = 0usize;
            for (i, k) in g.arcs().filter(|&(i, _)| on(i)) {
                total += g.in_neighbors(i).iter().filter(|&&j| j as usize != k).count();
            }
            total as f64
        }
        MixedTwoStarSource => {
            let mut total = 0usize;
            for (v, k) in g.arcs() {
                total += g
                    .in_neighbors(v)
                    .iter()
                    .filter(|&&i| i as usize != k && on(i as usize))
                    .count();
            }
            total as f64
        }
        MixedTwoStarSink => {
            let mut total = 0usize;
            for (k, v) in g.arcs() {
                total += g
                    .out_neighbors(v)
                    .iter()
                    .filter(|&&i| i as usize != k && on(i as usize))
                    .count();
            }
            total as f64
        }
        // The triad effects below are enumerated from the arc j -> k that
        // does not touch the attribute node i.
        TransitiveTriangleT1 => triad_sum(g, |j, k, add| {
            for_each_common(g.out_neighbors(j), g.in_neighbors(k), |i| add(on(i as usize)))
        }),
        TransitiveTriangleD1 => triad_sum(g, |j, k, add| {
            for_each_common(g.in_neighbors(j), g.in_neighbors(k), |i| add(on(i as usize)))
        }),
        TransitiveTriangleU1 => triad_sum(g, |j, k, add| {
            for_each_common(g.out_neighbors(j), g.out_neighbors(k), |i| add(on(i as usize)))
        }),
        CyclicTriangleC1 => triad_sum(g, |j, k, add| {
            for_each_common(g.out_neighbors(k), g.in_neighbors(j), |i| add(on(i as usize)))
        }),
        TransitiveTriangleT3 => triad_sum(g, |a, c, add| {
            if on(a) && on(c) {
                for_each_common(g.out_neighbors(a), g.in_neighbors(c), |b| add(on(b as usize)))
            }
        }),
        CyclicTriangleC3 => triad_sum(g, |a, b, add| {
            // Each cycle a -> b -> c -> a is counted from its smallest node.
            if on(a) && on(b) && a < b {
                for_each_common(g.out_neighbors(b), g.in_neighbors(a), |c| {
                    add(c as usize > a && on(c as usize))
                })
            }
        }),
        AlterInTwoStar2 => (0..g.node_count())
            .map(|v| choose(g.in_neighbors(v).iter().filter(|&&k| on(k as usize)).count(), 2))
            .sum(),
        AlterOutTwoStar2 => (0..g.node_count())
            .map(|v| choose(g.out_neighbors(v).iter().filter(|&&k| on(k as usize)).count(), 2))
            .sum(),
        Covariate(_) => {
            let ColumnValues::Real(w) = col else { unreachable!() };
            sum_over_ones(y, |i| w[i])
        }
        SenderMatch(_) | ReceiverMatch(_) | ReciprocityMatch(_) => {
            let ColumnValues::Codes(c) = col else { unreachable!() };
            g.arcs()
                .filter(|&(i, j)| c[i] == c[j])
                .filter(|&(i, j)| match e {
                    SenderMatch(_) => on(i),
                    ReceiverMatch(_) => on(j),
                    _ => on(i) && g.has_arc(j, i),
                })
                .count() as f64
        }
    }
}

fn triad_sum(g: &Graph, mut visit: impl FnMut(usize, usize, &mut dyn FnMut(bool))) -> f64 {
    let mut total = 0usize;
    let mut add = |hit: bool| total += hit as usize;
    for (j, k) in g.arcs() {
        visit(j, k, &mut add);
    }
    total as f64
}

/// All statistics of a model's effects, built up by adding the attribute
/// nodes one at a time in index order and summing their change statistics.
pub fn statistic_vector(effects: &[EffectSpec], g: &Graph, w: &CovariateTable, y: &[u8]) -> Result<Vec<f64>> {
    let bound = BoundModel::new(effects, g, w)?;
    if y.len() != g.node_count() {
        return Err(Error::Outcome(format!(
            "outcome has {} entries for a {}-node graph",
            y.len(),
            g.node_count()
        )));
    }
    Ok(bound.build_up(y, (0..y.len()).filter(|&i| y[i] == 1)))
}
