#![allow(dead_code)]

use proptest::prelude::*;
use std::sync::Arc;
use wgflow::geometry::{MassGrid, ParticleConfig};
use wgflow::model::{cosine_potential, porous_medium_nonlinearity, Interval, ProblemSpec};

pub fn cumulative(weights: &[f64], total: f64) -> Vec<f64> {
    let s: f64 = weights.iter().sum();
    let mut nodes = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0.0;
    nodes.push(0.0);
    for w in weights {
        acc += w / s * total;
        nodes.push(acc);
    }
    *nodes.last_mut().unwrap() = total;
    nodes
}

pub fn grid_from_weights(weights: &[f64], mass: f64) -> Arc<MassGrid> {
    Arc::new(MassGrid::from_nodes(cumulative(weights, mass)).unwrap())
}

pub fn config_from_weights(grid: &Arc<MassGrid>, domain: Interval, widths: &[f64]) -> ParticleConfig {
    let nodes = cumulative(widths, domain.length());
    let interior = nodes[1..widths.len()].iter().map(|x| domain.a + x).collect();
    ParticleConfig::new(grid.clone(), domain, interior).unwrap()
}

pub fn cosine_spec(m: f64, mass: f64) -> ProblemSpec {
    ProblemSpec::new(
        Interval::new(-1.0, 1.0).unwrap(),
        mass,
        Arc::new(porous_medium_nonlinearity(m).unwrap()),
        Arc::new(cosine_potential()),
    )
    .unwrap()
}

/// Cell weights for `K` cells with ratio at most 4.
pub fn weights(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.25f64..1.0, cells)
}

/// `(mass weights, width weights)` for the same random `K ∈ range`.
pub fn grid_and_widths(range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    range.prop_flat_map(|k| (weights(k), weights(k)))
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1.0)
}
