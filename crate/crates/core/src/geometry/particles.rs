use crate::error::{Error, Result};
use crate::geometry::{assemble_w, MassGrid};
use crate::model::Interval;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Interior particle positions `a < x₁ < … < x_{K−1} < b` attached to a mass
/// grid; the endpoints `x₀ = a`, `x_K = b` are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    grid: Arc<MassGrid>,
    domain: Interval,
    interior: Vec<f64>,
}

/// Strict ordering `a < x₁ < … < x_{K−1} < b`, each gap exceeding `guard`.
/// Returns the first offending gap index (`k` for the gap `x_k − x_{k−1}`).
pub fn first_ordering_violation(domain: Interval, interior: &[f64], guard: f64) -> Option<usize> {
    let mut prev = domain.a;
    for (i, &x) in interior.iter().enumerate() {
        if !(x - prev > guard) {
            return Some(i + 1);
        }
        prev = x;
    }
    if !(domain.b - prev > guard) {
        return Some(interior.len() + 1);
    }
    None
}

impl ParticleConfig {
    pub fn new(grid: Arc<MassGrid>, domain: Interval, interior: Vec<f64>) -> Result<Self> {
        let expected = grid.cells() - 1;
        if interior.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: interior.len() });
        }
        if let Some(index) = first_ordering_violation(domain, &interior, 0.0) {
            return Err(Error::NotOrdered { index });
        }
        Ok(Self { grid, domain, interior })
    }

    /// Particles at `x_k = a + (b−a)·ξ_k/M`, i.e. the uniform density.
    pub fn uniform(grid: Arc<MassGrid>, domain: Interval) -> Result<Self> {
        let m = grid.mass();
        let interior = grid.nodes()[1..grid.cells()].iter().map(|&xi| domain.a + domain.length() * xi / m).collect();
        Self::new(grid, domain, interior)
    }

    /// A new configuration on the same grid.
    pub fn with_interior(&self, interior: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.domain, interior)
    }

    pub fn grid(&self) -> &Arc<MassGrid> {
        &self.grid
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn into_interior(self) -> Vec<f64> {
        self.interior
    }

    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    /// `x_k` for `k ∈ 0..=K`.
    pub fn node(&self, k: usize) -> f64 {
        if k == 0 {
            self.domain.a
        } else if k == self.cells() {
            self.domain.b
        } else {
            self.interior[k - 1]
        }
    }

    /// All nodes `x₀..x_K`.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.cells() + 1);
        v.push(self.domain.a);
        v.extend_from_slice(&self.interior);
        v.push(self.domain.b);
        v
    }

    /// Cell widths `x_k − x_{k−1}`, zero-based.
    pub fn widths(&self) -> Vec<f64> {
        (1..=self.cells()).map(|k| self.node(k) - self.node(k - 1)).collect()
    }

    pub fn shares_grid(&self, other: &ParticleConfig) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid) && self.domain == other.domain
    }

    pub fn density(&self) -> PiecewiseDensity {
        density_from_particles(self)
    }

    pub fn difference_quotients(&self) -> Vec<f64> {
        difference_quotients(self)
    }

    pub fn inverse_cdf(&self, xi: f64) -> Result<f64> {
        inverse_cdf_eval(self, xi)
    }

    pub fn total_mass(&self) -> f64 {
        self.density().mass()
    }
}

/// `u_k = δ_k / (x_k − x_{k−1})`.
pub fn density_from_particles(p: &ParticleConfig) -> PiecewiseDensity {
    let breakpoints = p.nodes();
    let values = breakpoints
        .windows(2)
        .zip(p.grid.deltas())
        .map(|(w, &d)| d / (w[1] - w[0]))
        .collect();
    PiecewiseDensity { breakpoints, values }
}

/// `z_k = (x_k − x_{k−1}) / δ_k = 1/u_k`.
pub fn difference_quotients(p: &ParticleConfig) -> Vec<f64> {
    (1..=p.cells()).map(|k| (p.node(k) - p.node(k - 1)) / p.grid.delta(k)).collect()
}

/// Piecewise-affine inverse distribution function `X(ξ) = Σ x_k θ_k(ξ)`.
pub fn inverse_cdf_eval(p: &ParticleConfig, xi: f64) -> Result<f64> {
    let m = p.grid.mass();
    if !(0.0..=m).contains(&xi) {
        return Err(Error::InvalidParameter(format!("mass coordinate {xi} outside [0, {m}]")));
    }
    let k = p.grid.cell_of(xi);
    let s = (xi - p.grid.node(k - 1)) / p.grid.delta(k);
    Ok(p.node(k - 1) + s * (p.node(k) - p.node(k - 1)))
}

/// `W₂(u⁰, u¹) = sqrt((x⁰ − x¹)ᵀ W (x⁰ − x¹))`.
pub fn wasserstein_distance(p0: &ParticleConfig, p1: &ParticleConfig) -> Result<f64> {
    if !p0.shares_grid(p1) {
        return Err(Error::GridMismatch);
    }
    let w = assemble_w(&p0.grid);
    let diff: Vec<f64> = p0.interior.iter().zip(&p1.interior).map(|(a, b)| a - b).collect();
    Ok(w.quadratic_form(&diff)?.max(0.0).sqrt())
}

/// Piecewise-constant density `Σ u_k 1_{(x_{k−1}, x_k]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDensity {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::DimensionMismatch { expected: breakpoints.len().saturating_sub(1), got: values.len() });
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("density breakpoints must increase".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn mass(&self) -> f64 {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, u)| u * (w[1] - w[0])).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value on the cell `(x_{k−1}, x_k]` containing `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < x).clamp(1, self.values.len());
        self.values[k - 1]
    }

    pub fn l1_distance(&self, other: &PiecewiseDensity) -> Result<f64> {
        l1_distance(self, other)
    }
}

/// Exact `∫ |u⁰ − u¹| dx` for two piecewise-constant densities on the same interval.
pub fn l1_distance(d0: &PiecewiseDensity, d1: &PiecewiseDensity) -> Result<f64> {
    let (a0, b0) = d0.domain();
    let (a1, b1) = d1.domain();
    let tol = 1e-12 * (b0 - a0).abs().max(1.0);
    if (a0 - a1).abs() > tol || (b0 - b1).abs() > tol {
        return Err(Error::DomainMismatch);
    }
    let mut cuts: Vec<f64> = d0.breakpoints.iter().chain(&d1.breakpoints[1..d1.breakpoints.len() - 1]).cloned().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let acc = cuts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (d0.eval(mid) - d1.eval(mid)).abs() * (w[1] - w[0])
        })
        .sum();
    Ok(acc)
}
