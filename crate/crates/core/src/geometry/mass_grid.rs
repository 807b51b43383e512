use crate::error::{Error, Result};
use crate::geometry::ParticleConfig;
use crate::model::Interval;
use crate::quadrature::simpson;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default Simpson panels per cell when integrating an initial datum.
pub const DEFAULT_QUADRATURE_PANELS: usize = 64;

/// Fixed partition `0 = ξ₀ < ξ₁ < … < ξ_K = M` of the mass interval.
///
/// Cells are numbered `1..=K` in the accessor methods; the backing vectors are
/// zero-based (`delta[k - 1]` is the mass of cell `k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassGrid {
    xi: Vec<f64>,
    delta: Vec<f64>,
    gamma: Vec<f64>,
    delta_min: f64,
    delta_max: f64,
}

impl MassGrid {
    /// Builds the grid from its nodes `ξ₀..ξ_K`.
    pub fn from_nodes(xi: Vec<f64>) -> Result<Self> {
        if xi.len() < 3 {
            return Err(Error::InvalidParameter(format!("mass grid needs K >= 2 cells, got {}", xi.len().saturating_sub(1))));
        }
        if xi[0] != 0.0 {
            return Err(Error::InvalidParameter(format!("mass grid must start at 0, got {}", xi[0])));
        }
        let delta: Vec<f64> = xi.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some((i, &d)) = delta.iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
            return Err(Error::VanishingCell { cell: i + 1, mass: d });
        }
        let k = delta.len();
        let mut gamma = vec![0.0; k];
        for m in 1..k - 1 {
            let (dm1, d, dp1) = (delta[m - 1], delta[m], delta[m + 1]);
            gamma[m] = (dp1 - dm1) / (dp1 + 2.0 * d + dm1);
        }
        let delta_min = delta.iter().cloned().fold(f64::INFINITY, f64::min);
        let delta_max = delta.iter().cloned().fold(0.0, f64::max);
        Ok(Self { xi, delta, gamma, delta_min, delta_max })
    }

    /// Number of cells `K`.
    pub fn cells(&self) -> usize {
        self.delta.len()
    }

    pub fn mass(&self) -> f64 {
        self.xi[self.cells()]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xi
    }

    pub fn node(&self, k: usize) -> f64 {
        self.xi[k]
    }

    /// Cell masses `δ₁..δ_K` (zero-based slice).
    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// Mass `δ_k` of cell `k ∈ 1..=K`.
    pub fn delta(&self, k: usize) -> f64 {
        self.delta[k - 1]
    }

    /// `γ_k` for `k ∈ 1..=K`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k - 1]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gamma
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    /// `α = δ̄ / δ̲`.
    pub fn alpha(&self) -> f64 {
        self.delta_max / self.delta_min
    }

    /// Index `k ∈ 1..=K` of the cell containing `ξ` (right-closed except the first).
    pub fn cell_of(&self, xi: f64) -> usize {
        let k = self.xi.partition_point(|&node| node < xi);
        k.clamp(1, self.cells())
    }

    /// Hat function `θ_m(ξ)` for `m ∈ 0..=K`.
    pub fn hat(&self, m: usize, xi: f64) -> f64 {
        let k = self.cells();
        if m >= 1 && self.xi[m - 1] <= xi && xi <= self.xi[m] {
            return (xi - self.xi[m - 1]) / self.delta[m - 1];
        }
        if m < k && self.xi[m] <= xi && xi <= self.xi[m + 1] {
            return (self.xi[m + 1] - xi) / self.delta[m];
        }
        0.0
    }
}

/// Equidistant grid `ξ_k = M·k/K`.
pub fn uniform_mass_grid(mass: f64, cells: usize) -> Result<MassGrid> {
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("K must be at least 2, got {cells}")));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let mut xi: Vec<f64> = (0..=cells).map(|k| mass * k as f64 / cells as f64).collect();
    xi[cells] = mass;
    MassGrid::from_nodes(xi)
}

/// Discretizes an initial density on an equidistant spatial grid: `x⁰_k = a + k(b−a)/K`
/// and `ξ_k = U⁰(x⁰_k)`, with the CDF `U⁰` integrated by composite Simpson using
/// `panels` sub-intervals per cell.
pub fn mass_grid_from_initial_datum<F>(
    density: F,
    domain: Interval,
    cells: usize,
    panels: usize,
) -> Result<(Arc<MassGrid>, ParticleConfig)>
where
    F: Fn(f64) -> f64,
{
    mass_grid_from_initial_datum_with_breaks(density, &[], domain, cells, panels)
}

/// As [`mass_grid_from_initial_datum`], but cells containing one of `breaks`
/// (known discontinuities or kinks of the density) are integrated piecewise, so
/// step data are discretized exactly.
pub fn mass_grid_from_initial_datum_with_breaks<F>(
    density: F,
    breaks: &[f64],
    domain: Interval,
    cells: usize,
    panels: usize,
) -> Result<(Arc<MassGrid>, ParticleConfig)>
where
    F: Fn(f64) -> f64,
{
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("K must be at least 2, got {cells}")));
    }
    let h = domain.length() / cells as f64;
    let x: Vec<f64> = (0..=cells)
        .map(|k| if k == cells { domain.b } else { domain.a + k as f64 * h })
        .collect();
    let mut xi = Vec::with_capacity(cells + 1);
    xi.push(0.0);
    let mut acc = 0.0;
    for k in 1..=cells {
        let (lo, hi) = (x[k - 1], x[k]);
        let mut cuts = vec![lo];
        cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        // Endpoints are nudged inwards so a jump sitting on a cut is sampled from the
        // correct side.
        let cell_mass: f64 = cuts
            .windows(2)
            .map(|w| {
                let eta = 1e-12 * (w[1] - w[0]);
                simpson(w[0], w[1], panels, |t: f64| density(t.clamp(w[0] + eta, w[1] - eta)))
            })
            .sum();
        if !(cell_mass > 0.0) {
            return Err(Error::VanishingCell { cell: k, mass: cell_mass });
        }
        acc += cell_mass;
        xi.push(acc);
    }
    let grid = Arc::new(MassGrid::from_nodes(xi)?);
    let config = ParticleConfig::new(grid.clone(), domain, x[1..cells].to_vec())?;
    Ok((grid, config))
}
