//! Consistency order of the scheme measured on manufactured smooth inverse
//! distribution functions `X(t, ξ)`.

use super::fit::{fit_loglog_slope, SlopeFit};
use crate::error::{Error, Result};
use crate::geometry::{uniform_mass_grid, ParticleConfig};
use crate::model::{Interval, ProblemSpec};
use crate::registry::Registry;
use crate::stepper::el_residual;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

/// A smooth, strictly increasing `X(t, ·): [0, M] → I` with `X(t,0) = a`, `X(t,M) = b`.
pub trait ManufacturedSolution: Send + Sync + Debug {
    fn id(&self) -> String;
    fn domain(&self) -> Interval;
    fn mass(&self) -> f64;
    fn x(&self, t: f64, xi: f64) -> f64;
    fn x_t(&self, t: f64, xi: f64) -> f64;
    fn x_xi(&self, t: f64, xi: f64) -> f64;
    fn x_xixi(&self, t: f64, xi: f64) -> f64;
}

/// `X(ξ) = a + (b−a)ξ/M`: the uniform density, stationary when `V ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryLinear {
    pub domain: Interval,
    pub mass: f64,
}

impl ManufacturedSolution for StationaryLinear {
    fn id(&self) -> String {
        "stationary".into()
    }
    fn domain(&self) -> Interval {
        self.domain
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn x(&self, _t: f64, xi: f64) -> f64 {
        self.domain.a + self.domain.length() * xi / self.mass
    }
    fn x_t(&self, _t: f64, _xi: f64) -> f64 {
        0.0
    }
    fn x_xi(&self, _t: f64, _xi: f64) -> f64 {
        self.domain.length() / self.mass
    }
    fn x_xixi(&self, _t: f64, _xi: f64) -> f64 {
        0.0
    }
}

/// `X(t, ξ) = ξ + A·e^{−t}·sin(πξ)` on `[0, 1]` with unit mass; increasing for `Aπ < 1`.
#[derive(Debug, Clone, Copy)]
pub struct SineManufactured {
    pub amplitude: f64,
}

impl ManufacturedSolution for SineManufactured {
    fn id(&self) -> String {
        format!("sine:amplitude={}", self.amplitude)
    }
    fn domain(&self) -> Interval {
        Interval { a: 0.0, b: 1.0 }
    }
    fn mass(&self) -> f64 {
        1.0
    }
    fn x(&self, t: f64, xi: f64) -> f64 {
        xi + self.amplitude * (-t).exp() * (PI * xi).sin()
    }
    fn x_t(&self, t: f64, xi: f64) -> f64 {
        -self.amplitude * (-t).exp() * (PI * xi).sin()
    }
    fn x_xi(&self, t: f64, xi: f64) -> f64 {
        1.0 + self.amplitude * PI * (-t).exp() * (PI * xi).cos()
    }
    fn x_xixi(&self, t: f64, xi: f64) -> f64 {
        -self.amplitude * PI * PI * (-t).exp() * (PI * xi).sin()
    }
}

/// Registry of manufactured solutions: `stationary`, `sine:amplitude=…` (default 0.1).
pub fn manufactured_registry() -> Registry<dyn ManufacturedSolution> {
    let mut r: Registry<dyn ManufacturedSolution> = Registry::new("manufactured solution");
    r.register("stationary", |p| {
        let domain = Interval::new(p.get_or("a", 0.0), p.get_or("b", 1.0))?;
        let mass = p.get_or("mass", 1.0);
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Arc::new(StationaryLinear { domain, mass }))
    });
    r.register("sine", |p| {
        let amplitude = p.get_or("amplitude", 0.1);
        if !(amplitude.abs() * PI < 1.0) {
            return Err(Error::InvalidParameter(format!("sine amplitude {amplitude} breaks monotonicity")));
        }
        Ok(Arc::new(SineManufactured { amplitude }))
    });
    r
}

/// The continuous residual `X_t − ψ″(X_ξ)X_ξξ + V_x(X)` that the scaled discrete
/// residual approximates.
fn continuous_residual(spec: &ProblemSpec, sol: &dyn ManufacturedSolution, t: f64, xi: f64) -> f64 {
    sol.x_t(t, xi) - spec.nonlinearity.d2psi(sol.x_xi(t, xi)) * sol.x_xixi(t, xi) + spec.potential.dx(sol.x(t, xi))
}

fn restrict(sol: &dyn ManufacturedSolution, grid: &Arc<crate::geometry::MassGrid>, t: f64) -> Result<ParticleConfig> {
    let k = grid.cells();
    let interior = (1..k).map(|i| sol.x(t, grid.node(i))).collect();
    ParticleConfig::new(grid.clone(), sol.domain(), interior)
}

/// Interior components of `el_residual/δ − (X_t − ψ″(X_ξ)X_ξξ + V_x(X))` for the
/// pseudo-solution `x_k = X(t*, ξ_k)`, `x_k^{prev} = X(t* − τ, ξ_k)` on a uniform grid.
pub fn consistency_residual(
    spec: &ProblemSpec,
    sol: &dyn ManufacturedSolution,
    cells: usize,
    tau: f64,
    t_star: f64,
) -> Result<Vec<f64>> {
    if spec.domain != sol.domain() {
        return Err(Error::DomainMismatch);
    }
    let grid = Arc::new(uniform_mass_grid(sol.mass(), cells)?);
    let prev = restrict(sol, &grid, t_star - tau)?;
    let cur = restrict(sol, &grid, t_star)?;
    let delta = grid.delta(1);
    let r = el_residual(spec, tau, &prev, &cur)?;
    Ok(r.iter()
        .enumerate()
        .map(|(i, v)| v / delta - continuous_residual(spec, sol, t_star, grid.node(i + 1)))
        .collect())
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Parameters of a consistency study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyPlan {
    /// Time steps, coarse to fine, used at `cells_for_tau`.
    pub taus: Vec<f64>,
    pub cells_for_tau: usize,
    /// Cell counts, coarse to fine, used at `tau_for_cells`.
    pub cells: Vec<usize>,
    pub tau_for_cells: f64,
    pub t_star: f64,
}

impl Default for ConsistencyPlan {
    fn default() -> Self {
        Self {
            taus: (0..5).map(|i| 1e-2 * 10f64.powf(-0.5 * i as f64)).collect(),
            cells_for_tau: 256,
            cells: vec![16, 32, 64, 128],
            tau_for_cells: 1e-6,
            t_star: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauRow {
    pub tau: f64,
    pub residual_inf: f64,
    /// `‖r(τ_i) − r(τ_{i+1})‖∞`; absent for the finest τ.
    pub successive_difference: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellsRow {
    pub cells: usize,
    pub delta: f64,
    pub residual_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub solution: String,
    pub plan: ConsistencyPlan,
    pub tau_rows: Vec<TauRow>,
    pub cell_rows: Vec<CellsRow>,
    /// Slope of the successive τ-differences; `None` when they vanish identically.
    pub tau_fit: Option<SlopeFit>,
    /// Slope of the residual against `δ`; `None` when the residuals vanish identically.
    pub delta_fit: Option<SlopeFit>,
    pub max_residual: f64,
}

fn fit_or_none(x: &[f64], y: &[f64]) -> Result<Option<SlopeFit>> {
    if y.iter().all(|v| *v == 0.0) {
        return Ok(None);
    }
    fit_loglog_slope(x, y).map(Some)
}

/// At fixed grid the residual behaves like `c·τ + r_δ` with a `δ²` floor `r_δ`
/// that swamps the `τ` part; successive differences cancel the floor (Richardson),
/// so the `τ`-order is fitted on them. The `δ`-order is fitted on the raw residual
/// at a time step small enough that its `τ` part is negligible.
pub fn consistency_study(spec: &ProblemSpec, sol: &dyn ManufacturedSolution, plan: &ConsistencyPlan) -> Result<ConsistencyReport> {
    let tau_vecs: Vec<Vec<f64>> = plan
        .taus
        .iter()
        .map(|&tau| consistency_residual(spec, sol, plan.cells_for_tau, tau, plan.t_star))
        .collect::<Result<_>>()?;
    let tau_rows: Vec<TauRow> = (0..plan.taus.len())
        .map(|i| TauRow {
            tau: plan.taus[i],
            residual_inf: linf(&tau_vecs[i]),
            successive_difference: tau_vecs.get(i + 1).map(|next| {
                let d: Vec<f64> = tau_vecs[i].iter().zip(next).map(|(a, b)| a - b).collect();
                linf(&d)
            }),
        })
        .collect();
    let cell_rows: Vec<CellsRow> = plan
        .cells
        .iter()
        .map(|&k| {
            let r = consistency_residual(spec, sol, k, plan.tau_for_cells, plan.t_star)?;
            Ok(CellsRow { cells: k, delta: sol.mass() / k as f64, residual_inf: linf(&r) })
        })
        .collect::<Result<_>>()?;
    let diffs: Vec<(f64, f64)> =
        tau_rows.iter().filter_map(|r| r.successive_difference.map(|d| (r.tau, d))).collect();
    let (tx, ty): (Vec<f64>, Vec<f64>) = diffs.into_iter().unzip();
    let tau_fit = fit_or_none(&tx, &ty)?;
    let dx: Vec<f64> = cell_rows.iter().map(|r| r.delta).collect();
    let dy: Vec<f64> = cell_rows.iter().map(|r| r.residual_inf).collect();
    let delta_fit = fit_or_none(&dx, &dy)?;
    let max_residual = tau_rows.iter().map(|r| r.residual_inf).chain(dy.iter().copied()).fold(0.0, f64::max);
    Ok(ConsistencyReport { solution: sol.id(), plan: plan.clone(), tau_rows, cell_rows, tau_fit, delta_fit, max_residual })
}
