//! Discrete energy, contraction, min/max-principle and regularity estimates
//! checked on computed trajectories.

use crate::energy::{energy_gradient, energy_lower_bound};
use crate::error::{Error, Result};
use crate::geometry::{assemble_w, wasserstein_distance, PiecewiseDensity};
use crate::model::ProblemSpec;
use crate::stepper::{check_inverse_cfl, check_max_principle_cfl, CflCheck, Trajectory};
use serde::{Deserialize, Serialize};

/// Slack allowed for the energy estimates.
pub const ENERGY_SLACK: f64 = 1e-9;
/// Slack allowed for the contraction estimate.
pub const CONTRACTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub lhs: f64,
    pub rhs: f64,
}

impl Estimate {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimates {
    /// Largest single-step increase `𝔼(xⁿ) − 𝔼(xⁿ⁻¹)` (non-positive when monotone).
    pub max_energy_increase: f64,
    /// `(1/2τ)ΣW₂² ≤ E⁰ − E^N`.
    pub metric: Estimate,
    /// `(τ/2)Σ∇𝔼ᵀW⁻¹∇𝔼 ≤ E⁰ − E^N`.
    pub dual: Estimate,
    /// `τΣΣ(ψ′(z_{k+1})−ψ′(z_k))²/(δ_k+δ_{k+1}) ≤ α[E⁰−E^N+MT·sup V_x²]`.
    pub dissipation: Estimate,
}

impl EnergyEstimates {
    pub fn all_hold(&self, tol: f64) -> bool {
        self.max_energy_increase <= tol && self.metric.holds(tol) && self.dual.holds(tol) && self.dissipation.holds(tol)
    }
}

pub fn check_energy_estimates(traj: &Trajectory) -> Result<EnergyEstimates> {
    let spec = &traj.spec;
    let tau = traj.tau();
    let grid = &traj.grid;
    let n = traj.steps();
    let drop = traj.energies[0].total - traj.energies[n].total;
    let max_energy_increase = traj
        .energies
        .windows(2)
        .map(|w| w[1].total - w[0].total)
        .fold(f64::NEG_INFINITY, f64::max);
    let metric_lhs = traj.per_step.iter().map(|s| s.wasserstein_increment.powi(2)).sum::<f64>() / (2.0 * tau);
    let w = assemble_w(grid);
    let mut dual_lhs = 0.0;
    let mut diss_lhs = 0.0;
    for x in &traj.configs[1..] {
        let g = energy_gradient(spec, x);
        let wg = w.solve(&g)?;
        dual_lhs += g.iter().zip(&wg).map(|(a, b)| a * b).sum::<f64>();
        let z = x.difference_quotients();
        for k in 1..grid.cells() {
            let d = spec.nonlinearity.dpsi(z[k]) - spec.nonlinearity.dpsi(z[k - 1]);
            diss_lhs += d * d / (grid.delta(k) + grid.delta(k + 1));
        }
    }
    let horizon = traj.horizon();
    Ok(EnergyEstimates {
        max_energy_increase: if n == 0 { 0.0 } else { max_energy_increase },
        metric: Estimate { lhs: metric_lhs, rhs: drop },
        dual: Estimate { lhs: 0.5 * tau * dual_lhs, rhs: drop },
        dissipation: Estimate {
            lhs: tau * diss_lhs,
            rhs: grid.alpha() * (drop + spec.mass * horizon * spec.sup_drift_sq()),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// `W₂(uⁿ_A, uⁿ_B)²` for each frame.
    pub distances_sq: Vec<f64>,
    /// `(1−2Λτ)^{−n}·W₂(u⁰_A, u⁰_B)²`.
    pub bounds: Vec<f64>,
    /// Smallest `bound − dist²` over `n ≥ 1`.
    pub worst_slack: f64,
    /// `max_{n≥1} dist²/bound` over frames with a positive bound.
    pub worst_ratio: f64,
}

impl ContractionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_slack >= -tol
    }
}

pub fn check_contraction(a: &Trajectory, b: &Trajectory) -> Result<ContractionReport> {
    if !a.initial().shares_grid(b.initial()) {
        return Err(Error::GridMismatch);
    }
    if a.tau() != b.tau() || a.steps() != b.steps() {
        return Err(Error::InvalidParameter("trajectories differ in time step or length".into()));
    }
    let rate = 1.0 - 2.0 * a.spec.concavity() * a.tau();
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!("contraction needs 2*Lambda*tau < 1, got {}", 1.0 - rate)));
    }
    let mut distances_sq = Vec::with_capacity(a.configs.len());
    let mut bounds = Vec::with_capacity(a.configs.len());
    let mut worst_slack = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (n, (pa, pb)) in a.configs.iter().zip(&b.configs).enumerate() {
        let d2 = wasserstein_distance(pa, pb)?.powi(2);
        let bound = if n == 0 { d2 } else { rate.powi(-(n as i32)) * distances_sq[0] };
        if n > 0 {
            worst_slack = worst_slack.min(bound - d2);
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(d2 / bound);
            }
        }
        distances_sq.push(d2);
        bounds.push(bound);
    }
    Ok(ContractionReport { distances_sq, bounds, worst_slack, worst_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipleSample {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub min_bound: f64,
    pub max_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipleReport {
    pub horizon: f64,
    pub samples: Vec<PrincipleSample>,
    pub cfl: CflCheck,
    pub max_cfl: CflCheck,
    /// `Λτ < ½` and the inverse CFL condition verified.
    pub min_applicable: bool,
    /// Additionally the maximum-principle condition verified.
    pub max_applicable: bool,
    /// Frames violating `min uⁿ ≥ e^{−2nτΛ} min u⁰` (informational unless applicable).
    pub min_violations: Vec<usize>,
    pub max_violations: Vec<usize>,
}

impl PrincipleReport {
    pub fn cfl_satisfied(&self) -> bool {
        self.cfl.satisfied
    }

    /// No violation of a principle whose hypotheses were verified.
    pub fn consistent(&self) -> bool {
        (!self.min_applicable || self.min_violations.is_empty()) && (!self.max_applicable || self.max_violations.is_empty())
    }
}

/// Relative tolerance when comparing extrema against their bounds.
const PRINCIPLE_RTOL: f64 = 1e-12;

pub fn check_min_max_principles(traj: &Trajectory, horizon: f64) -> PrincipleReport {
    let spec = &traj.spec;
    let tau = traj.tau();
    let d0 = traj.initial().density();
    let (min0, max0) = (d0.min(), d0.max());
    let cfl = check_inverse_cfl(spec, &traj.grid, &traj.step_config, min0, horizon);
    let max_cfl = check_max_principle_cfl(spec, &traj.grid, &traj.step_config, min0, horizon);
    let min_applicable = spec.concavity() * tau < 0.5 && cfl.satisfied;
    let max_applicable = min_applicable && max_cfl.satisfied;
    let mut samples = Vec::new();
    let mut min_violations = Vec::new();
    let mut max_violations = Vec::new();
    for (n, x) in traj.configs.iter().enumerate() {
        let t = n as f64 * tau;
        if t > horizon * (1.0 + 1e-12) {
            break;
        }
        let d = x.density();
        let s = PrincipleSample {
            n,
            min: d.min(),
            max: d.max(),
            min_bound: (-2.0 * t * spec.concavity()).exp() * min0,
            max_bound: (2.0 * t * spec.convexity()).exp() * max0,
        };
        if s.min < s.min_bound * (1.0 - PRINCIPLE_RTOL) {
            min_violations.push(n);
        }
        if s.max > s.max_bound * (1.0 + PRINCIPLE_RTOL) {
            max_violations.push(n);
        }
        samples.push(s);
    }
    PrincipleReport { horizon, samples, cfl, max_cfl, min_applicable, max_applicable, min_violations, max_violations }
}

/// `Σ_k |Φ(u_{k+1})² − Φ(u_k)²|`.
pub fn tv_of_phi_squared(spec: &ProblemSpec, d: &PiecewiseDensity) -> f64 {
    let sq: Vec<f64> = d.values.iter().map(|&u| spec.nonlinearity.big_phi(u).powi(2)).collect();
    sq.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `𝒞(E, α, T) = TΦ(M/(b−a))² + 6(b−a)α(1+α)[E − E̲ + MT·sup V_x²]`.
pub fn regularity_constant(spec: &ProblemSpec, e0: f64, alpha: f64, horizon: f64) -> f64 {
    let len = spec.domain.length();
    horizon * spec.nonlinearity.big_phi(spec.mass / len).powi(2)
        + 6.0 * len * alpha * (1.0 + alpha) * (e0 - energy_lower_bound(spec) + spec.mass * horizon * spec.sup_drift_sq())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// `Var(Φ(uⁿ)²)` for `n = 1..=N`.
    pub per_step_tv: Vec<f64>,
    pub time_sum: f64,
    pub bound: f64,
}

impl RegularityReport {
    pub fn slack(&self) -> f64 {
        self.bound - self.time_sum
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

pub fn check_regularity_bound(traj: &Trajectory) -> RegularityReport {
    let spec = &traj.spec;
    let per_step_tv: Vec<f64> = traj.configs[1..].iter().map(|x| tv_of_phi_squared(spec, &x.density())).collect();
    let time_sum = traj.tau() * per_step_tv.iter().sum::<f64>();
    let bound = regularity_constant(spec, traj.energies[0].total, traj.grid.alpha(), traj.horizon());
    RegularityReport { per_step_tv, time_sum, bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{uniform_mass_grid, ParticleConfig};
    use crate::model::{porous_medium_nonlinearity, zero_potential, Interval};
    use crate::stepper::{evolve, StepConfig};
    use std::sync::Arc;

    fn flat() -> ProblemSpec {
        ProblemSpec::new(
            Interval::new(0.0, 1.0).unwrap(),
            1.0,
            Arc::new(porous_medium_nonlinearity(2.0).unwrap()),
            Arc::new(zero_potential()),
        )
        .unwrap()
    }

    #[test]
    fn tv_examples() {
        let spec = flat();
        let d = PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert!((tv_of_phi_squared(&spec, &d) - 112.0 / 9.0).abs() < 1e-12);
        let flat_d = PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(tv_of_phi_squared(&spec, &flat_d), 0.0);
        let a = PiecewiseDensity::new(vec![0.0, 0.2, 0.4, 1.0], vec![1.0, 1.0, 3.0]).unwrap();
        let b = PiecewiseDensity::new(vec![0.0, 0.6, 0.8, 1.0], vec![1.0, 3.0, 3.0]).unwrap();
        assert!((tv_of_phi_squared(&spec, &a) - tv_of_phi_squared(&spec, &b)).abs() < 1e-12);
    }

    #[test]
    fn stationary_run_meets_everything() {
        let spec = flat();
        let p = ParticleConfig::uniform(Arc::new(uniform_mass_grid(1.0, 5).unwrap()), spec.domain).unwrap();
        let t = evolve(&spec, &StepConfig::new(0.05), &p, 4).unwrap();
        let e = check_energy_estimates(&t).unwrap();
        assert!(e.all_hold(ENERGY_SLACK));
        let c = check_contraction(&t, &t).unwrap();
        assert!(c.distances_sq.iter().all(|&d| d == 0.0));
        let r = check_regularity_bound(&t);
        assert_eq!(r.time_sum, 0.0);
        assert!(r.holds(0.0));
        let pr = check_min_max_principles(&t, t.horizon());
        assert!(pr.min_violations.is_empty() && pr.max_violations.is_empty());
    }

    #[test]
    fn regularity_bound_grows_with_horizon() {
        let spec = flat();
        assert!(regularity_constant(&spec, 1.2, 2.0, 0.5) < regularity_constant(&spec, 1.2, 2.0, 1.0));
    }
}
