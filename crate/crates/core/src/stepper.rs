//! Minimizing-movement time stepping with a damped Newton solver.

use crate::energy::{energy, energy_gradient, energy_hessian, EnergyReport};
use crate::error::{Error, Result};
use crate::geometry::{assemble_w, first_ordering_violation, MassGrid, ParticleConfig};
use crate::model::ProblemSpec;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Relative guard for the membership test `x ∈ 𝔵`.
pub const ADMISSIBILITY_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub tau: f64,
    pub tol: f64,
    pub max_newton_iter: usize,
    pub max_dampings: usize,
}

impl StepConfig {
    pub fn new(tau: f64) -> Self {
        Self { tau, tol: 1e-8, max_newton_iter: 50, max_dampings: 60 }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    /// Checks `τ > 0`, `tol > 0` and `τΛ < 1`.
    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_newton_iter == 0 {
            return Err(Error::InvalidParameter("maxNewtonIter must be at least 1".into()));
        }
        let lam = spec.concavity();
        if !(self.tau * lam < 1.0) {
            return Err(Error::InvalidParameter(format!("tau*Lambda = {} must be < 1", self.tau * lam)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub config: ParticleConfig,
    pub newton_iterations: usize,
    pub dampings_used: usize,
    /// `‖residual‖_{l¹}` at the returned configuration.
    pub residual_norm: f64,
    /// `𝔼(xⁿ⁻¹) − [W₂²/(2τ) + 𝔼(xⁿ)]`.
    pub penalized_energy_decrease: f64,
    pub wasserstein_increment: f64,
}

/// Statistics of a step without the configuration; what trajectories record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub newton_iterations: usize,
    pub dampings_used: usize,
    pub residual_norm: f64,
    pub penalized_energy_decrease: f64,
    pub wasserstein_increment: f64,
}

impl From<&StepResult> for StepStats {
    fn from(r: &StepResult) -> Self {
        Self {
            newton_iterations: r.newton_iterations,
            dampings_used: r.dampings_used,
            residual_norm: r.residual_norm,
            penalized_energy_decrease: r.penalized_energy_decrease,
            wasserstein_increment: r.wasserstein_increment,
        }
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn check_pair(x_prev: &ParticleConfig, x: &ParticleConfig) -> Result<()> {
    if !x_prev.shares_grid(x) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `(1/τ)·W(x − xⁿ⁻¹) + ∇𝔼_ξ(x)`.
pub fn el_residual(spec: &ProblemSpec, tau: f64, x_prev: &ParticleConfig, x: &ParticleConfig) -> Result<Vec<f64>> {
    check_pair(x_prev, x)?;
    let w = assemble_w(x.grid());
    let diff: Vec<f64> = x.interior().iter().zip(x_prev.interior()).map(|(a, b)| a - b).collect();
    let wd = w.matvec(&diff)?;
    let grad = energy_gradient(spec, x);
    Ok(wd.iter().zip(&grad).map(|(a, g)| a / tau + g).collect())
}

fn w2_increment(x_prev: &ParticleConfig, x: &ParticleConfig) -> Result<f64> {
    let w = assemble_w(x.grid());
    let diff: Vec<f64> = x.interior().iter().zip(x_prev.interior()).map(|(a, b)| a - b).collect();
    Ok(w.quadratic_form(&diff)?.max(0.0).sqrt())
}

/// One step of the scheme: solves the Euler–Lagrange system by damped Newton,
/// starting from the previous configuration.
pub fn minimizing_movement_step(spec: &ProblemSpec, cfg: &StepConfig, x_prev: &ParticleConfig) -> Result<StepResult> {
    cfg.validate(spec)?;
    let tau = cfg.tau;
    let domain = x_prev.domain();
    let guard = ADMISSIBILITY_GUARD * domain.length();
    let w_tau = assemble_w(x_prev.grid()).scaled(1.0 / tau);
    let mut x = x_prev.clone();
    let mut dampings_used = 0;
    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;
    loop {
        if iterations == cfg.max_newton_iter {
            return Err(Error::NonConvergence { iterations, residual: last_residual });
        }
        iterations += 1;
        let r = el_residual(spec, tau, x_prev, &x)?;
        last_residual = l1(&r);
        let system = w_tau.add_scaled(&energy_hessian(spec, &x), 1.0)?;
        let mut dx: Vec<f64> = system.solve(&r)?.into_iter().map(|v| -v).collect();
        let mut halvings = 0;
        let candidate = loop {
            let trial: Vec<f64> = x.interior().iter().zip(&dx).map(|(a, d)| a + d).collect();
            if first_ordering_violation(domain, &trial, guard).is_none() {
                break trial;
            }
            if halvings == cfg.max_dampings {
                return Err(Error::DampingFailure { dampings: cfg.max_dampings });
            }
            halvings += 1;
            dx.iter_mut().for_each(|d| *d *= 0.5);
        };
        dampings_used += halvings;
        x = x.with_interior(candidate)?;
        if l1(&dx) < cfg.tol && last_residual < cfg.tol {
            break;
        }
    }
    let residual_norm = l1(&el_residual(spec, tau, x_prev, &x)?);
    let wasserstein_increment = w2_increment(x_prev, &x)?;
    let penalized_energy_decrease =
        energy(spec, x_prev).total - (wasserstein_increment.powi(2) / (2.0 * tau) + energy(spec, &x).total);
    Ok(StepResult {
        config: x,
        newton_iterations: iterations,
        dampings_used,
        residual_norm,
        penalized_energy_decrease,
        wasserstein_increment,
    })
}

/// Outcome of the inverse CFL check `δ̄² ≤ 6·ψ″(Z)·τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CflCheck {
    pub satisfied: bool,
    /// `lhs / rhs`; at most 1 when satisfied.
    pub ratio: f64,
    /// Equality within 1e-12 relative.
    pub borderline: bool,
}

impl CflCheck {
    fn from_sides(lhs: f64, rhs: f64) -> Self {
        let borderline = (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs());
        Self { satisfied: lhs <= rhs || borderline, ratio: lhs / rhs, borderline }
    }
}

/// `Z*_T = 6·α·e^{2ΛT}/min u⁰`.
pub fn cfl_z_star(spec: &ProblemSpec, grid: &MassGrid, u0min: f64, horizon: f64) -> f64 {
    6.0 * grid.alpha() * (2.0 * spec.concavity() * horizon).exp() / u0min
}

/// Inverse CFL condition for the minimum principle.
pub fn check_inverse_cfl(spec: &ProblemSpec, grid: &MassGrid, cfg: &StepConfig, u0min: f64, horizon: f64) -> CflCheck {
    let z = cfl_z_star(spec, grid, u0min, horizon);
    let lhs = grid.delta_max().powi(2);
    let rhs = 6.0 * spec.nonlinearity.d2psi(z) * cfg.tau;
    CflCheck::from_sides(lhs, rhs)
}

/// Additional condition for the maximum principle, `(1+λτ)δ̄² ≤ 6τψ″(Z*_T)`.
pub fn check_max_principle_cfl(
    spec: &ProblemSpec,
    grid: &MassGrid,
    cfg: &StepConfig,
    u0min: f64,
    horizon: f64,
) -> CflCheck {
    let z = cfl_z_star(spec, grid, u0min, horizon);
    let lhs = (1.0 + spec.convexity() * cfg.tau) * grid.delta_max().powi(2);
    let rhs = 6.0 * cfg.tau * spec.nonlinearity.d2psi(z);
    CflCheck::from_sides(lhs, rhs)
}

/// The discrete solution `x⃗⁰, x⃗¹, …` with per-step statistics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: ProblemSpec,
    pub grid: Arc<MassGrid>,
    pub step_config: StepConfig,
    pub configs: Vec<ParticleConfig>,
    pub per_step: Vec<StepStats>,
    pub energies: Vec<EnergyReport>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.configs.len() - 1
    }

    pub fn tau(&self) -> f64 {
        self.step_config.tau
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau()
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.steps())
    }

    pub fn initial(&self) -> &ParticleConfig {
        &self.configs[0]
    }

    pub fn last(&self) -> &ParticleConfig {
        &self.configs[self.steps()]
    }

    /// Frame `⌈t/τ⌉` (clamped to the last), i.e. the piecewise-constant-in-time
    /// interpolant at `t`.
    pub fn frame_at(&self, t: f64) -> &ParticleConfig {
        let n = (t / self.tau() - 1e-9).ceil().max(0.0) as usize;
        &self.configs[n.min(self.steps())]
    }
}

/// Applies `steps` minimizing-movement steps to `x0`.
pub fn evolve(spec: &ProblemSpec, cfg: &StepConfig, x0: &ParticleConfig, steps: usize) -> Result<Trajectory> {
    cfg.validate(spec)?;
    let mut configs = Vec::with_capacity(steps + 1);
    let mut per_step = Vec::with_capacity(steps);
    let mut energies = Vec::with_capacity(steps + 1);
    configs.push(x0.clone());
    energies.push(energy(spec, x0));
    for n in 1..=steps {
        let r = minimizing_movement_step(spec, cfg, &configs[n - 1])
            .map_err(|e| Error::StepFailed { step: n, source: Box::new(e) })?;
        per_step.push(StepStats::from(&r));
        energies.push(energy(spec, &r.config));
        configs.push(r.config);
    }
    Ok(Trajectory {
        spec: spec.clone(),
        grid: x0.grid().clone(),
        step_config: *cfg,
        configs,
        per_step,
        energies,
    })
}

/// Number of steps reaching horizon `T`: `round(T/τ)`.
pub fn steps_for_horizon(tau: f64, horizon: f64) -> usize {
    (horizon / tau).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::uniform_mass_grid;
    use crate::model::{porous_medium_nonlinearity, zero_potential, Interval};

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
    fn stationary_input_is_returned() {
        let spec = flat();
        let p = ParticleConfig::uniform(Arc::new(uniform_mass_grid(1.0, 6).unwrap()), spec.domain).unwrap();
        assert!(el_residual(&spec, 0.01, &p, &p).unwrap().iter().all(|r| r.abs() < 1e-13));
        let r = minimizing_movement_step(&spec, &StepConfig::new(0.01), &p).unwrap();
        assert_eq!(r.newton_iterations, 1);
        assert_eq!(r.dampings_used, 0);
        for (a, b) in r.config.interior().iter().zip(p.interior()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_at_previous_is_gradient() {
        let spec = flat();
        let g = Arc::new(uniform_mass_grid(1.0, 4).unwrap());
        let p = ParticleConfig::new(g, spec.domain, vec![0.1, 0.4, 0.8]).unwrap();
        let r = el_residual(&spec, 0.05, &p, &p).unwrap();
        assert_eq!(r, energy_gradient(&spec, &p));
    }

    #[test]
    fn cfl_examples() {
        let spec = flat();
        let k = 10;
        let g = uniform_mass_grid(1.0, k).unwrap();
        // τ ≥ 18/K² is the threshold for u0min = 1.
        let at = 18.0 / (k * k) as f64;
        assert!(check_inverse_cfl(&spec, &g, &StepConfig::new(at * 1.01), 1.0, 1.0).satisfied);
        assert!(!check_inverse_cfl(&spec, &g, &StepConfig::new(at * 0.99), 1.0, 1.0).satisfied);
        assert!(check_inverse_cfl(&spec, &g, &StepConfig::new(at), 1.0, 1.0).ratio <= 1.0 + 1e-12);
        assert!(!check_inverse_cfl(&spec, &g, &StepConfig::new(1e-12), 1.0, 1.0).satisfied);
        let r1 = check_inverse_cfl(&spec, &g, &StepConfig::new(0.1), 1.0, 1.0).ratio;
        let r2 = check_inverse_cfl(&spec, &g, &StepConfig::new(0.2), 1.0, 1.0).ratio;
        assert!(r2 < r1);
    }

    #[test]
    fn invalid_step_config_is_rejected() {
        let spec = flat();
        assert!(StepConfig::new(0.0).validate(&spec).is_err());
        assert!(StepConfig::new(0.1).with_tol(0.0).validate(&spec).is_err());
        assert!(StepConfig::new(0.1).validate(&spec).is_ok());
    }

    #[test]
    fn frame_lookup_uses_ceiling() {
        let spec = flat();
        let p = ParticleConfig::uniform(Arc::new(uniform_mass_grid(1.0, 3).unwrap()), spec.domain).unwrap();
        let mut t = evolve(&spec, &StepConfig::new(0.1), &p, 3).unwrap();
        for (n, c) in t.configs.iter_mut().enumerate() {
            *c = c.with_interior(vec![0.3 + 0.01 * n as f64, 0.7]).unwrap();
        }
        assert_eq!(t.frame_at(0.0).interior()[0], 0.3 + 0.01 * 0 as f64);
        assert_eq!(t.frame_at(0.05).interior()[0], 0.3 + 0.01 * 1.0);
        assert_eq!(t.frame_at(0.1).interior()[0], 0.3 + 0.01 * 1.0);
        assert_eq!(t.frame_at(0.25).interior()[0], 0.3 + 0.01 * 3.0);
        assert_eq!(t.frame_at(9.0).interior()[0], 0.3 + 0.01 * 3.0);
    }
}
