//! Seeded random small instances exercising every structural check.

use super::estimates::{
    check_contraction, check_energy_estimates, check_min_max_principles, check_regularity_bound, ContractionReport,
    EnergyEstimates, RegularityReport, CONTRACTION_SLACK, ENERGY_SLACK,
};
use super::zform::zform_residual;
use crate::error::Result;
use crate::geometry::{MassGrid, ParticleConfig};
use crate::model::{cosine_potential, porous_medium_nonlinearity, zero_potential, Interval, Potential, ProblemSpec};
use crate::stepper::{evolve, StepConfig, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A small randomized problem: spec, time step, and a random starting configuration.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub spec: ProblemSpec,
    pub step: StepConfig,
    pub x0: ParticleConfig,
    pub steps: usize,
}

fn random_partition<R: Rng>(rng: &mut R, parts: usize, total: f64, spread: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..parts).map(|_| rng.gen_range(1.0..spread)).collect();
    let s: f64 = w.iter().sum();
    let mut acc = 0.0;
    let mut nodes = vec![0.0];
    for wi in &w {
        acc += wi / s * total;
        nodes.push(acc);
    }
    nodes[parts] = total;
    nodes
}

/// A random configuration on `grid` whose cell widths vary by at most a factor `spread`.
pub fn random_config<R: Rng>(rng: &mut R, grid: &Arc<MassGrid>, domain: Interval, spread: f64) -> Result<ParticleConfig> {
    let nodes = random_partition(rng, grid.cells(), domain.length(), spread);
    let interior = nodes[1..grid.cells()].iter().map(|x| domain.a + x).collect();
    ParticleConfig::new(grid.clone(), domain, interior)
}

/// Random instance with `K ∈ [2, max_cells]`, porous-medium exponent in {1.5, 2, 3},
/// either the cosine potential on `[−1, 1]` or `V ≡ 0` on `[0, 1]`.
pub fn random_instance<R: Rng>(rng: &mut R, max_cells: usize) -> Result<RandomInstance> {
    let cells = rng.gen_range(2..=max_cells.max(2));
    let m = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
    let (domain, potential): (Interval, Arc<dyn Potential>) = if rng.gen_bool(0.5) {
        (Interval::new(-1.0, 1.0)?, Arc::new(cosine_potential()))
    } else {
        (Interval::new(0.0, 1.0)?, Arc::new(zero_potential()))
    };
    let mass = rng.gen_range(0.5..2.0);
    let grid = Arc::new(MassGrid::from_nodes(random_partition(rng, cells, mass, 3.0))?);
    let spec = ProblemSpec::new(domain, mass, Arc::new(porous_medium_nonlinearity(m)?), potential)?;
    let x0 = random_config(rng, &grid, domain, 3.0)?;
    let tau = rng.gen_range(1e-3..5e-2);
    Ok(RandomInstance { spec, step: StepConfig::new(tau), x0, steps: rng.gen_range(3..=8) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub cells: usize,
    pub tau: f64,
    pub steps: usize,
    /// Largest relative deviation of a frame's mass from `M`.
    pub mass_error: f64,
    pub energy: EnergyEstimates,
    pub regularity: RegularityReport,
    /// No violated principle whose hypotheses were verified.
    pub principles_consistent: bool,
    pub min_cfl_satisfied: bool,
    pub max_cfl_satisfied: bool,
    pub max_zform_residual: f64,
    /// `100·tol·K`.
    pub zform_bound: f64,
}

impl InstanceOutcome {
    pub fn passed(&self) -> bool {
        self.mass_error <= 1e-12
            && self.energy.all_hold(ENERGY_SLACK)
            && self.regularity.holds(ENERGY_SLACK)
            && self.principles_consistent
            && self.max_zform_residual <= self.zform_bound
    }
}

/// Largest relative mass deviation over all frames.
pub fn max_mass_error(traj: &Trajectory) -> f64 {
    let m = traj.spec.mass;
    traj.configs.iter().map(|x| (x.total_mass() - m).abs() / m).fold(0.0, f64::max)
}

/// Largest l¹ norm of the z-form residual over the steps of a trajectory.
pub fn max_zform_residual(traj: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in traj.configs.windows(2) {
        let r = zform_residual(&traj.spec, traj.tau(), &w[0], &w[1])?;
        worst = worst.max(r.iter().map(|v| v.abs()).sum());
    }
    Ok(worst)
}

pub fn assess_trajectory(index: usize, traj: &Trajectory) -> Result<InstanceOutcome> {
    let principles = check_min_max_principles(traj, traj.horizon());
    Ok(InstanceOutcome {
        index,
        cells: traj.grid.cells(),
        tau: traj.tau(),
        steps: traj.steps(),
        mass_error: max_mass_error(traj),
        energy: check_energy_estimates(traj)?,
        regularity: check_regularity_bound(traj),
        principles_consistent: principles.consistent(),
        min_cfl_satisfied: principles.cfl.satisfied,
        max_cfl_satisfied: principles.max_cfl.satisfied,
        max_zform_residual: max_zform_residual(traj)?,
        zform_bound: 100.0 * traj.step_config.tol * traj.grid.cells() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySuiteReport {
    pub seed: u64,
    pub instances: Vec<InstanceOutcome>,
    pub contraction: Vec<ContractionReport>,
}

impl PropertySuiteReport {
    pub fn failed_instances(&self) -> Vec<usize> {
        self.instances.iter().filter(|i| !i.passed()).map(|i| i.index).collect()
    }

    pub fn contraction_holds(&self) -> bool {
        self.contraction.iter().all(|c| c.holds(CONTRACTION_SLACK))
    }
}

/// `count` random instances and `pairs` contraction pairs (two random starts on
/// the same grid and problem), all with `K ≤ max_cells`.
pub fn random_property_suite(seed: u64, count: usize, pairs: usize, max_cells: usize) -> Result<PropertySuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(count);
    for index in 0..count {
        let inst = random_instance(&mut rng, max_cells)?;
        let traj = evolve(&inst.spec, &inst.step, &inst.x0, inst.steps)?;
        instances.push(assess_trajectory(index, &traj)?);
    }
    let mut contraction = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let inst = random_instance(&mut rng, max_cells)?;
        let other = random_config(&mut rng, inst.x0.grid(), inst.spec.domain, 3.0)?;
        let a = evolve(&inst.spec, &inst.step, &inst.x0, inst.steps)?;
        let b = evolve(&inst.spec, &inst.step, &other, inst.steps)?;
        contraction.push(check_contraction(&a, &b)?);
    }
    Ok(PropertySuiteReport { seed, instances, contraction })
}
