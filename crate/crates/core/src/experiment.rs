//! Experiment runner: single runs with full diagnostics, convergence studies in
//! space and time, the positivity sweep, the weak-data demo and the consistency
//! study. Every run writes plot-ready CSV plus a JSON summary.

use crate::datum::{discretize_datum, perturb_initial_datum_high_frequency, preset_initial_datum, InitialDatum};
use crate::diagnostics::{
    check_energy_estimates, check_min_max_principles, check_regularity_bound, consistency_study, fit_loglog_slope,
    manufactured_registry, max_mass_error, max_zform_residual, ConsistencyPlan, ConsistencyReport, EnergyEstimates,
    PrincipleReport, RegularityReport, SlopeFit,
};
use crate::error::{Error, Result};
use crate::geometry::{l1_distance, MassGrid, ParticleConfig, PiecewiseDensity, DEFAULT_QUADRATURE_PANELS};
use crate::io::{
    atomic_write, density_csv, energy_csv, errors_csv, read_trajectory_csv, table_csv, trajectory_csv, write_json,
};
use crate::model::{nonlinearity_registry, potential_registry, validate_spec, Interval, ProblemSpec};
use crate::stepper::{evolve, steps_for_horizon, StepConfig, StepStats, Trajectory};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Where the reference solution of a convergence study comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSpec {
    Computed {
        #[serde(rename = "K")]
        cells: usize,
        tau: f64,
    },
    /// A trajectory CSV written by an earlier `solve`.
    Stored { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    /// Oscillation periods over the interval; `K/2` when absent.
    pub frequency: Option<f64>,
}

/// Full-scale reference resolution (`--fine-reference`).
pub const FINE_REFERENCE_CELLS: usize = 5000;
/// Reference resolution used by default (desk-scale).
pub const DEFAULT_REFERENCE_CELLS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `<nonlinearity>+<potential>`, e.g. `porous-medium:m=2+cosine`.
    pub problem: String,
    pub domain: [f64; 2],
    pub datum: String,
    #[serde(rename = "K")]
    pub cells: usize,
    pub tau: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub reference: Option<ReferenceSpec>,
    pub output: PathBuf,
    pub seed: u64,
    pub quadrature_panels: usize,
    pub tol: f64,
    pub max_newton_iter: usize,
    pub max_dampings: usize,
    #[serde(rename = "K_list")]
    pub cells_list: Vec<usize>,
    pub tau_list: Vec<f64>,
    /// Parabolic mesh ratio `K²τ`.
    pub ratio: f64,
    pub epsilon_list: Vec<f64>,
    pub perturbation: Option<PerturbationSpec>,
    pub manufactured: String,
    pub consistency: Option<ConsistencyPlan>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "porous-medium:m=2+cosine".into(),
            domain: [-1.0, 1.0],
            datum: "smooth-id".into(),
            cells: 200,
            tau: 1e-2,
            horizon: 0.2,
            reference: Some(ReferenceSpec::Computed { cells: DEFAULT_REFERENCE_CELLS, tau: 1e-2 }),
            output: PathBuf::from("out"),
            seed: 0,
            quadrature_panels: DEFAULT_QUADRATURE_PANELS,
            tol: 1e-8,
            max_newton_iter: 50,
            max_dampings: 60,
            cells_list: vec![25, 50, 100, 200, 400],
            tau_list: vec![1e-2, 5e-3, 1e-3, 5e-4],
            ratio: 0.257,
            epsilon_list: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            perturbation: None,
            manufactured: "sine".into(),
            consistency: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&s)?)
    }

    pub fn interval(&self) -> Result<Interval> {
        Interval::new(self.domain[0], self.domain[1])
    }

    pub fn step_config(&self, tau: f64) -> StepConfig {
        StepConfig { tau, tol: self.tol, max_newton_iter: self.max_newton_iter, max_dampings: self.max_dampings }
    }

    pub fn validate(&self) -> Result<()> {
        self.interval()?;
        if self.cells < 2 {
            return Err(Error::InvalidParameter(format!("K must be at least 2, got {}", self.cells)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.horizon >= self.tau) {
            return Err(Error::InvalidParameter(format!("T = {} must be at least tau = {}", self.horizon, self.tau)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.quadrature_panels == 0 {
            return Err(Error::InvalidParameter("quadrature_panels must be positive".into()));
        }
        parse_problem(&self.problem, self.interval()?, 1.0)?;
        Ok(())
    }
}

/// Builds the problem from `<nonlinearity>+<potential>`.
pub fn parse_problem(id: &str, domain: Interval, mass: f64) -> Result<ProblemSpec> {
    let (n, v) = id
        .split_once('+')
        .ok_or_else(|| Error::InvalidParameter(format!("problem `{id}` must read <nonlinearity>+<potential>")))?;
    ProblemSpec::new(domain, mass, nonlinearity_registry().build(n.trim())?, potential_registry().build(v.trim())?)
}

/// A discretized initial value problem; `spec.mass` is the discrete mass.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spec: ProblemSpec,
    pub grid: Arc<MassGrid>,
    pub x0: ParticleConfig,
    pub datum: Arc<dyn InitialDatum>,
}

fn datum_for(cfg: &ExperimentConfig, cells: usize) -> Result<Arc<dyn InitialDatum>> {
    let base = preset_initial_datum(&cfg.datum)?;
    match cfg.perturbation {
        None => Ok(base),
        Some(p) => Ok(Arc::new(perturb_initial_datum_high_frequency(
            base,
            p.amplitude,
            p.frequency.unwrap_or(cells as f64 / 2.0),
            cfg.interval()?,
        )?)),
    }
}

pub fn setup_with_datum(cfg: &ExperimentConfig, datum: Arc<dyn InitialDatum>, cells: usize) -> Result<Setup> {
    let domain = cfg.interval()?;
    let (grid, x0) = discretize_datum(datum.as_ref(), domain, cells, cfg.quadrature_panels)?;
    let spec = parse_problem(&cfg.problem, domain, grid.mass())?;
    Ok(Setup { spec, grid, x0, datum })
}

pub fn setup(cfg: &ExperimentConfig, cells: usize) -> Result<Setup> {
    setup_with_datum(cfg, datum_for(cfg, cells)?, cells)
}

pub fn solve_trajectory(cfg: &ExperimentConfig, cells: usize, tau: f64) -> Result<Trajectory> {
    let s = setup(cfg, cells)?;
    evolve(&s.spec, &cfg.step_config(tau), &s.x0, steps_for_horizon(tau, cfg.horizon))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    #[serde(rename = "K")]
    pub cells: usize,
    pub mass: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub alpha: f64,
}

impl From<&MassGrid> for GridSummary {
    fn from(g: &MassGrid) -> Self {
        Self { cells: g.cells(), mass: g.mass(), delta_min: g.delta_min(), delta_max: g.delta_max(), alpha: g.alpha() }
    }
}

/// Everything checkable about one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub problem: String,
    pub datum: String,
    #[serde(rename = "K")]
    pub cells: usize,
    pub tau: f64,
    pub steps: usize,
    pub grid: GridSummary,
    pub validation_failures: Vec<String>,
    pub max_mass_error: f64,
    pub energy: EnergyEstimates,
    pub principles: PrincipleReport,
    pub regularity: RegularityReport,
    pub max_zform_residual: f64,
    pub zform_bound: f64,
    pub per_step: Vec<StepStats>,
}

pub fn diagnose_trajectory(traj: &Trajectory, datum: &str) -> Result<RunDiagnostics> {
    let validation = validate_spec(&traj.spec, 100);
    Ok(RunDiagnostics {
        problem: format!("{}+{}", traj.spec.nonlinearity.id(), traj.spec.potential.id()),
        datum: datum.to_string(),
        cells: traj.grid.cells(),
        tau: traj.tau(),
        steps: traj.steps(),
        grid: GridSummary::from(traj.grid.as_ref()),
        validation_failures: validation.failures().map(|c| c.name.clone()).collect(),
        max_mass_error: max_mass_error(traj),
        energy: check_energy_estimates(traj)?,
        principles: check_min_max_principles(traj, traj.horizon()),
        regularity: check_regularity_bound(traj),
        max_zform_residual: max_zform_residual(traj)?,
        zform_bound: 100.0 * traj.step_config.tol * traj.grid.cells() as f64,
        per_step: traj.per_step.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
struct RunMetadata<'a> {
    config: &'a ExperimentConfig,
    diagnostics: &'a RunDiagnostics,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub diagnostics: RunDiagnostics,
}

/// Solves the configured problem and writes `trajectory.csv`, `energy.csv` and
/// `diagnostics.json` to the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let s = setup(cfg, cfg.cells)?;
    let trajectory = evolve(&s.spec, &cfg.step_config(cfg.tau), &s.x0, steps_for_horizon(cfg.tau, cfg.horizon))?;
    let diagnostics = diagnose_trajectory(&trajectory, &s.datum.id())?;
    let out = &cfg.output;
    atomic_write(&out.join("trajectory.csv"), &trajectory_csv(&trajectory)?)?;
    atomic_write(&out.join("energy.csv"), &energy_csv(&trajectory)?)?;
    write_json(&out.join("diagnostics.json"), &RunMetadata { config: cfg, diagnostics: &diagnostics })?;
    Ok(RunOutcome { trajectory, diagnostics })
}

/// Densities of a reference solution, sampled piecewise constantly in time.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub description: String,
    pub tau: f64,
    pub frames: Vec<PiecewiseDensity>,
}

impl ReferenceSolution {
    pub fn from_trajectory(description: String, traj: &Trajectory) -> Self {
        Self { description, tau: traj.tau(), frames: traj.configs.iter().map(|x| x.density()).collect() }
    }

    /// Frame `⌈t/τ⌉`.
    pub fn at(&self, t: f64) -> &PiecewiseDensity {
        let n = (t / self.tau - 1e-9).ceil().max(0.0) as usize;
        &self.frames[n.min(self.frames.len() - 1)]
    }

    pub fn horizon(&self) -> f64 {
        self.tau * (self.frames.len() - 1) as f64
    }
}

pub fn load_reference(cfg: &ExperimentConfig, spec: &ReferenceSpec) -> Result<ReferenceSolution> {
    match spec {
        ReferenceSpec::Computed { cells, tau } => {
            let t = solve_trajectory(cfg, *cells, *tau)?;
            Ok(ReferenceSolution::from_trajectory(format!("computed K={cells} tau={tau}"), &t))
        }
        ReferenceSpec::Stored { path } => {
            let frames = read_trajectory_csv(path, cfg.interval()?)
                .map_err(|e| Error::MissingReference(format!("{}: {e}", path.display())))?;
            if frames.len() < 2 {
                return Err(Error::MissingReference(format!("{} needs at least two frames", path.display())));
            }
            let tau = frames[1].t - frames[0].t;
            Ok(ReferenceSolution {
                description: format!("stored {}", path.display()),
                tau,
                frames: frames.into_iter().map(|f| f.density).collect(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// `K` for the space study, `τ` for the time study.
    pub param: f64,
    #[serde(rename = "K")]
    pub cells: usize,
    pub tau: f64,
    pub error_l1: f64,
    pub cfl_satisfied: bool,
    pub cfl_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub study: String,
    pub reference: String,
    pub horizon: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Absent when an error is zero (e.g. self-comparison) or too few points.
    pub fit: Option<SlopeFit>,
    /// How `K` was chosen per `τ` (time study only).
    pub cells_rule: Option<String>,
}

struct RunError {
    row: ConvergenceRow,
    over_time: Vec<(f64, f64)>,
}

fn compare_run(cfg: &ExperimentConfig, reference: &ReferenceSolution, param: f64, cells: usize, tau: f64) -> Result<RunError> {
    let s = setup(cfg, cells)?;
    let step = cfg.step_config(tau);
    let traj = evolve(&s.spec, &step, &s.x0, steps_for_horizon(tau, cfg.horizon))?;
    let over_time = (0..=traj.steps())
        .map(|n| {
            let t = traj.time(n);
            Ok((t, l1_distance(&traj.configs[n].density(), reference.at(t))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let error_l1 = l1_distance(&traj.last().density(), reference.at(cfg.horizon))?;
    let cfl = crate::stepper::check_inverse_cfl(&s.spec, &s.grid, &step, s.x0.density().min(), cfg.horizon);
    Ok(RunError {
        row: ConvergenceRow { param, cells, tau, error_l1, cfl_satisfied: cfl.satisfied, cfl_ratio: cfl.ratio },
        over_time,
    })
}

fn write_convergence(out: &Path, report: &ConvergenceReport, runs: &[RunError]) -> Result<()> {
    let rows: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.param, r.error_l1)).collect();
    atomic_write(&out.join("errors.csv"), &errors_csv(&rows)?)?;
    let series: Vec<Vec<f64>> = runs
        .iter()
        .flat_map(|r| r.over_time.iter().map(move |(t, e)| vec![r.row.param, *t, *e]))
        .collect();
    atomic_write(&out.join("error_vs_time.csv"), &table_csv(&["param", "t", "error_L1"], &series)?)?;
    write_json(&out.join("convergence.json"), report)
}

fn check_reference_horizon(reference: &ReferenceSolution, horizon: f64) -> Result<()> {
    if reference.horizon() + 1e-9 < horizon {
        return Err(Error::MissingReference(format!(
            "{} ends at t = {} before T = {horizon}",
            reference.description,
            reference.horizon()
        )));
    }
    Ok(())
}

/// Terminal L¹ error against the reference for every `K` in `cells_list` at the
/// fixed `tau`.
pub fn convergence_space(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let reference_spec = cfg.reference.clone().ok_or_else(|| Error::MissingReference("no reference configured".into()))?;
    let mut cells = cfg.cells_list.clone();
    cells.sort_unstable();
    let reference = load_reference(cfg, &reference_spec)?;
    check_reference_horizon(&reference, cfg.horizon)?;
    let runs: Vec<RunError> = cells
        .par_iter()
        .map(|&k| compare_run(cfg, &reference, k as f64, k, cfg.tau))
        .collect::<Result<_>>()?;
    let rows: Vec<ConvergenceRow> = runs.iter().map(|r| r.row).collect();
    let fit = fit_loglog_slope(&rows.iter().map(|r| r.param).collect::<Vec<_>>(), &rows.iter().map(|r| r.error_l1).collect::<Vec<_>>()).ok();
    let report = ConvergenceReport {
        study: "space".into(),
        reference: reference.description.clone(),
        horizon: cfg.horizon,
        rows,
        fit,
        cells_rule: None,
    };
    write_convergence(&cfg.output, &report, &runs)?;
    Ok(report)
}

/// `K = round(sqrt(ratio/τ))`.
pub fn cells_for_ratio(ratio: f64, tau: f64) -> usize {
    ((ratio / tau).sqrt().round() as usize).max(2)
}

/// Reference for the time study: the smallest `τ` halved, with `K` from the ratio.
pub fn default_time_reference(cfg: &ExperimentConfig) -> ReferenceSpec {
    let tau_min = cfg.tau_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let tau = 0.5 * tau_min;
    ReferenceSpec::Computed { cells: cells_for_ratio(cfg.ratio, tau), tau }
}

/// Simultaneous refinement at a fixed parabolic mesh ratio `K²τ`.
pub fn convergence_time(cfg: &ExperimentConfig, reference: Option<ReferenceSpec>) -> Result<ConvergenceReport> {
    cfg.validate()?;
    if !(cfg.ratio > 0.0) {
        return Err(Error::InvalidParameter(format!("ratio must be positive, got {}", cfg.ratio)));
    }
    let mut taus = cfg.tau_list.clone();
    taus.sort_by(|a, b| b.total_cmp(a));
    let reference_spec = reference.unwrap_or_else(|| default_time_reference(cfg));
    let reference = load_reference(cfg, &reference_spec)?;
    check_reference_horizon(&reference, cfg.horizon)?;
    let runs: Vec<RunError> = taus
        .par_iter()
        .map(|&tau| compare_run(cfg, &reference, tau, cells_for_ratio(cfg.ratio, tau), tau))
        .collect::<Result<_>>()?;
    let rows: Vec<ConvergenceRow> = runs.iter().map(|r| r.row).collect();
    let fit = fit_loglog_slope(&rows.iter().map(|r| r.tau).collect::<Vec<_>>(), &rows.iter().map(|r| r.error_l1).collect::<Vec<_>>()).ok();
    let report = ConvergenceReport {
        study: "time".into(),
        reference: reference.description.clone(),
        horizon: cfg.horizon,
        rows,
        fit,
        cells_rule: Some(format!("K = round(sqrt({}/tau))", cfg.ratio)),
    };
    write_convergence(&cfg.output, &report, &runs)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityRun {
    pub epsilon: f64,
    pub mass: f64,
    pub initial_min: f64,
    /// `min_x uⁿ` per frame.
    pub min_density: Vec<f64>,
    /// `e^{−2TΛ}·min u⁰`.
    pub min_bound_at_horizon: f64,
    pub cfl_satisfied: bool,
    pub cfl_ratio: f64,
    #[serde(skip)]
    pub terminal: Option<PiecewiseDensity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub runs: Vec<PositivityRun>,
    /// L¹ distance between terminal profiles of consecutive `ε`.
    pub consecutive_l1: Vec<(f64, f64, f64)>,
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:e}")
}

/// One run per `ε` with the compact-support datum lifted by `ε` (mass `M + ε|I|`,
/// not renormalized).
pub fn run_positivity_sweep(cfg: &ExperimentConfig) -> Result<PositivityReport> {
    cfg.validate()?;
    let mut eps = cfg.epsilon_list.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    let runs: Vec<PositivityRun> = eps
        .par_iter()
        .map(|&e| {
            let datum = preset_initial_datum(&format!("compact-support:epsilon={e}"))?;
            let s = setup_with_datum(cfg, datum, cfg.cells)?;
            let step = cfg.step_config(cfg.tau);
            let traj = evolve(&s.spec, &step, &s.x0, steps_for_horizon(cfg.tau, cfg.horizon))?;
            let initial = s.x0.density();
            let out = cfg.output.join(format!("eps_{}", eps_tag(e)));
            atomic_write(&out.join("initial.csv"), &density_csv(&initial)?)?;
            let terminal = traj.last().density();
            atomic_write(&out.join("terminal.csv"), &density_csv(&terminal)?)?;
            let cfl = crate::stepper::check_inverse_cfl(&s.spec, &s.grid, &step, initial.min(), cfg.horizon);
            Ok(PositivityRun {
                epsilon: e,
                mass: s.spec.mass,
                initial_min: initial.min(),
                min_density: traj.configs.iter().map(|x| x.density().min()).collect(),
                min_bound_at_horizon: (-2.0 * traj.horizon() * s.spec.concavity()).exp() * initial.min(),
                cfl_satisfied: cfl.satisfied,
                cfl_ratio: cfl.ratio,
                terminal: Some(terminal),
            })
        })
        .collect::<Result<_>>()?;
    let mut consecutive_l1 = Vec::new();
    for w in runs.windows(2) {
        let (a, b) = (w[0].terminal.as_ref().expect("set above"), w[1].terminal.as_ref().expect("set above"));
        consecutive_l1.push((w[0].epsilon, w[1].epsilon, l1_distance(a, b)?));
    }
    let report = PositivityReport { runs, consecutive_l1 };
    write_json(&cfg.output.join("positivity.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub amplitude: f64,
    pub frequency: f64,
    pub initial_l1: f64,
    pub terminal_l1: f64,
    /// `(t, ‖u_ε(t) − u(t)‖_{L¹})` per frame.
    pub l1_over_time: Vec<(f64, f64)>,
}

impl PerturbationReport {
    pub fn damping_ratio(&self) -> f64 {
        self.terminal_l1 / self.initial_l1
    }
}

/// Runs the configured datum with and without a high-frequency perturbation
/// (default amplitude 0.1, `K/2` periods) and records their L¹ distance over time.
pub fn run_perturbation_demo(cfg: &ExperimentConfig) -> Result<PerturbationReport> {
    cfg.validate()?;
    let p = cfg.perturbation.unwrap_or(PerturbationSpec { amplitude: 0.1, frequency: None });
    let frequency = p.frequency.unwrap_or(cfg.cells as f64 / 2.0);
    let plain = ExperimentConfig { perturbation: None, ..cfg.clone() };
    let pert = ExperimentConfig { perturbation: Some(PerturbationSpec { amplitude: p.amplitude, frequency: Some(frequency) }), ..cfg.clone() };
    let (a, b) = rayon::join(
        || solve_trajectory(&plain, cfg.cells, cfg.tau),
        || solve_trajectory(&pert, cfg.cells, cfg.tau),
    );
    let (a, b) = (a?, b?);
    let l1_over_time = a
        .configs
        .iter()
        .zip(&b.configs)
        .enumerate()
        .map(|(n, (x, y))| Ok((a.time(n), l1_distance(&x.density(), &y.density())?)))
        .collect::<Result<Vec<_>>>()?;
    let report = PerturbationReport {
        amplitude: p.amplitude,
        frequency,
        initial_l1: l1_over_time[0].1,
        terminal_l1: l1_over_time[l1_over_time.len() - 1].1,
        l1_over_time,
    };
    let out = &cfg.output;
    atomic_write(&out.join("initial_plain.csv"), &density_csv(&a.initial().density())?)?;
    atomic_write(&out.join("initial_perturbed.csv"), &density_csv(&b.initial().density())?)?;
    let series: Vec<Vec<f64>> = report.l1_over_time.iter().map(|(t, e)| vec![*t, *e]).collect();
    atomic_write(&out.join("perturbation_l1.csv"), &table_csv(&["t", "error_L1"], &series)?)?;
    write_json(&out.join("perturbation.json"), &report)?;
    Ok(report)
}

/// Consistency study for the configured manufactured solution; the problem's
/// nonlinearity and potential are placed on the solution's domain.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<ConsistencyReport> {
    let sol = manufactured_registry().build(&cfg.manufactured)?;
    let spec = parse_problem(&cfg.problem, sol.domain(), sol.mass())?;
    let plan = cfg.consistency.clone().unwrap_or_default();
    let report = consistency_study(&spec, sol.as_ref(), &plan)?;
    let out = &cfg.output;
    let tau_rows: Vec<Vec<f64>> = report
        .tau_rows
        .iter()
        .map(|r| vec![r.tau, r.residual_inf, r.successive_difference.unwrap_or(f64::NAN)])
        .collect();
    atomic_write(&out.join("consistency_tau.csv"), &table_csv(&["tau", "residual_inf", "successive_difference"], &tau_rows)?)?;
    let cell_rows: Vec<Vec<f64>> =
        report.cell_rows.iter().map(|r| vec![r.cells as f64, r.delta, r.residual_inf]).collect();
    atomic_write(&out.join("consistency_delta.csv"), &table_csv(&["K", "delta", "residual_inf"], &cell_rows)?)?;
    write_json(&out.join("consistency.json"), &report)?;
    Ok(report)
}
