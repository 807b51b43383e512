#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wgflow::diagnostics::{random_property_suite, ENERGY_SLACK};
use wgflow::experiment::{
    convergence_space, convergence_time, run_consistency, run_experiment, run_perturbation_demo, run_positivity_sweep,
    ExperimentConfig, ReferenceSpec, FINE_REFERENCE_CELLS,
};
use wgflow::io::write_json;
use wgflow::Error;

/// Lagrangian minimizing-movement solver for ∂ₜu = P(u)ₓₓ + (Vₓu)ₓ.
#[derive(Debug, Parser)]
#[command(name = "wgflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one configuration; writes trajectory.csv, energy.csv, diagnostics.json.
    Solve(Overrides),
    /// Terminal L¹ error versus K at fixed τ.
    ConvergeSpace(Overrides),
    /// Terminal L¹ error versus τ at fixed K²τ.
    ConvergeTime(Overrides),
    /// Compact-support datum lifted by each ε.
    PositivitySweep(Overrides),
    /// Distance between perturbed and unperturbed trajectories over time.
    PerturbDemo(Overrides),
    /// Residual of the scheme on a manufactured solution.
    Consistency(Overrides),
    /// Structure checks on the configured run plus a seeded random suite.
    Diagnose {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long, default_value_t = 50)]
        max_cells: usize,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `<nonlinearity>+<potential>`, e.g. `porous-medium:m=2+cosine`.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    datum: Option<String>,
    /// Cell count; a comma list sets the K list of converge-space.
    #[arg(long = "K", value_delimiter = ',')]
    cells: Vec<usize>,
    /// Step size; a comma list sets the τ list of converge-time.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<f64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `K,tau` of a computed reference, or a stored trajectory CSV.
    #[arg(long)]
    reference: Option<String>,
    /// Reference at K = 5000 instead of the default.
    #[arg(long)]
    fine_reference: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_reference(s: &str) -> ReferenceSpec {
    if let Some((k, t)) = s.split_once(',') {
        if let (Ok(cells), Ok(tau)) = (k.trim().parse(), t.trim().parse()) {
            return ReferenceSpec::Computed { cells, tau };
        }
    }
    ReferenceSpec::Stored { path: PathBuf::from(s) }
}

impl Overrides {
    fn apply(&self) -> wgflow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_json_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.problem {
            cfg.problem = v.clone();
        }
        if let Some(v) = &self.datum {
            cfg.datum = v.clone();
        }
        match self.cells.as_slice() {
            [] => {}
            [k] => cfg.cells = *k,
            ks => {
                cfg.cells = *ks.iter().max().expect("non-empty");
                cfg.cells_list = ks.to_vec();
            }
        }
        match self.tau.as_slice() {
            [] => {}
            [t] => cfg.tau = *t,
            ts => {
                cfg.tau = ts.iter().cloned().fold(f64::INFINITY, f64::min);
                cfg.tau_list = ts.to_vec();
            }
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.ratio {
            cfg.ratio = v;
        }
        if !self.epsilon.is_empty() {
            cfg.epsilon_list = self.epsilon.clone();
        }
        if let Some(v) = &self.out {
            cfg.output = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(r) = &self.reference {
            cfg.reference = Some(parse_reference(r));
        } else if self.fine_reference {
            cfg.reference = Some(ReferenceSpec::Computed { cells: FINE_REFERENCE_CELLS, tau: cfg.tau });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn explicit_reference(&self) -> bool {
        self.reference.is_some() || self.fine_reference
    }
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    ChecksFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn print<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(o) => {
            let out = run_experiment(&o.apply()?)?;
            let d = &out.diagnostics;
            eprintln!(
                "solved K={} tau={} steps={} newton={}",
                d.cells,
                d.tau,
                d.steps,
                d.per_step.iter().map(|s| s.newton_iterations).sum::<usize>()
            );
        }
        Command::ConvergeSpace(o) => print(&convergence_space(&o.apply()?)?),
        Command::ConvergeTime(o) => {
            let cfg = o.apply()?;
            let reference = if o.explicit_reference() { cfg.reference.clone() } else { None };
            print(&convergence_time(&cfg, reference)?);
        }
        Command::PositivitySweep(o) => print(&run_positivity_sweep(&o.apply()?)?),
        Command::PerturbDemo(o) => print(&run_perturbation_demo(&o.apply()?)?),
        Command::Consistency(o) => print(&run_consistency(&o.apply()?)?),
        Command::Diagnose { overrides, instances, pairs, max_cells } => {
            let cfg = overrides.apply()?;
            let run = run_experiment(&cfg)?.diagnostics;
            let suite = random_property_suite(cfg.seed, instances, pairs, max_cells)?;
            write_json(&cfg.output.join("suite.json"), &suite)?;
            let mut failures = Vec::new();
            if run.max_mass_error > 1e-12 {
                failures.push("mass".to_string());
            }
            if !run.energy.all_hold(ENERGY_SLACK) {
                failures.push("energy estimates".into());
            }
            if !run.principles.consistent() {
                failures.push("min/max principles".into());
            }
            if !run.regularity.holds(ENERGY_SLACK) {
                failures.push("regularity".into());
            }
            if run.max_zform_residual > run.zform_bound {
                failures.push("z-form residual".into());
            }
            let failed = suite.failed_instances();
            if !failed.is_empty() {
                failures.push(format!("random instances {failed:?}"));
            }
            if !suite.contraction_holds() {
                failures.push("contraction".into());
            }
            println!("configured run and {instances} random instances, {pairs} contraction pairs");
            if !failures.is_empty() {
                return Err(Failure::ChecksFailed(failures.join(", ")));
            }
            println!("all checks hold");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(2)
            } else if matches!(e, Error::Io(_)) {
                ExitCode::from(1)
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::ChecksFailed(what)) => {
            eprintln!("checks failed: {what}");
            ExitCode::from(1)
        }
    }
}
