//! Executable checks of the discrete structure: energy estimates, contraction,
//! min/max principles, regularity, the z-form Euler–Lagrange system and the
//! consistency order.

mod consistency;
mod estimates;
mod fit;
mod suite;
mod zform;

pub use consistency::{
    consistency_residual, consistency_study, manufactured_registry, CellsRow, ConsistencyPlan, ConsistencyReport,
    ManufacturedSolution, SineManufactured, StationaryLinear, TauRow,
};
pub use estimates::{
    check_contraction, check_energy_estimates, check_min_max_principles, check_regularity_bound, regularity_constant,
    tv_of_phi_squared, ContractionReport, EnergyEstimates, Estimate, PrincipleReport, PrincipleSample,
    RegularityReport, CONTRACTION_SLACK, ENERGY_SLACK,
};
pub use fit::{fit_loglog_slope, SlopeFit, MIN_FIT_POINTS};
pub use suite::{
    assess_trajectory, max_mass_error, max_zform_residual, random_config, random_instance, random_property_suite,
    InstanceOutcome, PropertySuiteReport, RandomInstance,
};
pub use zform::{theta_support_mismatches, zform_residual};
