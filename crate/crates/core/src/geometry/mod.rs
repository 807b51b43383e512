//! Mass grid, particle configurations and the transport geometry between them.

mod mass_grid;
mod matrices;
mod particles;

pub use mass_grid::{
    mass_grid_from_initial_datum, mass_grid_from_initial_datum_with_breaks, uniform_mass_grid, MassGrid, DEFAULT_QUADRATURE_PANELS};
pub use matrices::{
    assemble_w, assemble_wtilde, theta_quadratic_eval, theta_support, w_quadratic_form, WassersteinMatrix, ZFormMatrix,
};
pub use particles::{
    density_from_particles, difference_quotients, first_ordering_violation, inverse_cdf_eval, l1_distance,
    wasserstein_distance, ParticleConfig, PiecewiseDensity,
};
