//! Continuous problem data: the interval, the mass, the nonlinearity and the
//! potential.

mod nonlinearity;
mod potential;
mod validate;

pub use nonlinearity::{
    nonlinearity_registry, porous_medium_nonlinearity, FnNonlinearity, Nonlinearity, PorousMedium,
};
pub use potential::{
    cosine_potential, potential_registry, zero_potential, CosinePotential, FnPotential, Potential,
    ZeroPotential, CONVEXITY_SAMPLES,
};
pub use validate::{validate_spec, InvariantCheck, ValidationReport};

use crate::error::{Error, Result};
use crate::quadrature::{sampled_max, sampled_min};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("interval requires a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Problem data together with derived constants that the scheme and the
/// diagnostics use repeatedly.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: Interval,
    pub mass: f64,
    pub nonlinearity: Arc<dyn Nonlinearity>,
    pub potential: Arc<dyn Potential>,
    concavity: f64,
    convexity: f64,
    min_potential: f64,
    sup_drift_sq: f64,
}

impl ProblemSpec {
    pub fn new(
        domain: Interval,
        mass: f64,
        nonlinearity: Arc<dyn Nonlinearity>,
        potential: Arc<dyn Potential>,
    ) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let concavity = potential.concavity_bound(domain);
        let convexity = potential.convexity_bound(domain);
        let min_potential = sampled_min(domain.a, domain.b, CONVEXITY_SAMPLES, |x| potential.value(x));
        let sup_drift_sq = sampled_max(domain.a, domain.b, CONVEXITY_SAMPLES, |x| potential.dx(x).powi(2));
        Ok(Self { domain, mass, nonlinearity, potential, concavity, convexity, min_potential, sup_drift_sq })
    }

    /// The same problem with a different total mass.
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { mass, ..self.clone() })
    }

    /// `Λ = max_I(−V_xx) ≥ 0`.
    pub fn concavity(&self) -> f64 {
        self.concavity
    }

    /// `λ = max_I V_xx ≥ 0`.
    pub fn convexity(&self) -> f64 {
        self.convexity
    }

    pub fn min_potential(&self) -> f64 {
        self.min_potential
    }

    /// `sup_I V_x²`.
    pub fn sup_drift_sq(&self) -> f64 {
        self.sup_drift_sq
    }
}

/// Builds a problem from registry ids.
pub fn problem_from_ids(nonlinearity: &str, potential: &str, domain: Interval, mass: f64) -> Result<ProblemSpec> {
    let n = nonlinearity_registry().build(nonlinearity)?;
    let v = potential_registry().build(potential)?;
    ProblemSpec::new(domain, mass, n, v)
}
