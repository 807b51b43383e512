//! Initial densities used by the experiments.

use crate::error::{Error, Result};
use crate::geometry::{mass_grid_from_initial_datum_with_breaks, MassGrid, ParticleConfig};
use crate::model::Interval;
use crate::quadrature::sampled_min;
use crate::registry::Registry;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

pub trait InitialDatum: Send + Sync + Debug {
    fn id(&self) -> String;
    fn density(&self, x: f64) -> f64;
    /// Points where the density is discontinuous or kinked.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Reciprocal of `(240 − 280π² + 423π⁴)/(80π⁴) = ∫_{−1}^{1}(1.5 − cos 2πx)((x+½)⁴+1) dx`.
pub fn smooth_datum_normalization() -> f64 {
    let p2 = PI * PI;
    80.0 * p2 * p2 / (240.0 - 280.0 * p2 + 423.0 * p2 * p2)
}

fn smooth_profile(x: f64) -> f64 {
    (1.5 - (2.0 * PI * x).cos()) * ((x + 0.5).powi(4) + 1.0)
}

/// Smooth datum of unit mass on `[−1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothDatum;

impl InitialDatum for SmoothDatum {
    fn id(&self) -> String {
        "smooth-id".into()
    }
    fn density(&self, x: f64) -> f64 {
        smooth_datum_normalization() * smooth_profile(x)
    }
}

/// `0.1` for `|x| > 0.75` or `|x| < 0.25`, `0.9` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct StepDatum;

impl InitialDatum for StepDatum {
    fn id(&self) -> String {
        "step".into()
    }
    fn density(&self, x: f64) -> f64 {
        let a = x.abs();
        if !(0.25..=0.75).contains(&a) {
            0.1
        } else {
            0.9
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![-0.75, -0.25, 0.25, 0.75]
    }
}

/// Datum supported on `[−½, ½]`, lifted by `ε`; the lift is not renormalized.
#[derive(Debug, Clone, Copy)]
pub struct CompactSupportDatum {
    pub epsilon: f64,
}

impl InitialDatum for CompactSupportDatum {
    fn id(&self) -> String {
        format!("compact-support:epsilon={}", self.epsilon)
    }
    fn density(&self, x: f64) -> f64 {
        let bump = if x.abs() <= 0.5 { -(x - 0.5) * (x + 0.5) } else { 0.0 };
        smooth_profile(x) * bump + self.epsilon
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![-0.5, 0.5]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UniformDatum {
    pub value: f64,
}

impl InitialDatum for UniformDatum {
    fn id(&self) -> String {
        format!("uniform:value={}", self.value)
    }
    fn density(&self, _x: f64) -> f64 {
        self.value
    }
}

/// `base + A·sin(2πf(x − a)/|I|)`. For integer `f` the oscillation has zero mean
/// over `I`; with `f = K/2` it alternates sign from one equidistant cell to the next.
#[derive(Debug, Clone)]
pub struct PerturbedDatum {
    pub base: Arc<dyn InitialDatum>,
    pub amplitude: f64,
    pub frequency: f64,
    pub domain: Interval,
}

impl InitialDatum for PerturbedDatum {
    fn id(&self) -> String {
        format!("{}+oscillation(A={},f={})", self.base.id(), self.amplitude, self.frequency)
    }
    fn density(&self, x: f64) -> f64 {
        let s = (x - self.domain.a) / self.domain.length();
        self.base.density(x) + self.amplitude * (2.0 * PI * self.frequency * s).sin()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.base.breakpoints()
    }
}

/// Adds a high-frequency oscillation; rejects amplitudes that could destroy positivity.
pub fn perturb_initial_datum_high_frequency(
    base: Arc<dyn InitialDatum>,
    amplitude: f64,
    frequency: f64,
    domain: Interval,
) -> Result<PerturbedDatum> {
    if !(amplitude >= 0.0) || !(frequency > 0.0) {
        return Err(Error::InvalidParameter(format!("bad perturbation (amplitude {amplitude}, frequency {frequency})")));
    }
    let floor = sampled_min(domain.a, domain.b, 10_000, |x| base.density(x));
    if amplitude > 0.0 && !(amplitude < floor) {
        return Err(Error::InvalidParameter(format!(
            "perturbation amplitude {amplitude} is not below the datum minimum {floor}"
        )));
    }
    Ok(PerturbedDatum { base, amplitude, frequency, domain })
}

/// Mass grid and initial particles for a datum, honouring its breakpoints.
pub fn discretize_datum(
    datum: &dyn InitialDatum,
    domain: Interval,
    cells: usize,
    panels: usize,
) -> Result<(Arc<MassGrid>, ParticleConfig)> {
    mass_grid_from_initial_datum_with_breaks(|x| datum.density(x), &datum.breakpoints(), domain, cells, panels)
}

/// Registry of datum presets: `smooth-id`, `step`, `compact-support:epsilon=…`,
/// `uniform:value=…`.
pub fn datum_registry() -> Registry<dyn InitialDatum> {
    let mut r: Registry<dyn InitialDatum> = Registry::new("initial datum");
    r.register("smooth-id", |_| Ok(Arc::new(SmoothDatum)));
    r.register("step", |_| Ok(Arc::new(StepDatum)));
    r.register("compact-support", |p| {
        let epsilon = p.get_or("epsilon", 0.0);
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {epsilon}")));
        }
        Ok(Arc::new(CompactSupportDatum { epsilon }))
    });
    r.register("uniform", |p| {
        let value = p.get_or("value", 1.0);
        if !(value > 0.0) {
            return Err(Error::InvalidParameter(format!("uniform value must be > 0, got {value}")));
        }
        Ok(Arc::new(UniformDatum { value }))
    });
    r
}

pub fn preset_initial_datum(id: &str) -> Result<Arc<dyn InitialDatum>> {
    datum_registry().build(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss5_composite;

    fn ref_domain() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn smooth_datum_has_unit_mass() {
        let m = gauss5_composite(-1.0, 1.0, 200, |x| SmoothDatum.density(x));
        assert!((m - 1.0).abs() < 1e-8, "{m}");
    }

    #[test]
    fn step_and_compact_values() {
        assert_eq!(StepDatum.density(0.9), 0.1);
        assert_eq!(StepDatum.density(0.1), 0.1);
        assert_eq!(StepDatum.density(-0.5), 0.9);
        assert_eq!(CompactSupportDatum { epsilon: 0.0 }.density(0.75), 0.0);
        assert_eq!(CompactSupportDatum { epsilon: 0.01 }.density(0.75), 0.01);
    }

    #[test]
    fn step_discretization_is_exact() {
        let (g, p) = discretize_datum(&StepDatum, ref_domain(), 8, 4).unwrap();
        let cells = [0.1, 0.9, 0.9, 0.1, 0.1, 0.9, 0.9, 0.1];
        let mut acc = 0.0;
        for (k, c) in cells.iter().enumerate() {
            acc += c * 0.25;
            assert!((g.node(k + 1) - acc).abs() < 1e-14);
        }
        assert!((p.interior()[0] + 0.75).abs() < 1e-15);
        // Breakpoints inside cells are also handled exactly.
        let (g, _) = discretize_datum(&StepDatum, ref_domain(), 5, 4).unwrap();
        assert!((g.node(1) - 0.1 * 0.25 - 0.9 * 0.15).abs() < 1e-15);
    }

    #[test]
    fn compact_support_needs_epsilon() {
        let d = CompactSupportDatum { epsilon: 0.0 };
        assert!(matches!(discretize_datum(&d, ref_domain(), 8, 16), Err(Error::VanishingCell { .. })));
        assert!(discretize_datum(&CompactSupportDatum { epsilon: 1e-5 }, ref_domain(), 8, 16).is_ok());
    }

    #[test]
    fn registry_parses_parameters() {
        let d = preset_initial_datum("compact-support:epsilon=0.01").unwrap();
        assert_eq!(d.density(0.9), 0.01);
        assert_eq!(preset_initial_datum("uniform:value=2").unwrap().density(0.3), 2.0);
        assert!(matches!(preset_initial_datum("nope"), Err(Error::UnknownPreset { .. })));
    }

    #[test]
    fn perturbation_properties() {
        let dom = ref_domain();
        let base: Arc<dyn InitialDatum> = Arc::new(SmoothDatum);
        let same = perturb_initial_datum_high_frequency(base.clone(), 0.0, 10.0, dom).unwrap();
        assert_eq!(same.density(0.3), base.density(0.3));
        assert!(perturb_initial_datum_high_frequency(base.clone(), 0.5, 10.0, dom).is_err());
        let k = 40;
        let pert = perturb_initial_datum_high_frequency(base.clone(), 0.1, k as f64 / 2.0, dom).unwrap();
        let (g0, _) = discretize_datum(base.as_ref(), dom, k, 64).unwrap();
        let (g1, _) = discretize_datum(&pert, dom, k, 64).unwrap();
        assert!((g0.mass() - g1.mass()).abs() < 1e-10);
        let l1: f64 = g0.deltas().iter().zip(g1.deltas()).map(|(a, b)| (a - b).abs()).sum();
        assert!((l1 - 0.1 * 2.0 * 2.0 / PI).abs() < 1e-6, "{l1}");
    }
}
