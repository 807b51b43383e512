//! External potentials `V` driving the drift term.

use crate::model::Interval;
use crate::quadrature::sampled_max;
use crate::registry::Registry;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Number of samples used when convexity constants are not known analytically.
pub const CONVEXITY_SAMPLES: usize = 10_000;

pub trait Potential: Send + Sync + fmt::Debug {
    fn id(&self) -> String;

    fn value(&self, x: f64) -> f64;
    fn dx(&self, x: f64) -> f64;
    fn dxx(&self, x: f64) -> f64;

    /// A fixed antiderivative of `V`, when one is available in closed form.
    fn antiderivative(&self, _x: f64) -> Option<f64> {
        None
    }

    fn has_antiderivative(&self) -> bool {
        self.antiderivative(0.0).is_some()
    }

    /// `Λ = max_I(−V_xx)`, floored at zero.
    fn concavity_bound(&self, domain: Interval) -> f64 {
        sampled_max(domain.a, domain.b, CONVEXITY_SAMPLES, |x| -self.dxx(x)).max(0.0)
    }

    /// `λ = max_I V_xx`, floored at zero.
    fn convexity_bound(&self, domain: Interval) -> f64 {
        sampled_max(domain.a, domain.b, CONVEXITY_SAMPLES, |x| self.dxx(x)).max(0.0)
    }
}

/// `V(x) = −cos(πx)/π`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CosinePotential;

impl CosinePotential {
    fn is_reference_domain(domain: Interval) -> bool {
        domain.a <= -1.0 && domain.b >= 1.0
    }
}

impl Potential for CosinePotential {
    fn id(&self) -> String {
        "cosine".into()
    }
    fn value(&self, x: f64) -> f64 {
        -(PI * x).cos() / PI
    }
    fn dx(&self, x: f64) -> f64 {
        (PI * x).sin()
    }
    fn dxx(&self, x: f64) -> f64 {
        PI * (PI * x).cos()
    }
    fn antiderivative(&self, x: f64) -> Option<f64> {
        Some(-(PI * x).sin() / (PI * PI))
    }
    fn concavity_bound(&self, domain: Interval) -> f64 {
        if Self::is_reference_domain(domain) {
            PI
        } else {
            sampled_max(domain.a, domain.b, CONVEXITY_SAMPLES, |x| -self.dxx(x)).max(0.0)
        }
    }
    fn convexity_bound(&self, domain: Interval) -> f64 {
        if Self::is_reference_domain(domain) {
            PI
        } else {
            sampled_max(domain.a, domain.b, CONVEXITY_SAMPLES, |x| self.dxx(x)).max(0.0)
        }
    }
}

/// `V ≡ 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn id(&self) -> String {
        "zero".into()
    }
    fn value(&self, _x: f64) -> f64 {
        0.0
    }
    fn dx(&self, _x: f64) -> f64 {
        0.0
    }
    fn dxx(&self, _x: f64) -> f64 {
        0.0
    }
    fn antiderivative(&self, _x: f64) -> Option<f64> {
        Some(0.0)
    }
    fn concavity_bound(&self, _domain: Interval) -> f64 {
        0.0
    }
    fn convexity_bound(&self, _domain: Interval) -> f64 {
        0.0
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A potential given by explicit functions; the antiderivative is optional, in
/// which case potential integrals fall back to quadrature.
#[derive(Clone)]
pub struct FnPotential {
    pub name: String,
    pub value: ScalarFn,
    pub dx: ScalarFn,
    pub dxx: ScalarFn,
    pub antiderivative: Option<ScalarFn>,
}

impl fmt::Debug for FnPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPotential")
            .field("name", &self.name)
            .field("antiderivative", &self.antiderivative.is_some())
            .finish_non_exhaustive()
    }
}

impl Potential for FnPotential {
    fn id(&self) -> String {
        self.name.clone()
    }
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn dx(&self, x: f64) -> f64 {
        (self.dx)(x)
    }
    fn dxx(&self, x: f64) -> f64 {
        (self.dxx)(x)
    }
    fn antiderivative(&self, x: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|f| f(x))
    }
}

pub fn cosine_potential() -> CosinePotential {
    CosinePotential
}

pub fn zero_potential() -> ZeroPotential {
    ZeroPotential
}

/// Registry of potential presets (`cosine`, `zero`).
pub fn potential_registry() -> Registry<dyn Potential> {
    let mut r: Registry<dyn Potential> = Registry::new("potential");
    r.register("cosine", |_| Ok(Arc::new(CosinePotential) as Arc<dyn Potential>));
    r.register("zero", |_| Ok(Arc::new(ZeroPotential) as Arc<dyn Potential>));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_values() {
        let v = CosinePotential;
        assert!((v.value(0.0) + 1.0 / PI).abs() < 1e-15);
        assert!(v.dx(-1.0).abs() < 1e-12 && v.dx(1.0).abs() < 1e-12);
        let dom = Interval::new(-1.0, 1.0).unwrap();
        assert_eq!(v.concavity_bound(dom), PI);
        assert_eq!(v.convexity_bound(dom), PI);
    }

    #[test]
    fn sampled_bound_agrees_with_analytic_maximum() {
        // −V_xx = −π cos(πx) is maximal at x = ±1 on [−1, 1].
        let fnv = FnPotential {
            name: "cos-fn".into(),
            value: Arc::new(|x| -(PI * x).cos() / PI),
            dx: Arc::new(|x| (PI * x).sin()),
            dxx: Arc::new(|x| PI * (PI * x).cos()),
            antiderivative: None,
        };
        let dom = Interval::new(-1.0, 1.0).unwrap();
        assert!((fnv.concavity_bound(dom) - PI).abs() < 1e-10);
        assert!(!fnv.has_antiderivative());
    }

    #[test]
    fn zero_potential_is_flat() {
        let z = ZeroPotential;
        assert_eq!(z.value(0.3), 0.0);
        assert_eq!(z.antiderivative(0.7), Some(0.0));
        assert_eq!(z.concavity_bound(Interval::new(0.0, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn registry_knows_presets() {
        let reg = potential_registry();
        assert_eq!(reg.build("cosine").unwrap().id(), "cosine");
        assert_eq!(reg.build("zero").unwrap().id(), "zero");
        assert!(reg.build("quartic").is_err());
    }
}
