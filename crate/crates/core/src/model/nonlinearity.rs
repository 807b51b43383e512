//! Diffusion nonlinearities and the derived energy densities.
//!
//! A nonlinearity bundles the pressure `P`, the internal energy density `φ`
//! (a second antiderivative of `P′(r)/r`), its Lagrangian counterpart
//! `ψ(s) = s·φ(1/s)` and the regularity functional `Φ` with `Φ′(r) = √r·φ″(r)`.

use crate::error::{Error, Result};
use crate::registry::{PresetParams, Registry};
use std::fmt;
use std::sync::Arc;

pub trait Nonlinearity: Send + Sync + fmt::Debug {
    /// Registry id that reconstructs this nonlinearity.
    fn id(&self) -> String;

    fn pressure(&self, r: f64) -> f64;
    fn dpressure(&self, r: f64) -> f64;

    fn phi(&self, r: f64) -> f64;
    fn dphi(&self, r: f64) -> f64;
    fn d2phi(&self, r: f64) -> f64;

    fn psi(&self, s: f64) -> f64;
    fn dpsi(&self, s: f64) -> f64;
    fn d2psi(&self, s: f64) -> f64;

    /// `Φ(r) = ∫₀ʳ √ρ φ″(ρ) dρ`.
    fn big_phi(&self, r: f64) -> f64;

    /// The integration constant `φ(0)` entering `P(r) = rφ′(r) + φ(0) − φ(r)`.
    fn phi_at_zero(&self) -> f64 {
        self.phi(0.0)
    }

    /// Closed-form presets are validated at a tighter tolerance than
    /// user-supplied function tuples.
    fn is_closed_form(&self) -> bool {
        true
    }
}

/// `P(r) = rᵐ` with `m > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PorousMedium {
    m: f64,
}

impl PorousMedium {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "porous-medium exponent must satisfy m > 1, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn exponent(&self) -> f64 {
        self.m
    }
}

impl Nonlinearity for PorousMedium {
    fn id(&self) -> String {
        format!("porous-medium:m={}", self.m)
    }

    fn pressure(&self, r: f64) -> f64 {
        r.powf(self.m)
    }

    fn dpressure(&self, r: f64) -> f64 {
        self.m * r.powf(self.m - 1.0)
    }

    fn phi(&self, r: f64) -> f64 {
        r.powf(self.m) / (self.m - 1.0)
    }

    fn dphi(&self, r: f64) -> f64 {
        self.m / (self.m - 1.0) * r.powf(self.m - 1.0)
    }

    fn d2phi(&self, r: f64) -> f64 {
        self.m * r.powf(self.m - 2.0)
    }

    fn psi(&self, s: f64) -> f64 {
        s.powf(1.0 - self.m) / (self.m - 1.0)
    }

    fn dpsi(&self, s: f64) -> f64 {
        -s.powf(-self.m)
    }

    fn d2psi(&self, s: f64) -> f64 {
        self.m * s.powf(-self.m - 1.0)
    }

    fn big_phi(&self, r: f64) -> f64 {
        self.m * r.powf(self.m - 0.5) / (self.m - 0.5)
    }

    fn phi_at_zero(&self) -> f64 {
        0.0
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonlinearity given as an explicit tuple of functions.
#[derive(Clone)]
pub struct FnNonlinearity {
    pub name: String,
    pub pressure: ScalarFn,
    pub dpressure: ScalarFn,
    pub phi: ScalarFn,
    pub dphi: ScalarFn,
    pub d2phi: ScalarFn,
    pub psi: ScalarFn,
    pub dpsi: ScalarFn,
    pub d2psi: ScalarFn,
    pub big_phi: ScalarFn,
    pub phi_at_zero: f64,
}

impl fmt::Debug for FnNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnNonlinearity").field("name", &self.name).finish_non_exhaustive()
    }
}

impl FnNonlinearity {
    /// Linear diffusion `P(r) = r` with `φ(r) = r ln r − r`. Violates the
    /// superlinear growth requirement; kept for validator tests.
    pub fn linear() -> Self {
        fn f(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
            Arc::new(g)
        }
        Self {
            name: "linear".into(),
            pressure: f(|r| r),
            dpressure: f(|_| 1.0),
            phi: f(|r| if r == 0.0 { 0.0 } else { r * r.ln() - r }),
            dphi: f(|r: f64| r.ln()),
            d2phi: f(|r| 1.0 / r),
            psi: f(|s: f64| -s.ln() - 1.0),
            dpsi: f(|s| -1.0 / s),
            d2psi: f(|s| 1.0 / (s * s)),
            big_phi: f(|r: f64| 2.0 * r.sqrt()),
            phi_at_zero: 0.0,
        }
    }
}

impl Nonlinearity for FnNonlinearity {
    fn id(&self) -> String {
        self.name.clone()
    }
    fn pressure(&self, r: f64) -> f64 {
        (self.pressure)(r)
    }
    fn dpressure(&self, r: f64) -> f64 {
        (self.dpressure)(r)
    }
    fn phi(&self, r: f64) -> f64 {
        (self.phi)(r)
    }
    fn dphi(&self, r: f64) -> f64 {
        (self.dphi)(r)
    }
    fn d2phi(&self, r: f64) -> f64 {
        (self.d2phi)(r)
    }
    fn psi(&self, s: f64) -> f64 {
        (self.psi)(s)
    }
    fn dpsi(&self, s: f64) -> f64 {
        (self.dpsi)(s)
    }
    fn d2psi(&self, s: f64) -> f64 {
        (self.d2psi)(s)
    }
    fn big_phi(&self, r: f64) -> f64 {
        (self.big_phi)(r)
    }
    fn phi_at_zero(&self) -> f64 {
        self.phi_at_zero
    }
    fn is_closed_form(&self) -> bool {
        false
    }
}

pub fn porous_medium_nonlinearity(m: f64) -> Result<PorousMedium> {
    PorousMedium::new(m)
}

/// Registry of nonlinearity presets (`porous-medium:m=<exponent>`).
pub fn nonlinearity_registry() -> Registry<dyn Nonlinearity> {
    let mut r: Registry<dyn Nonlinearity> = Registry::new("nonlinearity");
    r.register("porous-medium", |p: &PresetParams| {
        Ok(Arc::new(PorousMedium::new(p.get_or("m", 2.0))?) as Arc<dyn Nonlinearity>)
    });
    r
}
