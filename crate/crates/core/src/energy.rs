//! The discrete energy `𝔼_ξ(x⃗) = Σ δ_k ψ(z_k) + ∫₀^M V(X) dξ` with its gradient
//! and Hessian in particle coordinates.

use crate::geometry::ParticleConfig;
use crate::model::{Potential, ProblemSpec};
use crate::quadrature::{gauss5_composite, gauss5_points};
use crate::tridiag::SymTridiag;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub internal: f64,
    pub potential: f64,
    pub total: f64,
    pub lower_bound: f64,
}

/// Below this relative cell width the differentiated closed forms lose too many
/// digits to cancellation (they divide differences of `𝔙` by `h²` and `h³`), and
/// the 5-point Gauss rule is used instead; it is accurate to roundoff there.
pub const CLOSED_FORM_MIN_WIDTH: f64 = 2e-2;

/// `∫_cell V(X) dξ` over one mass cell on which `X` runs affinely from `p` to `q`,
/// with its derivatives in the endpoint positions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellPotential {
    pub value: f64,
    pub dp: f64,
    pub dq: f64,
    pub dpp: f64,
    pub dqq: f64,
    pub dpq: f64,
}

/// Closed forms in the antiderivative `𝔙`: with `h = q − p` and `A = 𝔙(q) − 𝔙(p)`
/// the cell integral is `δA/h`. `None` when the potential has no antiderivative.
pub fn cell_potential_closed_form(v: &dyn Potential, delta: f64, p: f64, q: f64) -> Option<CellPotential> {
    let big_a = v.antiderivative(q)? - v.antiderivative(p)?;
    let h = q - p;
    let (vp, vq) = (v.value(p), v.value(q));
    let (h2, h3) = (h * h, h * h * h);
    Some(CellPotential {
        value: delta * big_a / h,
        dp: -delta * vp / h + delta * big_a / h2,
        dq: delta * vq / h - delta * big_a / h2,
        dpp: -delta * v.dx(p) / h - 2.0 * delta * vp / h2 + 2.0 * delta * big_a / h3,
        dqq: delta * v.dx(q) / h - 2.0 * delta * vq / h2 + 2.0 * delta * big_a / h3,
        dpq: delta * (vp + vq) / h2 - 2.0 * delta * big_a / h3,
    })
}

/// Gauss–Legendre evaluation of the same quantities, written as integrals over
/// the local coordinate `s ∈ [0,1]`, `X = p + s(q − p)`; `panels` composite panels.
pub fn cell_potential_gauss(v: &dyn Potential, delta: f64, p: f64, q: f64, panels: usize) -> CellPotential {
    let h = q - p;
    let mut c = CellPotential::default();
    for (s, w) in gauss5_points(0.0, 1.0, panels) {
        let x = p + s * h;
        let (v0, v1, v2) = (v.value(x), v.dx(x), v.dxx(x));
        let r = 1.0 - s;
        c.value += w * v0;
        c.dp += w * v1 * r;
        c.dq += w * v1 * s;
        c.dpp += w * v2 * r * r;
        c.dqq += w * v2 * s * s;
        c.dpq += w * v2 * s * r;
    }
    CellPotential {
        value: delta * c.value,
        dp: delta * c.dp,
        dq: delta * c.dq,
        dpp: delta * c.dpp,
        dqq: delta * c.dqq,
        dpq: delta * c.dpq,
    }
}

fn gauss_panels(h: f64, length: f64) -> usize {
    ((h / (CLOSED_FORM_MIN_WIDTH * length)).ceil() as usize).max(1)
}

/// Per-cell potential data used by the gradient and Hessian.
pub fn cell_potential(spec: &ProblemSpec, delta: f64, p: f64, q: f64) -> CellPotential {
    let v = spec.potential.as_ref();
    let len = spec.domain.length();
    if q - p >= CLOSED_FORM_MIN_WIDTH * len {
        if let Some(c) = cell_potential_closed_form(v, delta, p, q) {
            return c;
        }
    }
    cell_potential_gauss(v, delta, p, q, gauss_panels(q - p, len))
}

fn cell_potential_value(spec: &ProblemSpec, delta: f64, p: f64, q: f64) -> f64 {
    let v = spec.potential.as_ref();
    match (v.antiderivative(q), v.antiderivative(p)) {
        (Some(aq), Some(ap)) => delta * (aq - ap) / (q - p),
        _ => {
            let panels = gauss_panels(q - p, spec.domain.length());
            delta * gauss5_composite(0.0, 1.0, panels, |s| v.value(p + s * (q - p)))
        }
    }
}

/// `E̲ = (b−a)·φ(M/(b−a)) + M·min_I V`.
pub fn energy_lower_bound(spec: &ProblemSpec) -> f64 {
    let len = spec.domain.length();
    len * spec.nonlinearity.phi(spec.mass / len) + spec.mass * spec.min_potential()
}

pub fn energy(spec: &ProblemSpec, p: &ParticleConfig) -> EnergyReport {
    let grid = p.grid();
    let psi = |s: f64| spec.nonlinearity.psi(s);
    let mut internal = 0.0;
    let mut potential = 0.0;
    for k in 1..=p.cells() {
        let (lo, hi, d) = (p.node(k - 1), p.node(k), grid.delta(k));
        internal += d * psi((hi - lo) / d);
        potential += cell_potential_value(spec, d, lo, hi);
    }
    EnergyReport { internal, potential, total: internal + potential, lower_bound: energy_lower_bound(spec) }
}

/// Component `m`: `ψ′(z_m) − ψ′(z_{m+1}) + ∫ V_x(X) θ_m dξ`.
pub fn energy_gradient(spec: &ProblemSpec, p: &ParticleConfig) -> Vec<f64> {
    let grid = p.grid();
    let z = p.difference_quotients();
    let cells: Vec<CellPotential> =
        (1..=p.cells()).map(|k| cell_potential(spec, grid.delta(k), p.node(k - 1), p.node(k))).collect();
    (1..p.cells())
        .map(|m| {
            spec.nonlinearity.dpsi(z[m - 1]) - spec.nonlinearity.dpsi(z[m]) + cells[m - 1].dq + cells[m].dp
        })
        .collect()
}

/// Symmetric tridiagonal Hessian of `𝔼_ξ` in `x₁..x_{K−1}`.
pub fn energy_hessian(spec: &ProblemSpec, p: &ParticleConfig) -> SymTridiag {
    let grid = p.grid();
    let z = p.difference_quotients();
    let k = p.cells();
    let cells: Vec<CellPotential> = (1..=k).map(|c| cell_potential(spec, grid.delta(c), p.node(c - 1), p.node(c))).collect();
    // ψ″(z_c)/δ_c: second derivative of the internal term of cell c in its width.
    let stiff: Vec<f64> = (1..=k).map(|c| spec.nonlinearity.d2psi(z[c - 1]) / grid.delta(c)).collect();
    let diag = (1..k).map(|m| stiff[m - 1] + stiff[m] + cells[m - 1].dqq + cells[m].dpp).collect();
    let off = (1..k - 1).map(|m| -stiff[m] + cells[m].dpq).collect();
    SymTridiag { diag, off }
}
