//! Sampled verification of the standing assumptions on the problem data.

use super::{Nonlinearity, Potential, ProblemSpec};
use serde::Serialize;

/// Outcome of one sampled invariant check.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    /// Largest observed violation (relative or absolute, depending on check).
    pub worst: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, worst: f64, tol: f64) {
        let passed = worst.is_finite() && worst <= tol;
        self.checks.push(InvariantCheck { name: name.to_string(), passed, worst });
    }

    fn push_bool(&mut self, name: &str, passed: bool, worst: f64) {
        self.checks.push(InvariantCheck { name: name.to_string(), passed, worst });
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn check_nonlinearity(n: &dyn Nonlinearity, samples: usize, report: &mut ValidationReport) {
    let tol = if n.is_closed_form() { 1e-10 } else { 1e-6 };
    let rs = log_spaced(1e-3, 1e3, samples.max(3));
    let worst = |f: &dyn Fn(f64) -> f64| rs.iter().map(|&r| f(r)).fold(0.0_f64, f64::max);

    report.push("P(0) = 0", n.pressure(0.0).abs(), 1e-14);

    let min_dp = rs.iter().map(|&r| n.dpressure(r)).fold(f64::INFINITY, f64::min);
    report.push_bool("P'(r) > 0", min_dp > 0.0, min_dp);

    // A finite limit at 0: P′ stays finite and does not blow up as r ↓ 0.
    let (near, far) = (n.dpressure(1e-12), n.dpressure(1e-6));
    report.push_bool(
        "lim P'(r) as r->0 finite",
        near.is_finite() && near <= 10.0 * far.abs() + 1.0,
        near,
    );

    // P′ → ∞: strictly increasing along the far tail.
    let tail: Vec<f64> = [1e4, 1e6, 1e8, 1e10].iter().map(|&r| n.dpressure(r)).collect();
    let growing = tail.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9));
    report.push_bool("P'(r) -> infinity", growing, *tail.last().unwrap());

    // s ↦ P(1/s) must curve upward (ψ‴ ≤ 0) for ψ″ to be non-increasing.
    let ss = log_spaced(1e-3, 1e3, samples.max(3));
    let mut worst_curvature = 0.0_f64;
    for w in ss.windows(3) {
        let (s0, s1, s2) = (w[0], w[1], w[2]);
        let (p0, p1, p2) = (n.pressure(1.0 / s0), n.pressure(1.0 / s1), n.pressure(1.0 / s2));
        let dd = ((p2 - p1) / (s2 - s1) - (p1 - p0) / (s1 - s0)) / (s2 - s0);
        let scale = (p0.abs() + p1.abs() + p2.abs()) / ((s2 - s0) * (s2 - s0)) + f64::MIN_POSITIVE;
        worst_curvature = worst_curvature.max(-dd / scale);
    }
    report.push("s -> P(1/s) convex", worst_curvature.max(0.0), tol);

    let phi0 = n.phi_at_zero();
    report.push(
        "P = r phi' + phi(0) - phi",
        worst(&|r| rel_err(n.pressure(r), r * n.dphi(r) + phi0 - n.phi(r))),
        tol,
    );
    report.push("psi(s) = s phi(1/s)", worst(&|s| rel_err(n.psi(s), s * n.phi(1.0 / s))), tol);
    report.push("psi'(s) = phi(0) - P(1/s)", worst(&|s| rel_err(n.dpsi(s), phi0 - n.pressure(1.0 / s))), tol);
    report.push(
        "psi''(s) = P'(1/s)/s^2",
        worst(&|s| rel_err(n.d2psi(s), n.dpressure(1.0 / s) / (s * s))),
        tol,
    );

    let d2: Vec<f64> = rs.iter().map(|&s| n.d2psi(s)).collect();
    let min_d2 = d2.iter().cloned().fold(f64::INFINITY, f64::min);
    report.push_bool("psi'' > 0", min_d2 > 0.0, min_d2);
    let worst_incr = d2.windows(2).map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE)).fold(0.0_f64, f64::max);
    report.push("psi'' non-increasing", worst_incr.max(0.0), tol);

    // Φ′ by central differences against both closed expressions.
    let fd_tol = 1e-6;
    report.push(
        "Phi'(r) = sqrt(r) phi''(r)",
        worst(&|r| {
            let h = 1e-5 * r;
            let fd = (n.big_phi(r + h) - n.big_phi(r - h)) / (2.0 * h);
            rel_err(fd, r.sqrt() * n.d2phi(r))
        }),
        fd_tol,
    );
    report.push(
        "Phi'(r) = r^(-5/2) psi''(1/r)",
        worst(&|r| rel_err(r.sqrt() * n.d2phi(r), r.powf(-2.5) * n.d2psi(1.0 / r))),
        tol,
    );

    let (a, b, c) = (n.psi(1e-6), n.psi(1e-3), n.psi(1.0));
    report.push_bool("psi(s) -> infinity as s -> 0", a > b && b > c, a);

    let big: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6].iter().map(|&r| n.big_phi(r).powi(2) / n.pressure(r)).collect();
    report.push_bool("Phi^2/P increasing", big.windows(2).all(|w| w[1] > w[0]), big[big.len() - 1]);
}

fn check_potential(spec: &ProblemSpec, v: &dyn Potential, samples: usize, report: &mut ValidationReport) {
    let (a, b) = (spec.domain.a, spec.domain.b);
    let xs: Vec<f64> = (0..samples.max(3)).map(|i| a + (b - a) * i as f64 / (samples.max(3) - 1) as f64).collect();

    report.push("V_x(a) = V_x(b) = 0", v.dx(a).abs().max(v.dx(b).abs()), 1e-12);

    if v.has_antiderivative() {
        let h = 1e-5 * (b - a);
        let worst = xs
            .iter()
            .map(|&x| {
                let lo = (x - h).max(a);
                let hi = (x + h).min(b);
                let fd = (v.antiderivative(hi).unwrap() - v.antiderivative(lo).unwrap()) / (hi - lo);
                // One-sided steps at the boundary are only first order.
                let tol_scale = if lo == a || hi == b { 1e3 } else { 1.0 };
                (fd - v.value(x)).abs() / tol_scale
            })
            .fold(0.0_f64, f64::max);
        report.push("antiderivative' = V", worst, 1e-8);
    }

    let big = spec.concavity();
    let small = spec.convexity();
    let worst_big = xs.iter().map(|&x| -v.dxx(x) - big).fold(f64::NEG_INFINITY, f64::max);
    let worst_small = xs.iter().map(|&x| v.dxx(x) - small).fold(f64::NEG_INFINITY, f64::max);
    report.push("Lambda >= -V_xx", worst_big.max(0.0), 1e-10);
    report.push("lambda >= V_xx", worst_small.max(0.0), 1e-10);
}

/// Runs every sampled invariant check on the nonlinearity and potential.
/// Violations are reported, never raised.
pub fn validate_spec(spec: &ProblemSpec, samples: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let samples = samples.max(3);
    check_nonlinearity(spec.nonlinearity.as_ref(), samples, &mut report);
    check_potential(spec, spec.potential.as_ref(), samples, &mut report);
    report
}
