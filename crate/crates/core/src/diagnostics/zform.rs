use crate::error::{Error, Result};
use crate::geometry::{assemble_wtilde, theta_quadratic_eval, theta_support, MassGrid, ParticleConfig};
use crate::model::ProblemSpec;
use crate::quadrature::gauss5_points;

/// `∫_{cell k} V_xx(X) Θ_m dξ` by composite 5-point Gauss; `X` is affine on the
/// cell, and panels shrink with its width in `x` since `V_xx` is not polynomial.
fn drift_theta_integral(spec: &ProblemSpec, x: &ParticleConfig, m: usize, k: usize) -> Result<f64> {
    let grid = x.grid();
    let (lo, hi) = (grid.node(k - 1), grid.node(k));
    let (xl, xr) = (x.node(k - 1), x.node(k));
    let panels = ((xr - xl) / (0.02 * spec.domain.length())).ceil().max(1.0) as usize;
    let mut acc = 0.0;
    for (xi, w) in gauss5_points(lo, hi, panels) {
        let pos = xl + (xi - lo) / (hi - lo) * (xr - xl);
        acc += w * spec.potential.dxx(pos) * theta_quadratic_eval(grid, m, xi)?;
    }
    Ok(acc)
}

/// Residual of the Euler–Lagrange system written in the difference quotients
/// `z_k = 1/u_k`, one component per cell. The drift integrals run over the cells
/// on which `Θ_m` is supported.
pub fn zform_residual(spec: &ProblemSpec, tau: f64, x_prev: &ParticleConfig, x: &ParticleConfig) -> Result<Vec<f64>> {
    if !x_prev.shares_grid(x) {
        return Err(Error::GridMismatch);
    }
    let grid = x.grid();
    let k = grid.cells();
    let z = x.difference_quotients();
    let z_prev = x_prev.difference_quotients();
    let dz: Vec<f64> = z.iter().zip(&z_prev).map(|(a, b)| a - b).collect();
    let wt = assemble_wtilde(grid).matvec(&dz)?;
    let dpsi: Vec<f64> = z.iter().map(|&s| spec.nonlinearity.dpsi(s)).collect();
    let mut out = Vec::with_capacity(k);
    for m in 1..=k {
        let diffusion = if m == 1 {
            dpsi[1] - dpsi[0]
        } else if m == k {
            dpsi[k - 2] - dpsi[k - 1]
        } else {
            let g = grid.gamma(m);
            (1.0 - g) * dpsi[m] - 2.0 * dpsi[m - 1] + (1.0 + g) * dpsi[m - 2]
        };
        let (c0, c1) = theta_support(grid, m);
        let mut drift = 0.0;
        for c in c0..=c1 {
            drift += z[c - 1] * drift_theta_integral(spec, x, m, c)?;
        }
        out.push(wt[m - 1] / tau - (diffusion - drift));
    }
    Ok(out)
}

/// Indices `m` for which `Θ_m` is nonzero somewhere outside cells `m−1..=m+1`
/// (probed at cell midpoints); empty when the printed summation range is exact.
pub fn theta_support_mismatches(grid: &MassGrid) -> Result<Vec<usize>> {
    let k = grid.cells();
    let mut out = Vec::new();
    for m in 1..=k {
        let (c0, c1) = theta_support(grid, m);
        for c in (1..=k).filter(|c| *c < c0 || *c > c1) {
            let mid = 0.5 * (grid.node(c - 1) + grid.node(c));
            if theta_quadratic_eval(grid, m, mid)? != 0.0 {
                out.push(m);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{uniform_mass_grid, MassGrid};
    use crate::model::{cosine_potential, porous_medium_nonlinearity, zero_potential, Interval, Potential};
    use crate::stepper::{minimizing_movement_step, StepConfig};
    use std::sync::Arc;

    fn spec(domain: Interval, v: Arc<dyn Potential>) -> ProblemSpec {
        ProblemSpec::new(domain, 1.0, Arc::new(porous_medium_nonlinearity(2.0).unwrap()), v).unwrap()
    }

    #[test]
    fn stationary_uniform_vanishes() {
        let s = spec(Interval::new(0.0, 1.0).unwrap(), Arc::new(zero_potential()));
        let p = ParticleConfig::uniform(Arc::new(uniform_mass_grid(1.0, 5).unwrap()), s.domain).unwrap();
        assert!(zform_residual(&s, 0.1, &p, &p).unwrap().iter().all(|&r| r.abs() < 1e-13));
    }

    #[test]
    fn converged_step_has_small_residual_and_random_config_does_not() {
        let dom = Interval::new(-1.0, 1.0).unwrap();
        let s = spec(dom, Arc::new(cosine_potential()));
        let g = Arc::new(MassGrid::from_nodes(vec![0.0, 0.1, 0.25, 0.45, 0.6, 0.8, 1.0]).unwrap());
        let prev = ParticleConfig::new(g, dom, vec![-0.7, -0.4, 0.0, 0.2, 0.5]).unwrap();
        let cfg = StepConfig::new(0.01).with_tol(1e-12);
        let step = minimizing_movement_step(&s, &cfg, &prev).unwrap();
        let r = zform_residual(&s, cfg.tau, &prev, &step.config).unwrap();
        assert!(r.iter().map(|v| v.abs()).sum::<f64>() < 1e-9, "{r:?}");
        let r = zform_residual(&s, cfg.tau, &prev, &prev.with_interior(vec![-0.2, -0.1, 0.0, 0.3, 0.9]).unwrap()).unwrap();
        assert!(r.iter().map(|v| v.abs()).fold(0.0, f64::max) > 1e-1);
    }

    #[test]
    fn printed_summation_range_covers_support() {
        let g = MassGrid::from_nodes(vec![0.0, 0.3, 0.4, 0.9, 1.0, 1.6]).unwrap();
        assert!(theta_support_mismatches(&g).unwrap().is_empty());
    }
}
