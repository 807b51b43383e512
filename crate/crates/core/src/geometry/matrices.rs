use crate::error::{Error, Result};
use crate::geometry::MassGrid;
use crate::tridiag::{SymTridiag, Tridiag};

/// Gram matrix of the interior hat functions `θ₁..θ_{K−1}`.
pub type WassersteinMatrix = SymTridiag;

/// The `K × K` matrix `W̃_{m,k} = ∫_{cell k} Θ_m dξ`.
pub type ZFormMatrix = Tridiag;

/// Bands `diag_m = (δ_m + δ_{m+1})/3`, `off_m = δ_{m+1}/6`.
pub fn assemble_w(grid: &MassGrid) -> WassersteinMatrix {
    let d = grid.deltas();
    let n = grid.cells() - 1;
    let diag = (0..n).map(|i| (d[i] + d[i + 1]) / 3.0).collect();
    let off = (1..n).map(|i| d[i] / 6.0).collect();
    SymTridiag { diag, off }
}

pub fn w_quadratic_form(w: &WassersteinMatrix, v: &[f64]) -> Result<f64> {
    w.quadratic_form(v)
}

pub fn assemble_wtilde(grid: &MassGrid) -> ZFormMatrix {
    let k = grid.cells();
    let d = |i: usize| grid.delta(i);
    let g = |i: usize| grid.gamma(i);
    let diag = (1..=k)
        .map(|m| {
            if m == 1 {
                d(1) * d(1) / 3.0 + d(1) * d(2) / 2.0
            } else if m == k {
                d(k) * d(k) / 3.0 + d(k - 1) * d(k) / 2.0
            } else {
                d(m) * d(m) / 6.0 + 0.25 * (1.0 - g(m)) * d(m) * d(m + 1) + 0.25 * (1.0 + g(m)) * d(m) * d(m - 1)
            }
        })
        .collect();
    // Row m + 1, column m.
    let lower = (1..k).map(|m| (1.0 + g(m + 1)) * d(m) * d(m) / 6.0).collect();
    // Row m, column m + 1.
    let upper = (1..k).map(|m| (1.0 - g(m)) * d(m + 1) * d(m + 1) / 6.0).collect();
    Tridiag { lower, diag, upper }
}

/// Cells (1-based, inclusive) on which `Θ_m` may be nonzero.
pub fn theta_support(grid: &MassGrid, m: usize) -> (usize, usize) {
    let k = grid.cells();
    (m.saturating_sub(1).max(1), (m + 1).min(k))
}

/// Piecewise-quadratic `Θ_m(ξ)`, `m ∈ 1..=K`.
pub fn theta_quadratic_eval(grid: &MassGrid, m: usize, xi: f64) -> Result<f64> {
    let k = grid.cells();
    if m < 1 || m > k {
        return Err(Error::InvalidParameter(format!("Θ index {m} outside 1..={k}")));
    }
    if !(0.0..=grid.mass()).contains(&xi) {
        return Err(Error::InvalidParameter(format!("mass coordinate {xi} outside [0, {}]", grid.mass())));
    }
    let node = |i: usize| grid.node(i);
    let d = |i: usize| grid.delta(i);
    let v = if m == 1 {
        if xi <= node(1) {
            0.5 * (d(1) + d(2)) - xi * xi / (2.0 * d(1))
        } else if xi <= node(2) {
            (node(2) - xi).powi(2) / (2.0 * d(2))
        } else {
            0.0
        }
    } else if m == k {
        if xi < node(k - 2) {
            0.0
        } else if xi <= node(k - 1) {
            (xi - node(k - 2)).powi(2) / (2.0 * d(k - 1))
        } else {
            0.5 * (d(k) + d(k - 1)) - (grid.mass() - xi).powi(2) / (2.0 * d(k))
        }
    } else {
        let g = grid.gamma(m);
        if xi < node(m - 2) || xi > node(m + 1) {
            0.0
        } else if xi <= node(m - 1) {
            (1.0 + g) / (2.0 * d(m - 1)) * (xi - node(m - 2)).powi(2)
        } else if xi <= node(m) {
            let c = 2.0 * xi - (node(m) + node(m - 1)) - g * d(m);
            0.25 * (1.0 - g * g) * (d(m + 1) + d(m) + d(m - 1)) - c * c / (4.0 * d(m))
        } else {
            (1.0 - g) / (2.0 * d(m + 1)) * (node(m + 1) - xi).powi(2)
        }
    };
    Ok(v)
}
