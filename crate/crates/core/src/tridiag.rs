//! Band storage and solvers for tridiagonal matrices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if !diag.is_empty() && off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), got: off.len() });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v)?;
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        let mut acc = 0.0;
        for i in 0..self.dim() {
            acc += self.diag[i] * v[i] * v[i];
        }
        for (i, &o) in self.off.iter().enumerate() {
            acc += 2.0 * o * v[i] * v[i + 1];
        }
        Ok(acc)
    }

    /// `self + scale * other`, both with the same sparsity.
    pub fn add_scaled(&self, other: &SymTridiag, scale: f64) -> Result<SymTridiag> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + scale * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + scale * b).collect(),
        })
    }

    pub fn scaled(&self, s: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().map(|d| d * s).collect(),
            off: self.off.iter().map(|o| o * s).collect(),
        }
    }

    /// Solves `A x = rhs` with the Thomas algorithm (no pivoting; intended for
    /// symmetric positive definite `A`).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(rhs)?;
        let n = self.dim();
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::InvalidParameter("singular tridiagonal pivot".into()));
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::InvalidParameter("singular tridiagonal pivot".into()));
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn eigenvalues_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Smallest eigenvalue, located by bisection on the Sturm count.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return f64::NAN;
        }
        // Gershgorin interval.
        let n = self.dim();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-15 * scale {
                break;
            }
            if self.eigenvalues_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// General (non-symmetric) tridiagonal matrix in band form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiag {
    /// `lower[i]` is entry `(i + 1, i)`.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// `upper[i]` is entry `(i, i + 1)`.
    pub upper: Vec<f64>,
}

impl Tridiag {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(row, col)`, zero outside the band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diag[row]
        } else if col + 1 == row {
            self.lower[col]
        } else if row + 1 == col {
            self.upper[row]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        Ok((0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * v[i + 1];
                }
                acc
            })
            .collect())
    }
}
