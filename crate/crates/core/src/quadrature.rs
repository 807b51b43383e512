//! Fixed quadrature rules used for verification integrals and the datum CDF.

/// Nodes of the 5-point Gauss–Legendre rule on [0, 1].
const GL5_NODES: [f64; 5] = [
    0.046_910_077_030_668_0,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];

/// Weights of the 5-point Gauss–Legendre rule on [0, 1].
const GL5_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// 5-point Gauss–Legendre on `[lo, hi]`; exact for polynomials of degree ≤ 9.
pub fn gauss5<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    let h = hi - lo;
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(&s, &w)| w * f(lo + s * h))
        .sum::<f64>()
        * h
}

/// Gauss–Legendre on `[lo, hi]` split into `panels` equal sub-intervals.
pub fn gauss5_composite<F: Fn(f64) -> f64>(lo: f64, hi: f64, panels: usize, f: F) -> f64 {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| {
            let a = lo + i as f64 * h;
            let b = if i + 1 == panels { hi } else { a + h };
            gauss5(a, b, &f)
        })
        .sum()
}

/// Nodes and weights `(x, w)` of the composite 5-point rule on `[lo, hi]`.
pub fn gauss5_points(lo: f64, hi: f64, panels: usize) -> impl Iterator<Item = (f64, f64)> {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    (0..panels).flat_map(move |i| {
        let a = lo + i as f64 * h;
        GL5_NODES.iter().zip(GL5_WEIGHTS.iter()).map(move |(&s, &w)| (a + s * h, w * h))
    })
}

/// Composite Simpson with `panels` (rounded up to even) sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(lo: f64, hi: f64, panels: usize, f: F) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimum of `f` over `[lo, hi]` by dense sampling followed by golden-section
/// refinement around the best sample.
pub fn sampled_min<F: Fn(f64) -> f64>(lo: f64, hi: f64, samples: usize, f: F) -> f64 {
    let n = samples.max(2);
    let h = (hi - lo) / n as f64;
    let (mut best_i, mut best) = (0usize, f64::INFINITY);
    for i in 0..=n {
        let v = f(lo + i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = (lo + (best_i as f64 - 1.0) * h).max(lo);
    let b = (lo + (best_i as f64 + 1.0) * h).min(hi);
    let (_, refined) = golden_section_min(a, b, 1e-12, &f);
    best.min(refined)
}

/// Maximum counterpart of [`sampled_min`].
pub fn sampled_max<F: Fn(f64) -> f64>(lo: f64, hi: f64, samples: usize, f: F) -> f64 {
    -sampled_min(lo, hi, samples, |x| -f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss5_is_exact_for_degree_nine() {
        let f = |x: f64| x.powi(9) - 3.0 * x.powi(4) + 2.0;
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 3.0 * (2f64.powi(5) - 1.0) / 5.0 + 2.0;
        assert!((gauss5(1.0, 2.0, f) - exact).abs() < 1e-12);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(0.0, 1.0, 3, |x| x * x * x);
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sampled_min_finds_interior_minimum() {
        let m = sampled_min(-1.0, 1.0, 100, |x| (x - 0.123_456).powi(2) - 1.0);
        assert!((m + 1.0).abs() < 1e-12);
    }
}
