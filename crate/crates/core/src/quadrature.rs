//! Fixed-order Gauss-Legendre rules used by the composite quadratures.

/// Five-point Gauss-Legendre nodes on [0, 1].
pub const GL5_NODES: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_5,
    0.953_089_922_969_332,
];

/// Five-point Gauss-Legendre weights on [0, 1] (sum to one).
pub const GL5_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// Composite five-point Gauss-Legendre rule on `[a, b]` split into `panels` pieces.
pub fn composite_gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let x0 = a + p as f64 * h;
        let mut s = 0.0;
        for (t, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            s += w * f(x0 + t * h);
        }
        acc += s * h;
    }
    acc
}

/// Composite Simpson rule on uniformly spaced samples. Falls back to a
/// trapezoid correction on the last interval when the interval count is odd.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = 0.0;
    let mut i = 0;
    while i < even {
        acc += values[i] + 4.0 * values[i + 1] + values[i + 2];
        i += 2;
    }
    acc *= h / 3.0;
    if intervals % 2 == 1 {
        // 3/8-free closure: quadratic through the last three points.
        let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
        acc += h * (-a + 8.0 * b + 5.0 * c) / 12.0;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_degree_nine() {
        let v = composite_gauss(0.0, 2.0, 1, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        let h = 0.01;
        let xs: Vec<f64> = (0..=101).map(|i| (i as f64 * h).powi(2)).collect();
        let exact = (101.0 * h).powi(3) / 3.0;
        assert!((simpson_uniform(&xs, h) - exact).abs() < 1e-12);
    }
}
