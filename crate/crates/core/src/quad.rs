//! Small quadrature toolkit: composite Simpson panels and an adaptive
//! bisection scheme with Richardson acceptance.

/// Composite Simpson rule with an odd number of equally spaced nodes.
pub fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes >= 3 && nodes % 2 == 1, "need an odd node count >= 3");
    let h = (b - a) / (nodes - 1) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..nodes - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn simpson_panel(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, fa, m, fm, flm);
    let right = simpson_panel(m, fm, b, fb, frm);
    let refined = left + right;
    // Richardson acceptance: Simpson halving gains a factor 16.
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    adaptive_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integration to an absolute tolerance. Jump
/// discontinuities are handled by bisection concentrating around them.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_panel(a, fa, b, fb, fm);
    adaptive_step(&f, a, b, fa, fb, fm, whole, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let got = composite_simpson(|t| t * t * t - t, 0.0, 2.0, 5);
        assert!((got - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_smooth_integrand() {
        let got = adaptive_simpson(|t| (-t * t).exp(), -6.0, 6.0, 1e-12, 40);
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_jump() {
        // Integral of a step at an irrational point.
        let c = 0.3333333333333333_f64.sqrt();
        let got = adaptive_simpson(|t| if t < c { 1.0 } else { 3.0 }, 0.0, 1.0, 1e-10, 48);
        let expected = c + 3.0 * (1.0 - c);
        assert!((got - expected).abs() < 1e-8, "got {got}");
    }
}
