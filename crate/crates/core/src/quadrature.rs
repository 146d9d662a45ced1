//! Gauss–Legendre rules and an adaptive bisecting integrator built on them.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn order20() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Failure to reach the requested tolerance within the recursion budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureFailure {
    pub a: f64,
    pub b: f64,
    pub estimate: f64,
}

/// Adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// Each panel is compared against the sum of its two halves; panels are
/// bisected until the difference falls below `abs_tol` (halved per level).
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<f64, QuadratureFailure> {
    let rule = GaussLegendre::order20();
    let whole = rule.integrate(&mut *f, a, b);
    adapt(f, rule, a, b, whole, abs_tol, max_depth)
}

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<f64, QuadratureFailure> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(&mut *f, a, mid);
    let right = rule.integrate(&mut *f, mid, b);
    let refined = left + right;
    if (refined - whole).abs() <= abs_tol {
        return Ok(refined);
    }
    if depth == 0 {
        return Err(QuadratureFailure {
            a,
            b,
            estimate: refined,
        });
    }
    Ok(adapt(f, rule, a, mid, left, 0.5 * abs_tol, depth - 1)?
        + adapt(f, rule, mid, b, right, 0.5 * abs_tol, depth - 1)?)
}

/// Composite trapezoid rule over uniformly spaced samples with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * (values[0] + values[n - 1]) + inner)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(10);
        // exact up to degree 19
        let got = rule.integrate(|x| x.powi(18) + 3.0 * x.powi(5), -1.0, 1.0);
        assert!((got - 2.0 / 19.0).abs() < 1e-15);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_narrow_peak() {
        let s: f64 = 1e-3;
        let mut f = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp();
        let got = integrate_adaptive(&mut f, 0.0, 1.0, 1e-14, 40).unwrap();
        let want = s * (2.0 * PI).sqrt();
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn adaptive_reports_failure_on_exhausted_depth() {
        let mut f = |x: f64| if x < 0.123_456 { 0.0 } else { 1.0 };
        assert!(integrate_adaptive(&mut f, 0.0, 1.0, 1e-30, 3).is_err());
    }

    #[test]
    fn trapezoid_linear_exact() {
        let v: Vec<f64> = (0..=10).map(|k| 2.0 * k as f64 / 10.0 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-15);
    }
}
