//! Special functions: error function, modified Bessel I₀ and the exponential
//! integral E₁.
//!
//! `erf`/`erfc` delegate to `libm` (FreeBSD msun port, < 1 ulp). I₀ uses the
//! power series up to x = 50 (all terms positive, no cancellation) and the
//! Hankel asymptotic expansion beyond. E₁ uses the alternating series for
//! x ≤ 1 and a modified-Lentz continued fraction otherwise.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const I0_SERIES_LIMIT: f64 = 50.0;

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Exponentially scaled Bessel function `e^{-|x|} I₀(x)`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x) * (-x).exp()
    } else {
        i0_asymptotic_scaled(x)
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x)
    } else {
        i0_asymptotic_scaled(x) * x.exp()
    }
}

/// `ln I₀(x)`, finite for every finite `x`.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series_minus_one(x).ln_1p()
    } else {
        i0_asymptotic_scaled(x).ln() + x
    }
}

fn i0_series(x: f64) -> f64 {
    1.0 + i0_series_minus_one(x)
}

// I0(x) − 1, accurate for small x.
fn i0_series_minus_one(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

fn i0_asymptotic_scaled(x: f64) -> f64 {
    // e^{-x} I0(x) ~ 1/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! 8^k x^k)
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Upper bound `I₀(ζ) ≤ (√π/2) e^ζ / √ζ`, returned in scaled form
/// (multiplied by `e^{-ζ}`) so it can be compared with [`bessel_i0_scaled`].
pub fn bessel_i0_upper_bound_scaled(zeta: f64) -> f64 {
    0.5 * PI.sqrt() / zeta.sqrt()
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-u}/u du` for `x > 0`.
pub fn exp_int_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires a positive argument, got {x}");
    if x <= 1.0 {
        e1_series(x)
    } else {
        e1_cf_scaled(x) * (-x).exp()
    }
}

/// Scaled exponential integral `e^x E₁(x)`, safe for large `x`.
pub fn exp_int_e1_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires a positive argument, got {x}");
    if x <= 1.0 {
        e1_series(x) * x.exp()
    } else {
        e1_cf_scaled(x)
    }
}

fn e1_series(x: f64) -> f64 {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    let mut sum = 0.0;
    let mut fact_term = 1.0; // (-x)^k / k!
    for k in 1..100 {
        let kf = k as f64;
        fact_term *= -x / kf;
        let term = fact_term / kf;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

fn e1_cf_scaled(x: f64) -> f64 {
    // Modified Lentz on e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let fi = i as f64;
        let an = -fi * fi;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
