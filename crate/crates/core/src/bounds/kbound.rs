//! Bound `E[|F|⁻²] ≤ K = 1/ε²` from a cubic-in-Z² polynomial
//! `g(Z) = a(1−Z²)(1−ρ₁Z²)(1−ρ₂Z²)` with `E[g(Z)] = 0`.

use crate::error::{invalid, Error, Result};
use crate::stochastic::{closed_form_moments, ZMoments};

/// Solver output with every intermediate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBound {
    pub k: f64,
    pub eps: f64,
    /// Smallest root of `g(Z) = 1` in `(0, 1)`.
    pub eps1: f64,
    /// Right end of the interval on which `g` is concave.
    pub eps_cap: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// `min{E[1−Z²]/E[Z²(1−Z²)], E[Z²(1−Z²)]/E[Z⁴(1−Z²)]}`; diagnostic only.
    pub rho1_upper: f64,
    /// `E[g(Z)]` evaluated from the moments.
    pub residual: f64,
    pub a: f64,
}

impl KBound {
    pub fn g(&self, z: f64) -> f64 {
        g_poly(self.a, self.rho1, self.rho2, z)
    }
}

fn g_poly(a: f64, rho1: f64, rho2: f64, z: f64) -> f64 {
    let z2 = z * z;
    a * (1.0 - z2) * (1.0 - rho1 * z2) * (1.0 - rho2 * z2)
}

const ROOT_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const DENSE_POINTS: usize = 1000;
// With ρ₁ at its lower limit ρ₂ = 1 exactly; cancellation in the numerator
// can push the computed value slightly above.
const RHO2_SLACK: f64 = 1e-9;

/// K for `a > 1` at `γ√Δ`, using the closed-form moments.
pub fn k_bound(a: f64, gamma: f64, delta: f64) -> Result<KBound> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(invalid("k_bound needs gamma > 0 and delta > 0"));
    }
    let z = closed_form_moments(0.5 * gamma * gamma * delta)?;
    k_bound_with_moments(a, &z)
}

/// K from explicit moments `E[Z²], E[Z⁴], E[Z⁶]`.
pub fn k_bound_with_moments(a: f64, z: &ZMoments) -> Result<KBound> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(invalid(format!("a must be finite and > 1, got {a}")));
    }
    let ZMoments { m2, m4, m6 } = *z;
    if ![m2, m4, m6].iter().all(|m| m.is_finite()) {
        return Err(invalid("moments must be finite"));
    }

    // lower limit E[(1−Z²)²] / E[Z²(1−Z²)²]
    let rho1 = (1.0 - 2.0 * m2 + m4) / (m2 - 2.0 * m4 + m6);
    let rho1_upper = ((1.0 - m2) / (m2 - m4)).min((m2 - m4) / (m4 - m6));

    let num = -1.0 + m2 * (1.0 + rho1) - m4 * rho1;
    let den = -m2 + m4 * (1.0 + rho1) - m6 * rho1;
    if !(rho1 > 0.0 && rho1 < 1.0) {
        return Err(Error::NoValidBound(format!("rho1 = {rho1} outside (0, 1)")));
    }
    if !(num < 0.0 && den < 0.0) {
        return Err(Error::NoValidBound(format!(
            "rho2 = {num}/{den} does not have a negative numerator and denominator (rho1 = {rho1})"
        )));
    }
    let mut rho2 = num / den;
    if rho2 > 1.0 && rho2 <= 1.0 + RHO2_SLACK {
        rho2 = 1.0;
    }
    if !(rho2 > 0.0 && rho2 <= 1.0) {
        return Err(Error::NoValidBound(format!("rho2 = {rho2} outside (0, 1]")));
    }

    let residual = a
        * (1.0 - m2 * (1.0 + rho1 + rho2) + m4 * (rho1 + rho2 + rho1 * rho2) - m6 * rho1 * rho2);
    if residual.abs() > RESIDUAL_TOL {
        return Err(Error::NumericFailure {
            v: residual,
            reason: "E[g(Z)] does not vanish".into(),
        });
    }

    let eps_cap = concavity_edge(rho1, rho2);
    let eps1 = smallest_unit_crossing(a, rho1, rho2)?;
    let eps = eps1.min(eps_cap);

    for i in 0..=DENSE_POINTS {
        let zz = eps * i as f64 / DENSE_POINTS as f64;
        let gz = g_poly(a, rho1, rho2, zz);
        if gz < 1.0 - 1e-12 {
            return Err(Error::NoValidBound(format!("g({zz}) = {gz} < 1 inside [0, eps]")));
        }
    }

    Ok(KBound {
        k: 1.0 / (eps * eps),
        eps,
        eps1,
        eps_cap,
        rho1,
        rho2,
        rho1_upper,
        residual,
        a,
    })
}

/// `ε_∩² = A − √(A² − B)`, evaluated as `B / (A + √(A² − B))`.
fn concavity_edge(rho1: f64, rho2: f64) -> f64 {
    let p = rho1 * rho2;
    let a = (rho1 + rho2 + p) / (5.0 * p);
    let b = (1.0 + rho1 + rho2) / (15.0 * p);
    let disc = (a * a - b).max(0.0);
    (b / (a + disc.sqrt())).sqrt()
}

fn smallest_unit_crossing(a: f64, rho1: f64, rho2: f64) -> Result<f64> {
    let h = |z: f64| g_poly(a, rho1, rho2, z) - 1.0;
    // g(0) = a > 1 and g(1) = 0, so a crossing exists in (0, 1)
    let n = 4096;
    let mut lo = 0.0;
    for i in 1..=n {
        let hi = i as f64 / n as f64;
        if h(hi) <= 0.0 {
            return bisect(h, lo, hi);
        }
        lo = hi;
    }
    Err(Error::NumericFailure {
        v: 1.0,
        reason: "g(Z) = 1 has no root in (0, 1]".into(),
    })
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * 0.5 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// K on a grid of `γ√Δ` values, for the monotonicity check.
pub fn k_grid(a: f64, sigmas: &[f64]) -> Vec<(f64, Result<f64>)> {
    sigmas
        .iter()
        .map(|&s| (s, k_bound(a, s, 1.0).map(|kb| kb.k)))
        .collect()
}

/// Reference K used by the phase bound: computed at `γ√Δ̄ = max(0.1, γ√Δ)`.
pub fn reference_k(a: f64, sigma: f64) -> Result<KBound> {
    let s = sigma.max(0.1);
    k_bound(a, s, 1.0)
}
