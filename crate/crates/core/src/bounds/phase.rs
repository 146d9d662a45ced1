use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::params::ChannelParams;
use crate::quadrature::integrate_adaptive;
use crate::special::erfc;
use crate::stochastic::{closed_form_mean_f, closed_form_mean_f_rot};

/// `E[F₀e^{−jN₀}]·E[F₁] − 2e^{−3σ²/8}·E|X₁|⁻²·K`, a lower bound on
/// `E[cos(Φ − ∠X₁)]`.
pub fn cosine_lower_bound(params: &ChannelParams, k: f64, mean_x_inv_sq: f64) -> Result<f64> {
    params.validate()?;
    check_k(k)?;
    if !(mean_x_inv_sq >= 0.0) {
        return Err(invalid(format!("E|X|^-2 must be >= 0, got {mean_x_inv_sq}")));
    }
    let s2 = params.sigma2();
    Ok(closed_form_mean_f_rot(s2)? * closed_form_mean_f(s2)?
        - 2.0 * (-0.375 * s2).exp() * mean_x_inv_sq * k)
}

fn check_k(k: f64) -> Result<()> {
    if k > 1.0 && k.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("K must be finite and > 1, got {k}")))
    }
}

/// `ρ = 1 − (lower bound on E[cos(Φ − ∠X₁)])`.
pub fn phase_rho(params: &ChannelParams, k: f64, mean_x_inv_sq: f64) -> Result<f64> {
    Ok(1.0 - cosine_lower_bound(params, k, mean_x_inv_sq)?)
}

/// Inputs of the von-Mises-shaped auxiliary phase channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBoundInputs {
    pub params: ChannelParams,
    pub k: f64,
    pub mean_x_inv_sq: f64,
    pub rho: f64,
    /// Kernel concentration; `1/(2ρ)` unless overridden.
    pub zeta: f64,
}

impl PhaseBoundInputs {
    pub fn new(params: ChannelParams, k: f64, mean_x_inv_sq: f64) -> Result<Self> {
        let rho = phase_rho(&params, k, mean_x_inv_sq)?;
        // K > 1 and E|X|⁻² ≥ 0 cannot make ρ ≤ 0 unless E|X|⁻² = 0 and σ = 0
        if !(rho > 0.0) {
            return Err(invalid(format!("rho must be > 0, got {rho}")));
        }
        Ok(Self {
            params,
            k,
            mean_x_inv_sq,
            rho,
            zeta: 0.5 / rho,
        })
    }

    /// Uses `E|X|⁻² ≤ Δ^t`.
    pub fn loose(params: ChannelParams, k: f64) -> Result<Self> {
        Self::new(params, k, params.delta.powf(params.t))
    }

    /// Uses the exact `E|X|⁻²` of the shifted-exponential input.
    pub fn tight(params: ChannelParams, k: f64) -> Result<Self> {
        Self::new(params, k, params.mean_inverse_energy()?)
    }

    pub fn with_zeta(mut self, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(invalid(format!("zeta must be finite and > 0, got {zeta}")));
        }
        self.zeta = zeta;
        Ok(self)
    }
}

/// `½ln(2/(πeρ))` nats/symbol, the bound at `ζ = 1/(2ρ)`.
pub fn phase_bound(inputs: &PhaseBoundInputs) -> Result<f64> {
    if !(inputs.rho > 0.0) {
        return Err(invalid(format!("rho must be > 0, got {}", inputs.rho)));
    }
    Ok(0.5 * (2.0 / (PI * std::f64::consts::E * inputs.rho)).ln())
}

/// `ln 2 − ½ln π + ½ln ζ − ζρ`, the bound for an arbitrary ζ. Equals
/// [`phase_bound`] at `ζ = 1/(2ρ)`, where it is maximal.
pub fn phase_bound_with_zeta(rho: f64, zeta: f64) -> Result<f64> {
    if !(rho > 0.0 && zeta > 0.0) {
        return Err(invalid(format!("rho and zeta must be > 0, got {rho}, {zeta}")));
    }
    Ok(2f64.ln() - 0.5 * PI.ln() + 0.5 * zeta.ln() - zeta * rho)
}

/// Density of `Ψ = ∠(ρ + W)`, `W` unit-variance circular complex Gaussian:
/// `(1/2π)e^{−ρ²} + (ρcosψ/√(4π))·e^{−ρ²sin²ψ}·erfc(−ρcosψ)`.
pub fn cos_of_gaussian_phase_pdf(psi: f64, rho: f64) -> f64 {
    let (s, c) = psi.sin_cos();
    (-rho * rho).exp() / (2.0 * PI)
        + rho * c / (4.0 * PI).sqrt() * (-rho * rho * s * s).exp() * erfc(-rho * c)
}

const PDF_TOL: f64 = 1e-13;

fn integrate_pdf<F: Fn(f64) -> f64>(rho: f64, weight: F) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid(format!("rho must be finite and > 0, got {rho}")));
    }
    let mut f = |psi: f64| weight(psi) * cos_of_gaussian_phase_pdf(psi, rho);
    let mut total = 0.0;
    // the mass concentrates in |ψ| ≲ 1/ρ; split there so both panels resolve it
    let w = (4.0 / rho).min(PI);
    for (a, b) in [(-PI, -w), (-w, 0.0), (0.0, w), (w, PI)] {
        if b > a {
            total += integrate_adaptive(&mut f, a, b, PDF_TOL, 40).map_err(|e| Error::NumericFailure {
                v: rho,
                reason: format!("pdf quadrature failed on [{}, {}]", e.a, e.b),
            })?;
        }
    }
    Ok(total)
}

/// `∫ pdf` over `[−π, π]`; 1 up to quadrature error.
pub fn gaussian_phase_mass(rho: f64) -> Result<f64> {
    integrate_pdf(rho, |_| 1.0)
}

/// `E[cos Ψ]` by quadrature of the density.
pub fn mean_cos_gaussian_phase(rho: f64) -> Result<f64> {
    integrate_pdf(rho, f64::cos)
}

/// `1 − 1/ρ²`.
pub fn cos_gaussian_lower_bound(rho: f64) -> f64 {
    1.0 - 1.0 / (rho * rho)
}
