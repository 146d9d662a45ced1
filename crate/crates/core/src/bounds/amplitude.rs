use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::params::{resolution_for, ChannelParams};
use crate::special::exp_int_e1_scaled;
use crate::stochastic::{mean_g, var_g};

/// Which constants enter the conditional-entropy term of the amplitude bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeVariant {
    /// `2E[G] → 2`, `E|X|⁻² → Δ^t`, `E ln|X|² → ln λ + Δ^{-t}/λ`.
    #[default]
    Loose,
    /// Exact `2E[G]`, `E|X|⁻²` and `E ln|X|²` under the shifted-exponential input.
    Tight,
}

/// Parameters of the auxiliary Gaussian-shaped amplitude channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeBoundInputs {
    pub params: ChannelParams,
    /// Width ν of the auxiliary kernel.
    pub nu: f64,
    /// Mean slope μ = E[G].
    pub mu: f64,
    pub lambda: f64,
    pub var_g: f64,
}

impl AmplitudeBoundInputs {
    /// μ and Var G from the closed-form moments, λ from the power constraint.
    pub fn new(params: ChannelParams, nu: f64) -> Result<Self> {
        params.validate()?;
        params.input_scale()?;
        Self::with_moments(params, nu, mean_g(&params)?, var_g(&params)?)
    }

    pub fn with_moments(params: ChannelParams, nu: f64, mu: f64, var_g: f64) -> Result<Self> {
        let lambda = params.input_scale()?;
        let inputs = Self {
            params,
            nu,
            mu,
            lambda,
            var_g,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(invalid(format!("nu must be finite and > 0, got {}", self.nu)));
        }
        if !(self.lambda > 0.0) {
            return self.params.input_scale().map(|_| ());
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(invalid(format!("mu = E[G] must lie in (0, 1], got {}", self.mu)));
        }
        if !(self.var_g >= 0.0) {
            return Err(invalid(format!("Var G must be >= 0, got {}", self.var_g)));
        }
        Ok(())
    }
}

/// Amplitude bound in nats/symbol, loose constants. May be negative.
pub fn amplitude_bound(inputs: &AmplitudeBoundInputs) -> Result<f64> {
    amplitude_bound_variant(inputs, AmplitudeVariant::Loose)
}

pub fn amplitude_bound_variant(inputs: &AmplitudeBoundInputs, variant: AmplitudeVariant) -> Result<f64> {
    inputs.validate()?;
    let p = &inputs.params;
    let l = p.oversampling as f64;
    let (lambda, nu, mu) = (inputs.lambda, inputs.nu, inputs.mu);
    let c = p.support_floor();

    // E[-ln q_V] ≥ -c/λ + ½ln(L²μ²λ² + λν)
    let output_term = -c / lambda + 0.5 * (l * l * mu * mu * lambda * lambda + lambda * nu).ln();

    let conditional = match variant {
        AmplitudeVariant::Loose => {
            0.5 * (PI * nu * lambda).ln()
                + c / (2.0 * lambda)
                + l / nu * (p.snr * inputs.var_g + 2.0 + p.delta.powf(p.t))
        }
        AmplitudeVariant::Tight => {
            let u = c / lambda;
            let scaled_e1 = exp_int_e1_scaled(u);
            let mean_ln_x = c.ln() + scaled_e1;
            let mean_inv_x = scaled_e1 / lambda;
            0.5 * (PI * nu).ln()
                + 0.5 * mean_ln_x
                + l / nu * (p.snr * inputs.var_g + 2.0 * mu + mean_inv_x)
        }
    };
    Ok(output_term - conditional)
}

/// `max(bound, 0)`: a negative rate bound is vacuous.
pub fn amplitude_bound_clamped(inputs: &AmplitudeBoundInputs) -> Result<f64> {
    Ok(amplitude_bound(inputs)?.max(0.0))
}

/// Largest support exponent used by default: `t = min(1, ½(1/α − 1))`,
/// which keeps `α < 1/(t+1)` with margin.
pub fn default_support_exponent(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((0.5 * (1.0 / alpha - 1.0)).min(1.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// ν for a given resolution: `4Δ⁻¹` when `α ≥ 1/3`, else
/// `(2γ²/45)Δ^{−(1/α−2)}`.
pub fn nu_for_resolution(alpha: f64, gamma: f64, delta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be > 0, got {delta}")));
    }
    if alpha >= 1.0 / 3.0 {
        Ok(4.0 / delta)
    } else {
        if gamma <= 0.0 {
            return Err(invalid("the alpha < 1/3 schedule needs gamma > 0"));
        }
        Ok(2.0 * gamma * gamma / 45.0 * delta.powf(-(1.0 / alpha - 2.0)))
    }
}

/// `(ν, t)` for `Δ⁻¹ = ⌈SNR^α⌉`.
pub fn amplitude_nu_schedule(alpha: f64, snr: f64, gamma: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(snr > 1.0) {
        return Err(invalid(format!("snr must exceed 1, got {snr}")));
    }
    let delta = 1.0 / resolution_for(snr, alpha) as f64;
    Ok((nu_for_resolution(alpha, gamma, delta)?, default_support_exponent(alpha)?))
}
