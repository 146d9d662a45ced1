use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::special::erf;

// Below this σ² the closed forms switch to their Taylor expansions.
const TAYLOR_SWITCH: f64 = 1e-8;

fn check_sigma2(sigma2: f64) -> Result<()> {
    if sigma2 >= 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("sigma2 must be finite and >= 0, got {sigma2}")))
    }
}

/// `E[F] = (2/σ²)(1 − e^{−σ²/2})`, real by symmetry.
pub fn closed_form_mean_f(sigma2: f64) -> Result<f64> {
    check_sigma2(sigma2)?;
    if sigma2 < TAYLOR_SWITCH {
        let s = sigma2;
        return Ok(1.0 - s / 4.0 + s * s / 24.0 - s.powi(3) / 192.0 + s.powi(4) / 1920.0);
    }
    Ok(-2.0 / sigma2 * (-0.5 * sigma2).exp_m1())
}

/// `√(2π/σ²) e^{−3σ²/8} erf(√(σ²/8))`, the closed form of
/// `E[F₀ e^{−jN₀}]`. It equals `∫₀¹ e^{−v(t)/2} dt` with
/// `v(t) = σ²(t² − t + 1)` (see [`rotated_phase_variance`]).
pub fn closed_form_mean_f_rot(sigma2: f64) -> Result<f64> {
    check_sigma2(sigma2)?;
    if sigma2 < TAYLOR_SWITCH {
        let s = sigma2;
        return Ok(1.0 - 5.0 * s / 12.0 + 7.0 * s * s / 80.0 - 83.0 * s.powi(3) / 6720.0
            + 319.0 * s.powi(4) / 241_920.0);
    }
    Ok((2.0 * PI / sigma2).sqrt() * (-0.375 * sigma2).exp() * erf((sigma2 / 8.0).sqrt()))
}

/// `v(t) = σ²(t² − t + 1)`.
pub fn rotated_phase_variance(sigma2: f64, t: f64) -> f64 {
    sigma2 * (t * t - t + 1.0)
}
