use std::f64::consts::{E, PI};

use crate::error::{invalid, Result};

/// High-SNR constants and the pre-log decomposition at one α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotics {
    pub alpha: f64,
    /// Limit of `I_amp − prelog_amplitude·ln SNR`.
    pub amp_offset: f64,
    /// Limit of `I_phase − (α/2) ln SNR`; meaningful for α ≤ 1/2 only.
    pub phase_offset: f64,
    pub prelog: f64,
    pub prelog_amplitude: f64,
    pub prelog_phase: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Total pre-log: `2α` on (0, 1/3], `(1+α)/2` on [1/3, 1/2], `3/4` on [1/2, 1).
pub fn prelog(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(prelog_amplitude(alpha)? + prelog_phase(alpha)?)
}

/// `3α/2` up to α = 1/3, then `1/2`.
pub fn prelog_amplitude(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha <= 1.0 / 3.0 { 1.5 * alpha } else { 0.5 })
}

/// `α/2` up to α = 1/2, then `1/4`.
pub fn prelog_phase(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha <= 0.5 { 0.5 * alpha } else { 0.25 })
}

/// Total pre-log written branch by branch, kept separate from the
/// component sum so the two can be checked against each other.
pub fn prelog_piecewise(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha <= 1.0 / 3.0 {
        2.0 * alpha
    } else if alpha <= 0.5 {
        0.5 * (1.0 + alpha)
    } else {
        0.75
    })
}

pub fn asymptotes_and_prelog(alpha: f64, gamma: f64, k: f64) -> Result<Asymptotics> {
    check_alpha(alpha)?;
    if !(k > 1.0) {
        return Err(invalid(format!("K must be > 1, got {k}")));
    }
    let amp_offset = if alpha >= 1.0 / 3.0 {
        -0.5 * (4.0 * PI * E).ln()
    } else {
        -0.5 * (2.0 * PI * gamma * gamma * E / 45.0).ln()
    };
    let phase_offset = 0.5 * (3.0 / (PI * E * (gamma * gamma + 3.0 * k))).ln();
    Ok(Asymptotics {
        alpha,
        amp_offset,
        phase_offset,
        prelog: prelog_piecewise(alpha)?,
        prelog_amplitude: prelog_amplitude(alpha)?,
        prelog_phase: prelog_phase(alpha)?,
    })
}
