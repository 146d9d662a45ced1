use crate::error::{invalid, Result};
use crate::params::ChannelParams;

use super::amplitude::{
    amplitude_bound_variant, default_support_exponent, nu_for_resolution, AmplitudeBoundInputs,
    AmplitudeVariant,
};
use super::asymptotics::asymptotes_and_prelog;
use super::kbound::reference_k;
use super::phase::{phase_bound_with_zeta, PhaseBoundInputs};

/// Everything needed to evaluate both bounds at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRequest {
    pub params: ChannelParams,
    /// Resolution exponent; defaults to `ln Δ⁻¹ / ln SNR`.
    pub alpha: Option<f64>,
    /// Overrides the ν schedule.
    pub nu: Option<f64>,
    /// Overrides `ζ = 1/(2ρ)`.
    pub zeta: Option<f64>,
    /// Overrides the reference K.
    pub k: Option<f64>,
    /// Height `g(0)` of the K-bound polynomial.
    pub a: f64,
    pub variant: AmplitudeVariant,
}

pub const DEFAULT_A: f64 = 1.3;

impl BoundRequest {
    pub fn new(params: ChannelParams) -> Self {
        Self {
            params,
            alpha: None,
            nu: None,
            zeta: None,
            k: None,
            a: DEFAULT_A,
            variant: AmplitudeVariant::Loose,
        }
    }

    /// `Δ⁻¹ = L = ⌈SNR^α⌉` with the default support exponent.
    pub fn from_alpha(gamma: f64, snr: f64, alpha: f64) -> Result<Self> {
        let t = default_support_exponent(alpha)?;
        let params = ChannelParams::from_alpha(gamma, snr, alpha, t, 1)?;
        Ok(Self {
            alpha: Some(alpha),
            ..Self::new(params)
        })
    }
}

/// Bound values with all intermediates. Rates are in nats per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub gamma: f64,
    pub snr: f64,
    pub alpha: f64,
    pub delta: f64,
    pub oversampling: usize,
    pub t: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub var_g: f64,
    pub mean_x_inv_sq: f64,
    pub rho: f64,
    pub zeta: f64,
    pub k: f64,
    pub i_amp: f64,
    pub i_phase: f64,
    pub i_total: f64,
    pub asymptote_amp: f64,
    pub asymptote_phase: f64,
    pub prelog: f64,
    pub prelog_amplitude: f64,
    pub prelog_phase: f64,
}

impl BoundReport {
    /// Column names, in the order of [`values`](Self::values).
    pub const COLUMNS: [&'static str; 22] = [
        "gamma",
        "snr",
        "alpha",
        "delta",
        "L",
        "t",
        "lambda",
        "mu",
        "nu",
        "var_g",
        "mean_x_inv_sq",
        "rho",
        "zeta",
        "K",
        "i_amp",
        "i_phase",
        "i_total",
        "asymptote_amp",
        "asymptote_phase",
        "prelog",
        "prelog_amplitude",
        "prelog_phase",
    ];

    /// Columns holding information quantities (subject to a nats→bits change).
    pub const RATE_COLUMNS: [&'static str; 5] =
        ["i_amp", "i_phase", "i_total", "asymptote_amp", "asymptote_phase"];

    pub fn values(&self) -> [f64; 22] {
        [
            self.gamma,
            self.snr,
            self.alpha,
            self.delta,
            self.oversampling as f64,
            self.t,
            self.lambda,
            self.mu,
            self.nu,
            self.var_g,
            self.mean_x_inv_sq,
            self.rho,
            self.zeta,
            self.k,
            self.i_amp,
            self.i_phase,
            self.i_total,
            self.asymptote_amp,
            self.asymptote_phase,
            self.prelog,
            self.prelog_amplitude,
            self.prelog_phase,
        ]
    }

    /// Checks the report's internal invariants.
    pub fn check(&self) -> Result<()> {
        let ok = self.lambda > 0.0
            && self.nu > 0.0
            && self.mu > 0.0
            && self.mu <= 1.0
            && self.var_g >= 0.0
            && self.rho > 0.0
            && self.zeta > 0.0
            && self.k > 1.0
            && (self.i_total - (self.i_amp + self.i_phase)).abs() <= 1e-12 * self.i_total.abs().max(1.0);
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("bound report violates its invariants: {self:?}")))
        }
    }
}

pub fn evaluate_bounds(req: &BoundRequest) -> Result<BoundReport> {
    let p = req.params;
    p.validate()?;
    let alpha = req.alpha.unwrap_or_else(|| p.implied_alpha());

    let nu = match req.nu {
        Some(nu) => nu,
        None => nu_for_resolution(alpha, p.gamma, p.delta)
            .map_err(|e| invalid(format!("no default nu ({e}); pass nu explicitly")))?,
    };
    let amp = AmplitudeBoundInputs::new(p, nu)?;
    let i_amp = amplitude_bound_variant(&amp, req.variant)?;

    let k = match req.k {
        Some(k) => k,
        None => reference_k(req.a, p.sigma())?.k,
    };
    let phase = match req.variant {
        AmplitudeVariant::Loose => PhaseBoundInputs::loose(p, k)?,
        AmplitudeVariant::Tight => PhaseBoundInputs::tight(p, k)?,
    };
    let phase = match req.zeta {
        Some(z) => phase.with_zeta(z)?,
        None => phase,
    };
    let i_phase = phase_bound_with_zeta(phase.rho, phase.zeta)?;

    let (asymptote_amp, asymptote_phase, prelog, prelog_amplitude, prelog_phase) =
        match asymptotes_and_prelog(alpha, p.gamma, k) {
            Ok(a) => (a.amp_offset, a.phase_offset, a.prelog, a.prelog_amplitude, a.prelog_phase),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };

    let report = BoundReport {
        gamma: p.gamma,
        snr: p.snr,
        alpha,
        delta: p.delta,
        oversampling: p.oversampling,
        t: p.t,
        lambda: amp.lambda,
        mu: amp.mu,
        nu,
        var_g: amp.var_g,
        mean_x_inv_sq: phase.mean_x_inv_sq,
        rho: phase.rho,
        zeta: phase.zeta,
        k,
        i_amp,
        i_phase,
        i_total: i_amp + i_phase,
        asymptote_amp,
        asymptote_phase,
        prelog,
        prelog_amplitude,
        prelog_phase,
    };
    report.check()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::phase::phase_bound;

    #[test]
    fn report_is_consistent() {
        let r = evaluate_bounds(&BoundRequest::from_alpha(1.0, 1e6, 0.5).unwrap()).unwrap();
        assert_eq!(r.oversampling, 1000);
        assert_eq!(r.nu, 4000.0);
        assert_eq!(r.i_total, r.i_amp + r.i_phase);
        assert!((r.zeta - 0.5 / r.rho).abs() < 1e-15);
        assert_eq!(r.prelog, 0.75);
        assert!((r.i_amp - 0.5 * 1e6f64.ln() - r.asymptote_amp).abs() < 0.15);
        let inputs = PhaseBoundInputs::loose(
            ChannelParams::from_alpha(1.0, 1e6, 0.5, 0.5, 1).unwrap(),
            r.k,
        )
        .unwrap();
        assert!((phase_bound(&inputs).unwrap() - r.i_phase).abs() < 1e-14);
        assert_eq!(BoundReport::COLUMNS.len(), r.values().len());
    }

    #[test]
    fn overrides_and_infeasible_rows() {
        let p = ChannelParams::new(1.0, 0.1, 10, 1, 1000.0, 1.0).unwrap();
        let mut req = BoundRequest::new(p);
        req.nu = Some(40.0);
        req.zeta = Some(2.0);
        req.k = Some(8.1353);
        let r = evaluate_bounds(&req).unwrap();
        assert_eq!((r.nu, r.zeta, r.k), (40.0, 2.0, 8.1353));
        assert!((r.alpha - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.prelog - 2.0 / 3.0).abs() < 1e-12);

        // Δ > 1 has no resolution exponent in (0, 1)
        let p = ChannelParams::new(0.1, 2.0, 1, 1, 1000.0, 1.0).unwrap();
        let mut req = BoundRequest::new(p);
        req.nu = Some(10.0);
        req.k = Some(8.0);
        let r = evaluate_bounds(&req).unwrap();
        assert!(r.prelog.is_nan() && r.asymptote_amp.is_nan());
        req.nu = None;
        assert!(evaluate_bounds(&req).is_err());

        let p = ChannelParams::new(1.0, 0.1, 10, 1, 100.0, 1.0).unwrap();
        assert!(matches!(
            evaluate_bounds(&BoundRequest::new(p)),
            Err(crate::Error::InfeasiblePower { .. })
        ));
    }
}
