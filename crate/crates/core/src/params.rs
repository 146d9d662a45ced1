use crate::error::{invalid, Error, Result};

/// Scalar model parameters of the oversampled Wiener phase noise channel.
///
/// The noise power spectral density is fixed to one, so `snr` is also the
/// average input power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Phase-noise rate γ in rad/√s.
    pub gamma: f64,
    /// Receiver time resolution Δ in seconds.
    pub delta: f64,
    /// Samples per symbol L.
    pub oversampling: usize,
    /// Symbols per frame M.
    pub num_symbols: usize,
    pub snr: f64,
    /// Support exponent t of the input law (`|X|² ≥ Δ^{-t}`).
    pub t: f64,
}

impl ChannelParams {
    pub fn new(
        gamma: f64,
        delta: f64,
        oversampling: usize,
        num_symbols: usize,
        snr: f64,
        t: f64,
    ) -> Result<Self> {
        let p = Self {
            gamma,
            delta,
            oversampling,
            num_symbols,
            snr,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    /// High-SNR parametrisation: `Δ⁻¹ = ⌈SNR^α⌉` with unit symbol time, so
    /// `L = Δ⁻¹`.
    pub fn from_alpha(gamma: f64, snr: f64, alpha: f64, t: f64, num_symbols: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(snr > 1.0) {
            return Err(invalid(format!("snr must exceed 1 for the alpha schedule, got {snr}")));
        }
        let resolution = resolution_for(snr, alpha);
        Self::new(gamma, 1.0 / resolution as f64, resolution, num_symbols, snr, t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid(format!("delta must be > 0, got {}", self.delta)));
        }
        if self.oversampling == 0 {
            return Err(invalid("oversampling factor L must be >= 1"));
        }
        if self.num_symbols == 0 {
            return Err(invalid("number of symbols M must be >= 1"));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(invalid(format!("snr must be > 0, got {}", self.snr)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(invalid(format!("support exponent t must be > 0, got {}", self.t)));
        }
        Ok(())
    }

    pub fn with_num_symbols(mut self, num_symbols: usize) -> Self {
        self.num_symbols = num_symbols.max(1);
        self
    }

    /// Per-interval phase variance σ² = γ²Δ.
    pub fn sigma2(&self) -> f64 {
        self.gamma * self.gamma * self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.gamma * self.delta.sqrt()
    }

    /// γ²Δ/2, the argument of the |F| moment formulas.
    pub fn half_sigma2(&self) -> f64 {
        0.5 * self.sigma2()
    }

    pub fn symbol_time(&self) -> f64 {
        self.oversampling as f64 * self.delta
    }

    /// Lower edge of the input support, `Δ^{-t}`.
    pub fn support_floor(&self) -> f64 {
        self.delta.powf(-self.t)
    }

    /// `SNR·Δ − Δ^{-t}`; may be non-positive.
    pub fn lambda(&self) -> f64 {
        self.snr * self.delta - self.support_floor()
    }

    /// The input scale λ, or an infeasible-power error when λ ≤ 0.
    pub fn input_scale(&self) -> Result<f64> {
        let lambda = self.lambda();
        if lambda > 0.0 {
            Ok(lambda)
        } else {
            Err(Error::InfeasiblePower {
                lambda,
                snr: self.snr,
                delta: self.delta,
                t: self.t,
            })
        }
    }

    /// Average input energy per sample, `E|X|² = SNR·Δ`.
    pub fn mean_input_energy(&self) -> f64 {
        self.snr * self.delta
    }

    /// Exact `E[|X|^{-2}]` under the shifted-exponential input.
    pub fn mean_inverse_energy(&self) -> Result<f64> {
        let lambda = self.input_scale()?;
        let c = self.support_floor();
        Ok(crate::special::exp_int_e1_scaled(c / lambda) / lambda)
    }

    /// SNR exponent α implied by the resolution, `ln(Δ⁻¹)/ln(SNR)`.
    pub fn implied_alpha(&self) -> f64 {
        (1.0 / self.delta).ln() / self.snr.ln()
    }
}

/// `⌈SNR^α⌉`, guarding against round-up of values that are integers in
/// exact arithmetic (e.g. `1e6^0.5`).
pub fn resolution_for(snr: f64, alpha: f64) -> usize {
    let x = snr.powf(alpha);
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x {
        nearest.max(1.0) as usize
    } else {
        x.ceil() as usize
    }
}
