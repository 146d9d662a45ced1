use std::f64::consts::PI;

use crate::channel::{InputSampler, Transmitter};
use crate::error::{invalid, Error, Result};
use crate::params::ChannelParams;
use crate::quadrature::{integrate_adaptive, GaussLegendre};
use crate::stats::{McEstimate, Welford};
use crate::stochastic::mean_g;

use super::{run_blocks, tags, McConfig};

const REL_TOL: f64 = 1e-9;
const SPAN: f64 = 40.0;

/// The Gaussian-shaped auxiliary kernel `q(v|x)` and the induced output
/// density `q_V(v) = ∫ p(x) q(v|x) dx` over the shifted-exponential input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxOutputDensity {
    l: f64,
    mu: f64,
    nu: f64,
    lambda: f64,
    floor: f64,
}

impl AuxOutputDensity {
    pub fn new(params: &ChannelParams, nu: f64, mu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(invalid(format!("nu must be finite and > 0, got {nu}")));
        }
        Ok(Self {
            l: params.oversampling as f64,
            mu,
            nu,
            lambda: params.input_scale()?,
            floor: params.support_floor(),
        })
    }

    /// `ln q(v|x) = −½ln(πνx) − (v − L(1 + xμ))²/(νx)`.
    pub fn ln_kernel(&self, v: f64, x: f64) -> f64 {
        let d = v - self.l * (1.0 + x * self.mu);
        -0.5 * (PI * self.nu * x).ln() - d * d / (self.nu * x)
    }

    /// Log of `p(x) q(v|x)`.
    fn ln_integrand(&self, v: f64, x: f64) -> f64 {
        -(x - self.floor) / self.lambda - self.lambda.ln() + self.ln_kernel(v, x)
    }

    /// Maximiser of the integrand on `[floor, ∞)` and the curvature scale there.
    fn mode(&self, v: f64) -> (f64, f64) {
        let a = v - self.l;
        let b = self.l * self.mu;
        let k = 1.0 / self.lambda + b * b / self.nu;
        let x = (-0.5 + (0.25 + 4.0 * k * a * a / self.nu).sqrt()) / (2.0 * k);
        let x = x.max(self.floor);
        // ℓ''(x) = 1/(2x²) − 2A²/(νx³)
        let curv = 0.5 / (x * x) - 2.0 * a * a / (self.nu * x.powi(3));
        let width = if curv < 0.0 {
            (1.0 / -curv).sqrt()
        } else {
            self.lambda
        };
        (x, width.min(SPAN * self.lambda).max(1e-12 * x))
    }

    /// `ln q_V(v)` by adaptive Gauss–Legendre quadrature in the log domain.
    pub fn ln_density(&self, v: f64) -> Result<f64> {
        let fail = |reason: String| Error::NumericFailure { v, reason };
        if !v.is_finite() {
            return Err(fail("non-finite argument".into()));
        }
        let (x_star, width) = self.mode(v);
        let peak = self.ln_integrand(v, x_star);
        let mut upper = (self.floor + SPAN * self.lambda).max(x_star + SPAN * width);

        let mut edges: Vec<f64> = [-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|k| x_star + k * width)
            .filter(|&e| e > self.floor && e < upper)
            .collect();
        edges.insert(0, self.floor);
        edges.push(upper);

        let mut f = |x: f64| (self.ln_integrand(v, x) - peak).exp();
        let rule = GaussLegendre::order20();
        let coarse: f64 = edges.windows(2).map(|w| rule.integrate(&mut f, w[0], w[1])).sum();
        if !(coarse > 0.0 && coarse.is_finite()) {
            return Err(fail(format!("degenerate integrand (coarse estimate {coarse})")));
        }
        let tol = REL_TOL * coarse / edges.len() as f64;
        let mut total = 0.0;
        for w in edges.windows(2) {
            total += integrate_adaptive(&mut f, w[0], w[1], tol, 50)
                .map_err(|e| fail(format!("no convergence on [{}, {}]", e.a, e.b)))?;
        }

        // tail beyond `upper`: ∫ p(x)q(v|x) ≤ e^{−(upper−floor)/λ}/√(πν·upper)
        for _ in 0..64 {
            let ln_tail = -(upper - self.floor) / self.lambda - 0.5 * (PI * self.nu * upper).ln();
            if ln_tail - peak < (1e-12 * total).ln() {
                break;
            }
            let next = upper + SPAN * self.lambda;
            total += integrate_adaptive(&mut f, upper, next, tol, 50)
                .map_err(|e| fail(format!("no convergence on tail [{}, {}]", e.a, e.b)))?;
            upper = next;
        }
        Ok(peak + total.ln())
    }
}

/// Mismatched-decoding estimate of `I(|X₁|²; V)` in nats:
/// `mean[−ln q_V(V)] − mean[−ln q(V | |X₁|²)]` with `μ = E[G]`.
pub fn mc_amplitude_mi(params: &ChannelParams, nu: f64, cfg: &McConfig) -> Result<McEstimate> {
    let params = params.with_num_symbols(1);
    let aux = AuxOutputDensity::new(&params, nu, mean_g(&params)?)?;
    let sampler = InputSampler::new(&params)?;
    let tx = Transmitter::new(params)?.inner_steps(cfg.inner_steps)?;
    let (blocks, wall) = run_blocks(cfg, tags::AMPLITUDE, |rng, count| {
        let mut acc = Welford::new();
        for _ in 0..count {
            let x = sampler.sample(rng);
            let frame = tx.transmit(std::slice::from_ref(&x), rng)?;
            let v = frame.amplitude_stat(0)?;
            acc.push(aux.ln_kernel(v, x.amplitude_sq) - aux.ln_density(v)?);
        }
        Ok(acc)
    })?;
    let mut total = Welford::new();
    for b in &blocks {
        total.merge(b);
    }
    Ok(McEstimate::from_welford(&total, cfg.master_seed, wall))
}
