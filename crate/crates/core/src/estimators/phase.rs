use num_complex::Complex64;

use crate::channel::{complex_noise, InputSampler, InputSymbol, Transmitter};
use crate::error::{invalid, Result};
use crate::params::ChannelParams;
use crate::rng::StreamRng;
use crate::special::ln_bessel_i0;
use crate::stats::{McEstimate, Welford};
use crate::stochastic::interval_sample_unchecked;

use super::{run_blocks, tags, McConfig};

/// `cos(Φ − ∠X₁)` for one fresh two-symbol frame; the first symbol's phase
/// is known to the receiver.
fn cos_phase_error(
    sampler: &InputSampler,
    tx: &Transmitter,
    rng: &mut StreamRng,
) -> Result<f64> {
    let symbols: [InputSymbol; 2] = [sampler.sample(rng), sampler.sample(rng)];
    let frame = tx.transmit(&symbols, rng)?;
    let phi = frame.phase_stat(1, symbols[0].phase)?;
    Ok((phi - symbols[1].phase).cos())
}

fn mean_cos(params: &ChannelParams, cfg: &McConfig, tag: u16) -> Result<McEstimate> {
    let params = params.with_num_symbols(2);
    let sampler = InputSampler::new(&params)?;
    let tx = Transmitter::new(params)?.inner_steps(cfg.inner_steps)?;
    let (blocks, wall) = run_blocks(cfg, tag, |rng, count| {
        let mut acc = Welford::new();
        for _ in 0..count {
            acc.push(cos_phase_error(&sampler, &tx, rng)?);
        }
        Ok(acc)
    })?;
    let mut total = Welford::new();
    for b in &blocks {
        total.merge(b);
    }
    Ok(McEstimate::from_welford(&total, cfg.master_seed, wall))
}

/// Mismatched-decoding estimate of the phase information in nats:
/// `ln 2π − [ln(2πI₀(ζ)) − ζ·mean cos(Φ − ∠X₁)]`.
pub fn mc_phase_mi(params: &ChannelParams, zeta: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(invalid(format!("zeta must be finite and > 0, got {zeta}")));
    }
    let cos = mean_cos(params, cfg, tags::PHASE)?;
    Ok(cos.affine(zeta, -ln_bessel_i0(zeta)))
}

/// `E[cos(Φ − ∠X₁)]` and its factorised form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCosPhi {
    /// Direct estimate from differential detection.
    pub joint: McEstimate,
    /// `E[cos∠(|X₁|F₁ + W₁)]`.
    pub factor_current: McEstimate,
    /// `E[cos∠(|X₀|F₀* e^{jN₀} + W₀*)]`.
    pub factor_previous: McEstimate,
    /// Product of the two factors; standard error by the delta method.
    pub product: McEstimate,
}

pub fn mc_cos_phi(params: &ChannelParams, cfg: &McConfig) -> Result<McCosPhi> {
    let joint = mean_cos(params, cfg, tags::COS_PHI)?;

    let sampler = InputSampler::new(params)?;
    let sigma = params.sigma();
    let steps = cfg.inner_steps;
    let factor = |tag: u16, previous: bool| -> Result<McEstimate> {
        let (blocks, wall) = run_blocks(cfg, tag, |rng, count| {
            let mut acc = Welford::new();
            for _ in 0..count {
                let amp = sampler.sample(rng).amplitude_sq.sqrt();
                let s = interval_sample_unchecked(sigma, steps, rng);
                let w = complex_noise(rng);
                let z = if previous {
                    amp * s.fading.conj() * Complex64::from_polar(1.0, s.increment) + w.conj()
                } else {
                    amp * s.fading + w
                };
                acc.push(z.re / z.norm());
            }
            Ok(acc)
        })?;
        let mut total = Welford::new();
        for b in &blocks {
            total.merge(b);
        }
        Ok(McEstimate::from_welford(&total, cfg.master_seed, wall))
    };
    let current = factor(tags::COS_FACTOR_CURRENT, false)?;
    let previous = factor(tags::COS_FACTOR_PREVIOUS, true)?;
    let value = current.value * previous.value;
    let se = ((current.value * previous.std_error).powi(2) + (previous.value * current.std_error).powi(2)).sqrt();
    Ok(McCosPhi {
        joint,
        factor_current: current,
        factor_previous: previous,
        product: McEstimate {
            value,
            std_error: se,
            n_samples: current.n_samples.min(previous.n_samples),
            seed: cfg.master_seed,
            wall_time: current.wall_time + previous.wall_time,
        },
    })
}
