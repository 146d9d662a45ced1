//! Discrete oversampled channel
//! `Y_n = X_{⌈n/L⌉} e^{jΘ_n} F_n + W_n`, `Θ_{n+1} = Θ_n + N_n`.
//!
//! Symbol indices are zero-based: symbol `k` occupies output samples
//! `k·L .. (k+1)·L`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::params::ChannelParams;
use crate::stochastic::{interval_sample_unchecked, IncrementRule, IntervalSample, DEFAULT_INNER_STEPS};

/// Wraps an angle to `[−π, π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can return exactly 2π for tiny negative inputs
    if y >= PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// One channel input `X = √(amplitude_sq) e^{j·phase}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSymbol {
    pub amplitude_sq: f64,
    pub phase: f64,
}

impl InputSymbol {
    pub fn new(amplitude_sq: f64, phase: f64) -> Self {
        Self {
            amplitude_sq,
            phase: wrap_phase(phase),
        }
    }

    pub fn zero() -> Self {
        Self {
            amplitude_sq: 0.0,
            phase: 0.0,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude_sq.sqrt(), self.phase)
    }
}

/// Draws `|X|² = Δ^{-t} + Exp(mean λ)` and a uniform phase on `[−π, π)`.
pub fn sample_input<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<InputSymbol> {
    let lambda = params.input_scale()?;
    let exp = Exp::new(1.0 / lambda).map_err(|e| invalid(e.to_string()))?;
    Ok(draw_input(params.support_floor(), &exp, rng))
}

#[inline]
fn draw_input<R: Rng + ?Sized>(floor: f64, exp: &Exp<f64>, rng: &mut R) -> InputSymbol {
    let amplitude_sq = floor + exp.sample(rng);
    let phase = rng.random_range(-PI..PI);
    InputSymbol { amplitude_sq, phase }
}

/// Input sampler with the distribution parameters resolved once.
#[derive(Debug, Clone, Copy)]
pub struct InputSampler {
    floor: f64,
    exp: Exp<f64>,
}

impl InputSampler {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        let lambda = params.input_scale()?;
        Ok(Self {
            floor: params.support_floor(),
            exp: Exp::new(1.0 / lambda).map_err(|e| invalid(e.to_string()))?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InputSymbol {
        draw_input(self.floor, &self.exp, rng)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<InputSymbol> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Circularly symmetric complex Gaussian with unit variance.
#[inline]
pub fn complex_noise<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Known symbol sent ahead of a frame so that the first symbol has a
/// differential phase reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pilot {
    pub symbol: InputSymbol,
    /// Last output sample of the pilot block.
    pub last_output: Complex64,
    /// Channel state of the pilot's last interval.
    pub last_state: IntervalSample,
}

/// One transmitted frame with its full channel realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    oversampling: usize,
    pub symbols: Vec<InputSymbol>,
    pub pilot: Option<Pilot>,
    /// `(F_n, N_n)` for each of the `M·L` intervals.
    pub channel_state: Vec<IntervalSample>,
    /// Unwrapped phase `Θ_n` at the start of each interval.
    pub theta: Vec<f64>,
    pub outputs: Vec<Complex64>,
}

/// Amplitude and differential-phase statistics of one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverStats {
    /// `V = ‖Y_k‖²`.
    pub v: f64,
    /// Differential phase `Φ` in `[−π, π)`.
    pub phi: f64,
}

impl Frame {
    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn block(&self, k: usize) -> Result<&[Complex64]> {
        self.check_index(k)?;
        let l = self.oversampling;
        Ok(&self.outputs[k * l..(k + 1) * l])
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k < self.symbols.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                len: self.symbols.len(),
            })
        }
    }

    /// `V = Σ_i |Y_{kL+i}|²`.
    pub fn amplitude_stat(&self, k: usize) -> Result<f64> {
        Ok(self.block(k)?.iter().map(|y| y.norm_sqr()).sum())
    }

    /// `Φ = ∠(Y_first(k) · (Y_last(k−1) e^{−j·prev_phase})*)`, wrapped.
    ///
    /// For `k = 0` the last pilot sample is the reference; without a pilot
    /// that is an index error.
    pub fn phase_stat(&self, k: usize, prev_phase: f64) -> Result<f64> {
        self.check_index(k)?;
        let l = self.oversampling;
        let current_idx = k * l;
        let current = self.outputs[current_idx];
        let previous = if k == 0 {
            match &self.pilot {
                Some(p) => p.last_output,
                None => return Err(Error::IndexOutOfRange { index: 0, len: self.symbols.len() }),
            }
        } else {
            self.outputs[current_idx - 1]
        };
        if current == Complex64::new(0.0, 0.0) {
            return Err(Error::UndefinedPhase { index: current_idx });
        }
        if previous == Complex64::new(0.0, 0.0) {
            return Err(Error::UndefinedPhase {
                index: current_idx.wrapping_sub(1),
            });
        }
        let reference = previous * Complex64::from_polar(1.0, -prev_phase);
        Ok(wrap_phase((current * reference.conj()).arg()))
    }

    /// Phase of the symbol preceding `k` (the pilot for `k = 0`).
    pub fn previous_phase(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        if k == 0 {
            self.pilot
                .map(|p| p.symbol.phase)
                .ok_or(Error::IndexOutOfRange { index: 0, len: self.symbols.len() })
        } else {
            Ok(self.symbols[k - 1].phase)
        }
    }

    pub fn receiver_stats(&self, k: usize) -> Result<ReceiverStats> {
        Ok(ReceiverStats {
            v: self.amplitude_stat(k)?,
            phi: self.phase_stat(k, self.previous_phase(k)?)?,
        })
    }

    /// Debug dump, one row per output sample:
    /// `n,re_y,im_y,theta,re_f,im_f,N,symbol_index` (both indices zero-based).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        use crate::csv::real;
        writeln!(out, "n,re_y,im_y,theta,re_f,im_f,N,symbol_index")?;
        for (n, ((y, th), st)) in self
            .outputs
            .iter()
            .zip(&self.theta)
            .zip(&self.channel_state)
            .enumerate()
        {
            writeln!(
                out,
                "{n},{},{},{},{},{},{},{}",
                real(y.re),
                real(y.im),
                real(*th),
                real(st.fading.re),
                real(st.fading.im),
                real(st.increment),
                n / self.oversampling
            )?;
        }
        Ok(())
    }
}

/// Configurable frame generator.
#[derive(Debug, Clone, Copy)]
pub struct Transmitter {
    params: ChannelParams,
    inner_steps: usize,
    increment_rule: IncrementRule,
    noiseless: bool,
}

impl Transmitter {
    pub fn new(params: ChannelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            inner_steps: DEFAULT_INNER_STEPS,
            increment_rule: IncrementRule::Endpoint,
            noiseless: false,
        })
    }

    pub fn inner_steps(mut self, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(invalid("inner quadrature needs at least 2 steps"));
        }
        self.inner_steps = steps;
        Ok(self)
    }

    pub fn increment_rule(mut self, rule: IncrementRule) -> Self {
        self.increment_rule = rule;
        self
    }

    /// Forces `W ≡ 0` (test fixture for the noiseless channel).
    pub fn noiseless(mut self) -> Self {
        self.noiseless = true;
        self
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn transmit<R: Rng + ?Sized>(&self, symbols: &[InputSymbol], rng: &mut R) -> Result<Frame> {
        self.run(None, symbols, rng)
    }

    /// Like [`transmit`](Self::transmit) but preceded by a pilot block, so
    /// that symbol 0 has a phase reference.
    pub fn transmit_with_pilot<R: Rng + ?Sized>(
        &self,
        pilot: InputSymbol,
        symbols: &[InputSymbol],
        rng: &mut R,
    ) -> Result<Frame> {
        self.run(Some(pilot), symbols, rng)
    }

    fn run<R: Rng + ?Sized>(
        &self,
        pilot: Option<InputSymbol>,
        symbols: &[InputSymbol],
        rng: &mut R,
    ) -> Result<Frame> {
        if symbols.len() != self.params.num_symbols {
            return Err(invalid(format!(
                "frame expects {} symbols, got {}",
                self.params.num_symbols,
                symbols.len()
            )));
        }
        let l = self.params.oversampling;
        let sigma = self.params.sigma();
        let mut theta = rng.random_range(-PI..PI);

        let pilot = pilot.map(|symbol| {
            let x = symbol.value();
            let mut last = (Complex64::new(0.0, 0.0), IntervalSample::UNIT);
            for _ in 0..l {
                let (y, st) = self.emit(x, theta, sigma, rng);
                theta += st.phase_increment(self.increment_rule);
                last = (y, st);
            }
            Pilot {
                symbol,
                last_output: last.0,
                last_state: last.1,
            }
        });

        let n = symbols.len() * l;
        let mut channel_state = Vec::with_capacity(n);
        let mut thetas = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        for sym in symbols {
            let x = sym.value();
            for _ in 0..l {
                let (y, st) = self.emit(x, theta, sigma, rng);
                thetas.push(theta);
                channel_state.push(st);
                outputs.push(y);
                theta += st.phase_increment(self.increment_rule);
            }
        }
        Ok(Frame {
            oversampling: l,
            symbols: symbols.to_vec(),
            pilot,
            channel_state,
            theta: thetas,
            outputs,
        })
    }

    #[inline]
    fn emit<R: Rng + ?Sized>(
        &self,
        x: Complex64,
        theta: f64,
        sigma: f64,
        rng: &mut R,
    ) -> (Complex64, IntervalSample) {
        let st = interval_sample_unchecked(sigma, self.inner_steps, rng);
        let w = if self.noiseless {
            Complex64::new(0.0, 0.0)
        } else {
            complex_noise(rng)
        };
        (x * Complex64::from_polar(1.0, theta) * st.fading + w, st)
    }
}

/// Transmits `symbols` with default settings (512 inner steps, endpoint
/// increments, unit-variance noise).
pub fn transmit<R: Rng + ?Sized>(
    params: &ChannelParams,
    symbols: &[InputSymbol],
    rng: &mut R,
) -> Result<Frame> {
    Transmitter::new(*params)?.transmit(symbols, rng)
}
