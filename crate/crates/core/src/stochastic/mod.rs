//! Wiener paths, the per-interval fading/increment pair, and closed-form
//! statistics of the fading coefficient.

mod closed_form;
mod moments;

pub use closed_form::{closed_form_mean_f, closed_form_mean_f_rot, rotated_phase_variance};
pub use moments::{
    closed_form_moments, exact_moments, mean_g, var_g, var_g_from_moments, var_z2, FadingMoments,
    MomentFormula, ZMoments,
};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::params::ChannelParams;

/// Default number of quadrature steps per receiver interval.
pub const DEFAULT_INNER_STEPS: usize = 512;

/// Standard Brownian motion on [0, 1] sampled on the grid `k / steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    values: Vec<f64>,
}

impl WienerPath {
    /// Builds a path from explicit grid values; the first must be zero.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("a path needs at least two grid values"));
        }
        if values[0] != 0.0 {
            return Err(invalid("a Wiener path starts at zero"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn endpoint(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Cumulative sum of `steps` iid N(0, 1/steps) increments, prefixed by 0.
pub fn sample_wiener_path<R: Rng + ?Sized>(steps: usize, rng: &mut R) -> Result<WienerPath> {
    if steps == 0 {
        return Err(invalid("steps must be >= 1"));
    }
    let sd = (1.0 / steps as f64).sqrt();
    let mut values = Vec::with_capacity(steps + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        values.push(b);
    }
    Ok(WienerPath { values })
}

/// Which random variable drives the phase update `Θ_{n+1} = Θ_n + N_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IncrementRule {
    /// `N = σ B(1)`, the phase accumulated over the interval.
    #[default]
    Endpoint,
    /// `N = σ ∫₀¹ B(τ) dτ`, the alternative reading used for reconciling
    /// the `E[F₀ e^{-jN₀}]` closed form.
    TimeAverage,
}

/// Fading coefficient and phase increments of one receiver interval,
/// all drawn from the same inner path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSample {
    /// `F = ∫₀¹ e^{jσB(t)} dt` (trapezoidal quadrature).
    pub fading: Complex64,
    /// `σ B(1)`.
    pub increment: f64,
    /// `σ ∫₀¹ B(t) dt` (trapezoidal quadrature).
    pub increment_time_avg: f64,
}

impl IntervalSample {
    /// The deterministic sample of a noiseless phase (γ = 0).
    pub const UNIT: IntervalSample = IntervalSample {
        fading: Complex64::new(1.0, 0.0),
        increment: 0.0,
        increment_time_avg: 0.0,
    };

    pub fn from_path(path: &WienerPath, sigma: f64) -> Self {
        let mut acc = TrapezoidAccumulator::start();
        let last = path.steps();
        for (k, &b) in path.values().iter().enumerate().skip(1) {
            acc.add(sigma, b, k == last);
        }
        acc.finish(sigma, path.endpoint(), last)
    }

    pub fn phase_increment(&self, rule: IncrementRule) -> f64 {
        match rule {
            IncrementRule::Endpoint => self.increment,
            IncrementRule::TimeAverage => self.increment_time_avg,
        }
    }
}

struct TrapezoidAccumulator {
    phasor: Complex64,
    path_sum: f64,
}

impl TrapezoidAccumulator {
    fn start() -> Self {
        // B(0) = 0 contributes e^{j0}/2 and 0/2.
        Self {
            phasor: Complex64::new(0.5, 0.0),
            path_sum: 0.0,
        }
    }

    #[inline]
    fn add(&mut self, sigma: f64, b: f64, is_last: bool) {
        let (s, c) = (sigma * b).sin_cos();
        if is_last {
            self.phasor += Complex64::new(0.5 * c, 0.5 * s);
            self.path_sum += 0.5 * b;
        } else {
            self.phasor += Complex64::new(c, s);
            self.path_sum += b;
        }
    }

    fn finish(self, sigma: f64, endpoint: f64, steps: usize) -> IntervalSample {
        let n = steps as f64;
        IntervalSample {
            fading: self.phasor / n,
            increment: sigma * endpoint,
            increment_time_avg: sigma * self.path_sum / n,
        }
    }
}

/// Draws one `(F, N)` pair for an interval of the channel described by
/// `params`, using `steps` quadrature steps on the inner path.
///
/// Equivalent to [`sample_wiener_path`] followed by
/// [`IntervalSample::from_path`] (same random draws, same arithmetic), but
/// without allocating the path.
pub fn interval_sample<R: Rng + ?Sized>(
    params: &ChannelParams,
    steps: usize,
    rng: &mut R,
) -> Result<IntervalSample> {
    if steps < 2 {
        return Err(invalid("interval quadrature needs at least 2 steps"));
    }
    Ok(interval_sample_unchecked(params.sigma(), steps, rng))
}

pub(crate) fn interval_sample_unchecked<R: Rng + ?Sized>(
    sigma: f64,
    steps: usize,
    rng: &mut R,
) -> IntervalSample {
    let sd = (1.0 / steps as f64).sqrt();
    let mut acc = TrapezoidAccumulator::start();
    let mut b = 0.0;
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        acc.add(sigma, b, k == steps);
    }
    acc.finish(sigma, b, steps)
}
