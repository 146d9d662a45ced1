//! Monte-Carlo oracles for the closed forms and the analytic bounds.
//!
//! Work is cut into fixed blocks of [`BLOCK_LEN`] samples. Block `b` of an
//! estimator draws from `tagged_stream(master_seed, tag, b)` and its
//! accumulator is merged in block order, so results do not depend on the
//! number of workers or on `chunk_size` (which only sets how many blocks a
//! worker takes at a time).

mod amplitude;
mod cos_gaussian;
mod moments;
mod phase;

pub use amplitude::{mc_amplitude_mi, AuxOutputDensity};
pub use cos_gaussian::{check_cos_gaussian_bound, CosGaussianReport, CosGaussianRow};
pub use moments::{mc_fading_moments, McFadingMoments};
pub use phase::{mc_cos_phi, mc_phase_mi, McCosPhi};

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::rng::{tagged_stream, StreamRng};
use crate::stochastic::DEFAULT_INNER_STEPS;

/// Samples per RNG block.
pub const BLOCK_LEN: u64 = 1024;

/// Stream tags, one per estimator.
pub(crate) mod tags {
    pub const MOMENTS: u16 = 1;
    pub const AMPLITUDE: u16 = 2;
    pub const PHASE: u16 = 3;
    pub const COS_PHI: u16 = 4;
    pub const COS_FACTOR_CURRENT: u16 = 5;
    pub const COS_FACTOR_PREVIOUS: u16 = 6;
    pub const COS_GAUSSIAN: u16 = 7;
}

/// Monte-Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    /// Inner quadrature steps S per receiver interval.
    pub inner_steps: usize,
    /// Blocks handed to a worker at a time.
    pub chunk_size: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            inner_steps: DEFAULT_INNER_STEPS,
            chunk_size: 4,
            master_seed: 1,
            workers: 1,
        }
    }
}

impl McConfig {
    pub fn with_samples(mut self, n: u64) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_inner_steps(mut self, steps: usize) -> Self {
        self.inner_steps = steps;
        self
    }

    pub fn with_chunk_size(mut self, chunk: usize) -> Self {
        self.chunk_size = chunk;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(invalid("n_samples must be >= 2"));
        }
        if self.inner_steps < 2 {
            return Err(invalid("inner_steps must be >= 2"));
        }
        if self.chunk_size == 0 {
            return Err(invalid("chunk_size must be >= 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers must be >= 1"));
        }
        Ok(())
    }
}

/// Runs `work(rng, count)` once per block and returns the block results
/// in block order, together with the elapsed wall time.
pub(crate) fn run_blocks<A, F>(cfg: &McConfig, tag: u16, work: F) -> Result<(Vec<A>, f64)>
where
    A: Send,
    F: Fn(&mut StreamRng, u64) -> Result<A> + Sync,
{
    cfg.validate()?;
    let start = Instant::now();
    let n_blocks = cfg.n_samples.div_ceil(BLOCK_LEN);
    let block = |b: u64| {
        let count = BLOCK_LEN.min(cfg.n_samples - b * BLOCK_LEN);
        let mut rng = tagged_stream(cfg.master_seed, tag, b);
        work(&mut rng, count)
    };
    let results: Vec<Result<A>> = if cfg.workers == 1 {
        (0..n_blocks).map(block).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..n_blocks as usize)
                .into_par_iter()
                .with_min_len(cfg.chunk_size)
                .map(|b| block(b as u64))
                .collect()
        })
    };
    let results = results.into_iter().collect::<Result<Vec<A>>>()?;
    Ok((results, start.elapsed().as_secs_f64()))
}
