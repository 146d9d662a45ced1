use crate::error::Result;
use crate::params::ChannelParams;
use crate::stats::{CentralMoments, McEstimate, Welford};
use crate::stochastic::interval_sample_unchecked;

use super::{run_blocks, tags, McConfig};

/// Monte-Carlo estimates of the fading statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McFadingMoments {
    pub m2: McEstimate,
    pub m4: McEstimate,
    pub m6: McEstimate,
    /// `E[Re F]`.
    pub mean_f: McEstimate,
    /// `E[Re(F e^{−jN})]`, `N = σB(1)`.
    pub mean_f_rot: McEstimate,
    /// `E[Re(F e^{−jN})]`, `N = σ∫₀¹B`.
    pub mean_f_rot_time_avg: McEstimate,
    /// `Var(|F|²)/L`.
    pub var_g: McEstimate,
    /// `Var N` (endpoint increment).
    pub var_n: McEstimate,
}

#[derive(Default, Clone)]
struct Acc {
    m2: Welford,
    m4: Welford,
    m6: Welford,
    f: Welford,
    frot: Welford,
    frot_avg: Welford,
    z2: CentralMoments,
    n: CentralMoments,
}

impl Acc {
    fn merge(&mut self, o: &Acc) {
        self.m2.merge(&o.m2);
        self.m4.merge(&o.m4);
        self.m6.merge(&o.m6);
        self.f.merge(&o.f);
        self.frot.merge(&o.frot);
        self.frot_avg.merge(&o.frot_avg);
        self.z2.merge(&o.z2);
        self.n.merge(&o.n);
    }
}

fn from_moments_variance(c: &CentralMoments, scale: f64, seed: u64, wall: f64) -> McEstimate {
    McEstimate {
        value: c.variance() * scale,
        std_error: c.variance_std_error() * scale,
        n_samples: c.count(),
        seed,
        wall_time: wall,
    }
}

/// Moments of `(F, N)` from `cfg.n_samples` independent intervals.
pub fn mc_fading_moments(params: &ChannelParams, cfg: &McConfig) -> Result<McFadingMoments> {
    params.validate()?;
    let sigma = params.sigma();
    let steps = cfg.inner_steps;
    let (blocks, wall) = run_blocks(cfg, tags::MOMENTS, |rng, count| {
        let mut acc = Acc::default();
        for _ in 0..count {
            let s = interval_sample_unchecked(sigma, steps, rng);
            let z2 = s.fading.norm_sqr();
            acc.m2.push(z2);
            acc.m4.push(z2 * z2);
            acc.m6.push(z2 * z2 * z2);
            acc.f.push(s.fading.re);
            let (sn, cs) = s.increment.sin_cos();
            acc.frot.push(s.fading.re * cs + s.fading.im * sn);
            let (sa, ca) = s.increment_time_avg.sin_cos();
            acc.frot_avg.push(s.fading.re * ca + s.fading.im * sa);
            acc.z2.push(z2);
            acc.n.push(s.increment);
        }
        Ok(acc)
    })?;
    let mut total = Acc::default();
    for b in &blocks {
        total.merge(b);
    }
    let seed = cfg.master_seed;
    let est = |w: &Welford| McEstimate::from_welford(w, seed, wall);
    Ok(McFadingMoments {
        m2: est(&total.m2),
        m4: est(&total.m4),
        m6: est(&total.m6),
        mean_f: est(&total.f),
        mean_f_rot: est(&total.frot),
        mean_f_rot_time_avg: est(&total.frot_avg),
        var_g: from_moments_variance(&total.z2, 1.0 / params.oversampling as f64, seed, wall),
        var_n: from_moments_variance(&total.n, 1.0, seed, wall),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{closed_form_mean_f, closed_form_moments, exact_moments};

    #[test]
    fn noiseless_phase_is_deterministic() {
        let p = ChannelParams::new(0.0, 0.01, 100, 1, 1e4, 1.0).unwrap();
        let m = mc_fading_moments(&p, &McConfig::default().with_samples(2000).with_inner_steps(8)).unwrap();
        for e in [m.m2, m.m4, m.m6, m.mean_f, m.mean_f_rot] {
            assert!((e.value - 1.0).abs() < 1e-12);
        }
        assert_eq!(m.var_g.value, 0.0);
        assert_eq!(m.var_n.value, 0.0);
    }

    #[test]
    fn closed_forms_within_three_se() {
        // γ√Δ = 0.1
        let p = ChannelParams::new(1.0, 0.01, 100, 1, 1e4, 1.0).unwrap();
        let cfg = McConfig::default().with_samples(100_000).with_inner_steps(128).with_seed(3);
        let m = mc_fading_moments(&p, &cfg).unwrap();
        let z = closed_form_moments(0.005).unwrap();
        let exact = exact_moments(0.005).unwrap();
        assert!(m.m2.within_se(z.m2, 3.0), "z = {}", m.m2.z_score(z.m2));
        assert!(m.m4.within_se(exact.m4, 3.0));
        assert!(m.m6.within_se(exact.m6, 3.0));
        assert!(!m.m6.within_se(z.m6, 5.0));
        assert!(m.mean_f.within_se(closed_form_mean_f(0.01).unwrap(), 3.0));
        assert!(m.var_n.within_se(0.01, 3.0), "z = {}", m.var_n.z_score(0.01));
    }

    #[test]
    fn standard_error_shrinks_as_root_n() {
        let p = ChannelParams::new(1.0, 0.01, 100, 1, 1e4, 1.0).unwrap();
        let base = McConfig::default().with_inner_steps(16).with_seed(4);
        let a = mc_fading_moments(&p, &base.with_samples(20_000)).unwrap();
        let b = mc_fading_moments(&p, &base.with_samples(80_000)).unwrap();
        let ratio = a.m2.std_error / b.m2.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }
}
