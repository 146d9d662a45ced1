//! Self-check of closed forms, orderings and golden values. Each check
//! reports what it measured; `Finding` marks a known discrepancy that is
//! reported but does not fail the run.

use std::f64::consts::{E, PI};
use std::fmt;
use std::io::Write;

use anyhow::Result;

use phasenoise_core::bounds::{
    amplitude_bound, amplitude_nu_schedule, cosine_lower_bound, k_bound, phase_bound, prelog,
    prelog_piecewise, reference_k, AmplitudeBoundInputs, PhaseBoundInputs,
};
use phasenoise_core::channel::{InputSymbol, Transmitter};
use phasenoise_core::estimators::{
    check_cos_gaussian_bound, mc_amplitude_mi, mc_cos_phi, mc_fading_moments, mc_phase_mi, McConfig,
};
use phasenoise_core::quadrature::integrate_adaptive;
use phasenoise_core::rng::stream;
use phasenoise_core::stats::Welford;
use phasenoise_core::stochastic::{
    closed_form_mean_f, closed_form_mean_f_rot, closed_form_moments, exact_moments, var_g_from_moments,
    ZMoments,
};
use phasenoise_core::ChannelParams;

use crate::settings::Settings;

/// Sample count for the Monte-Carlo checks when `--samples` is not given.
pub const VERIFY_SAMPLES: u64 = 20_000;

/// `E[Z²], E[Z⁴], E[Z⁶]` as a function of `α = γ²Δ/2`.
pub type MomentFn = fn(f64) -> phasenoise_core::Result<ZMoments>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Moment formulas under test.
    pub moments: MomentFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            moments: closed_form_moments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Finding,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Finding => "FINDING",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn finding(name: &str, detail: String) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Finding,
            detail,
        }
    }

    fn error(name: &str, e: impl fmt::Display) -> Self {
        Self::new(name, false, format!("error: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for c in &self.checks {
            writeln!(out, "{:<8}{}: {}", c.status.to_string(), c.name, c.detail)?;
        }
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        writeln!(
            out,
            "summary: {} passed, {} failed, {} findings",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Finding)
        )?;
        let failed = self.failures();
        if !failed.is_empty() {
            writeln!(out, "failed_checks={}", failed.join(","))?;
        }
        Ok(())
    }
}

fn golden(name: &str, expected: f64, got: f64, tol: f64) -> Check {
    Check::new(name, (got - expected).abs() <= tol, format!("expected {expected}, got {got}, tol {tol}"))
}

fn k_checks() -> Vec<Check> {
    match k_bound(1.3, 1.0, 0.01) {
        Ok(k) => vec![
            golden("k_golden", 8.1353, k.k, 0.01),
            golden("eps1_golden", 0.3506, k.eps1, 0.001),
            golden("eps_cap_golden", 0.5774, k.eps_cap, 0.001),
        ],
        Err(e) => vec![Check::error("k_golden", e)],
    }
}

fn z_detail(name: &str, z: f64, value: f64, reference: f64) -> String {
    format!("{name}: mc {value:.6e} vs {reference:.6e} (z = {z:.2})")
}

/// MC moments of F against the formulas under test, at γ√Δ = 0.5.
fn moment_checks(opts: &VerifyOptions, cfg: &McConfig) -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Vec<Check>> {
        let p = ChannelParams::new(1.0, 0.25, 4, 1, 1e3, 1.0)?;
        let alpha = p.half_sigma2();
        let m = mc_fading_moments(&p, cfg)?;
        let claimed = (opts.moments)(alpha)?;
        let exact = exact_moments(alpha)?;
        let mut out = Vec::new();
        for (name, e, reference) in [
            ("moment_m2", &m.m2, claimed.m2),
            ("moment_m4", &m.m4, claimed.m4),
            ("moment_m6_exact", &m.m6, exact.m6),
            ("mean_f", &m.mean_f, closed_form_mean_f(p.sigma2())?),
            ("var_n", &m.var_n, p.sigma2()),
        ] {
            let z = e.z_score(reference);
            out.push(Check::new(name, z.abs() <= 3.0, z_detail(name, z, e.value, reference)));
        }
        let z = m.m6.z_score(claimed.m6);
        let detail = z_detail("moment_m6_closed_form", z, m.m6.value, claimed.m6);
        out.push(if z.abs() <= 3.0 {
            Check::new("moment_m6_closed_form", true, detail)
        } else {
            Check::finding("moment_m6_closed_form", format!("{detail}; formula disagrees with MC"))
        });
        // endpoint increment N = σB(1) against the closed form
        let closed = closed_form_mean_f_rot(p.sigma2())?;
        let gap = m.mean_f_rot.value - closed;
        out.push(Check::finding(
            "mean_f_rot_endpoint",
            format!(
                "mc {:.6e} ± {:.1e} vs closed form {closed:.6e}: gap {gap:.4e} = {:.4} sigma2",
                m.mean_f_rot.value,
                m.mean_f_rot.std_error,
                gap / p.sigma2()
            ),
        ));
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![Check::error("moments", e)])
}

fn var_g_scaling(opts: &VerifyOptions) -> Vec<Check> {
    [1e-2f64, 1e-3]
        .iter()
        .map(|&delta| {
            let name = format!("var_g_scaling_{delta:e}");
            let l = (1.0 / delta).round() as usize;
            match (opts.moments)(0.5 * delta) {
                Ok(z) => {
                    let ratio = var_g_from_moments(z.m2, z.m4, l) / delta.powi(3) * 45.0;
                    Check::new(&name, (ratio - 1.0).abs() <= 0.05, format!("45 VarG/delta^3 = {ratio:.6}, tol 0.05"))
                }
                Err(e) => Check::error(&name, e),
            }
        })
        .collect()
}

fn prelog_checks() -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Check> {
        let mut worst = 0.0f64;
        for (alpha, want) in [(0.25, 0.5), (1.0 / 3.0, 2.0 / 3.0), (0.4, 0.7), (0.5, 0.75), (0.75, 0.75)] {
            worst = worst.max((prelog(alpha)? - want).abs());
            worst = worst.max((prelog_piecewise(alpha)? - want).abs());
        }
        let mut jump = 0.0f64;
        for edge in [1.0f64 / 3.0, 0.5] {
            let below = prelog(f64::from_bits(edge.to_bits() - 1))?;
            let above = prelog(f64::from_bits(edge.to_bits() + 1))?;
            jump = jump.max((below - above).abs());
        }
        Ok(Check::new(
            "prelog_branches",
            worst <= 1e-15 && jump <= 1e-15,
            format!("max branch error {worst:.1e}, max jump at breakpoints {jump:.1e}, tol 1e-15"),
        ))
    };
    vec![run().unwrap_or_else(|e| Check::error("prelog_branches", e))]
}

fn asymptote_check() -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Check> {
        let target = -0.5 * (4.0 * PI * E).ln();
        let mut gaps = Vec::new();
        for snr in [1e4, 1e6, 1e8] {
            let (nu, t) = amplitude_nu_schedule(0.5, snr, 1.0)?;
            let p = ChannelParams::from_alpha(1.0, snr, 0.5, t, 1)?;
            gaps.push(amplitude_bound(&AmplitudeBoundInputs::new(p, nu)?)? - 0.5 * snr.ln());
        }
        let monotone = gaps.windows(2).all(|w| (w[1] - target).abs() < (w[0] - target).abs());
        let close = (gaps[2] - target).abs() <= 0.15;
        Ok(Check::new(
            "amplitude_asymptote",
            monotone && close,
            format!("i_amp - ln(snr)/2 at snr 1e4,1e6,1e8 = {:.4}, {:.4}, {:.4}; expected {target:.4}, tol 0.15", gaps[0], gaps[1], gaps[2]),
        ))
    };
    vec![run().unwrap_or_else(|e| Check::error("amplitude_asymptote", e))]
}

/// γ√Δ = 0.1, Δ = 0.1, L = 10, t = 1.
fn reference_params(snr: f64) -> phasenoise_core::Result<ChannelParams> {
    ChannelParams::new(0.1f64.sqrt(), 0.1, 10, 1, snr, 1.0)
}

fn ordering_checks(cfg: &McConfig) -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Vec<Check>> {
        let p = reference_params(1e3)?;
        let nu = 40.0;
        let amp_bound = amplitude_bound(&AmplitudeBoundInputs::new(p, nu)?)?;
        let amp = mc_amplitude_mi(&p, nu, cfg)?;
        let k = reference_k(1.3, p.sigma())?.k;
        let inputs = PhaseBoundInputs::loose(p, k)?;
        let ph_bound = phase_bound(&inputs)?;
        let ph = mc_phase_mi(&p, inputs.zeta, cfg)?;

        let p4 = reference_params(1e4)?;
        let cos = mc_cos_phi(&p4, cfg)?;
        let cos_bound = cosine_lower_bound(&p4, k, p4.mean_inverse_energy()?)?;
        let fmt = |v: f64, se: f64, b: f64| format!("mc {v:.6} ± {se:.2e} vs bound {b:.6}");
        Ok(vec![
            Check::new("ordering_amplitude", amp.value >= amp_bound - 3.0 * amp.std_error, fmt(amp.value, amp.std_error, amp_bound)),
            Check::new("ordering_phase", ph.value >= ph_bound - 3.0 * ph.std_error, fmt(ph.value, ph.std_error, ph_bound)),
            Check::new(
                "ordering_cos_phi",
                cos.joint.value >= cos_bound - 3.0 * cos.joint.std_error,
                fmt(cos.joint.value, cos.joint.std_error, cos_bound),
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::error("ordering", e)])
}

fn cos_gaussian_check(cfg: &McConfig) -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Check> {
        let r = check_cos_gaussian_bound(&[1.5, 2.0, 5.0, 10.0, 50.0], cfg)?;
        let mass = r.rows.iter().map(|row| row.mass_error.abs()).fold(0.0, f64::max);
        let z = r.rows[1].z_score();
        Ok(Check::new(
            "cos_gaussian_inequality",
            r.all_hold() && mass < 1e-10 && z.abs() <= 3.0,
            format!("violations {:?}, max mass error {mass:.1e}, mc z at rho=2 {z:.2}", r.violations),
        ))
    };
    vec![run().unwrap_or_else(|e| Check::error("cos_gaussian_inequality", e))]
}

fn mean_f_rot_quadrature() -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Check> {
        let mut worst = 0.0f64;
        for s2 in [1e-4, 1e-2, 0.1, 1.0, 4.0] {
            let q = integrate_adaptive(&mut |t: f64| (-0.5 * s2 * (t * t - t + 1.0)).exp(), 0.0, 1.0, 1e-15, 40)
                .map_err(|e| phasenoise_core::Error::InvalidArgument(format!("quadrature failed on [{}, {}]", e.a, e.b)))?;
            worst = worst.max((q - closed_form_mean_f_rot(s2)?).abs());
        }
        Ok(Check::new("mean_f_rot_closed_form", worst <= 1e-12, format!("max |quadrature - closed form| = {worst:.2e}, tol 1e-12")))
    };
    vec![run().unwrap_or_else(|e| Check::error("mean_f_rot_closed_form", e))]
}

fn awgn_checks(cfg: &McConfig) -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Vec<Check>> {
        let frames = 4096;
        let p = ChannelParams::new(0.0, 0.1, 10, frames, 1e3, 1.0)?;
        let tx = Transmitter::new(p)?.inner_steps(cfg.inner_steps.min(64))?;
        let mut rng = stream(cfg.master_seed, 0xA);
        let symbols = vec![InputSymbol::zero(); frames];
        let frame = tx.transmit(&symbols, &mut rng)?;
        let fade_err = frame.channel_state.iter().map(|f| (f.fading - 1.0).norm()).fold(0.0, f64::max);
        let n_max = frame.channel_state.iter().map(|s| s.increment.abs()).fold(0.0, f64::max);
        // variance per complex dimension, E|W|²
        let mut energy = Welford::new();
        for y in &frame.outputs {
            energy.push(y.norm_sqr());
        }
        let z = (energy.mean() - 1.0) / energy.std_error();
        let var_g = phasenoise_core::stochastic::var_g(&p)?;
        Ok(vec![
            Check::new(
                "awgn_fading",
                fade_err <= 1e-12 && n_max == 0.0 && var_g == 0.0,
                format!("max |F - 1| = {fade_err:.1e}, max |N| = {n_max:.1e}, VarG = {var_g}"),
            ),
            Check::new(
                "awgn_noise_variance",
                z.abs() <= 3.0,
                format!("E|W|^2 = {:.5} over {} samples (z = {z:.2})", energy.mean(), energy.count()),
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::error("awgn", e)])
}

fn determinism_check(cfg: &McConfig) -> Vec<Check> {
    let run = || -> phasenoise_core::Result<Check> {
        let p = reference_params(1e3)?;
        let small = cfg.with_samples(cfg.n_samples.min(4096));
        let a = mc_phase_mi(&p, 2.0, &small.with_workers(1))?;
        let b = mc_phase_mi(&p, 2.0, &small.with_workers(3).with_chunk_size(1))?;
        let same = a.value.to_bits() == b.value.to_bits() && a.std_error.to_bits() == b.std_error.to_bits();
        Ok(Check::new("determinism_workers", same, format!("1 worker {:.17e}, 3 workers {:.17e}", a.value, b.value)))
    };
    vec![run().unwrap_or_else(|e| Check::error("determinism_workers", e))]
}

/// Runs every check. Monte-Carlo checks use `--samples` (default
/// [`VERIFY_SAMPLES`]), `--inner-steps`, `--workers` and `--seed`.
pub fn verify(s: &Settings, opts: &VerifyOptions) -> VerifyReport {
    let cfg = s.mc_config(VERIFY_SAMPLES);
    let mut checks = Vec::new();
    checks.extend(k_checks());
    checks.extend(moment_checks(opts, &cfg));
    checks.extend(var_g_scaling(opts));
    checks.extend(prelog_checks());
    checks.extend(asymptote_check());
    checks.extend(mean_f_rot_quadrature());
    checks.extend(cos_gaussian_check(&cfg));
    checks.extend(ordering_checks(&cfg));
    checks.extend(awgn_checks(&cfg));
    checks.extend(determinism_check(&cfg));
    VerifyReport { checks }
}

/// Writes the report; returns whether every check passed.
pub fn run_verify(s: &Settings, opts: &VerifyOptions, out: &mut dyn Write) -> Result<bool> {
    let report = verify(s, opts);
    report.write(out)?;
    Ok(report.passed())
}
