use std::f64::consts::LN_2;
use std::io::Write;

use anyhow::{bail, ensure, Result};

use phasenoise_core::bounds::{
    cosine_lower_bound, evaluate_bounds, prelog_amplitude, prelog_phase, prelog_piecewise, BoundReport,
};
use phasenoise_core::csv::{real, record};
use phasenoise_core::estimators::{mc_amplitude_mi, mc_cos_phi, mc_fading_moments, mc_phase_mi};
use phasenoise_core::stochastic::{exact_moments, FadingMoments};
use phasenoise_core::McEstimate;

use crate::settings::{Point, Settings};

/// Sample count for `mc` and `sweep` when `--samples` is not given.
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// Identifying columns at the front of every per-point row.
const POINT_COLUMNS: [&str; 6] = ["gamma", "snr", "alpha", "delta", "L", "t"];

fn point_fields(p: &Point) -> Vec<String> {
    vec![
        real(p.params.gamma),
        real(p.params.snr),
        real(p.alpha),
        real(p.params.delta),
        p.params.oversampling.to_string(),
        real(p.params.t),
    ]
}

fn header(cols: &[&str]) -> String {
    record(cols.iter().copied())
}

fn line(out: &mut dyn Write, s: &str) -> Result<()> {
    out.write_all(s.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

fn log_skip(p: &Point, reason: &str) {
    eprintln!(
        "skipped gamma={} snr={} alpha={}: {reason}",
        p.params.gamma, p.params.snr, p.alpha
    );
}

/// A skipped row: the identifying columns, `blanks` empty cells, the reason.
fn skipped_row(p: &Point, blanks: usize, reason: &str) -> String {
    let mut f = point_fields(p);
    f.extend(std::iter::repeat_n(String::new(), blanks));
    f.push(reason.to_string());
    record(f)
}

fn check_finite(what: &str, xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        bail!("{what}: non-finite value {x}");
    }
    Ok(())
}

fn check_estimate(what: &str, e: &McEstimate) -> Result<()> {
    check_finite(what, &[e.value, e.std_error])?;
    ensure!(e.std_error >= 0.0, "{what}: negative standard error");
    Ok(())
}

/// Closed-form fading statistics per operating point.
pub fn run_moments(s: &Settings, out: &mut dyn Write) -> Result<()> {
    const COLS: [&str; 9] = ["sigma2", "m2", "m4", "m6", "m6_exact", "mean_f", "mean_f_rot", "mean_g", "var_g"];
    let mut cols = POINT_COLUMNS.to_vec();
    cols.extend(COLS);
    cols.push("reason");
    line(out, &header(&cols))?;
    for p in s.points()? {
        if let Some(reason) = p.skip_reason() {
            log_skip(&p, &reason);
            line(out, &skipped_row(&p, COLS.len(), &reason))?;
            continue;
        }
        let m = FadingMoments::closed_form(&p.params)?;
        let half = p.params.half_sigma2();
        let m6_exact = if half == 0.0 { 1.0 } else { exact_moments(half)?.m6 };
        let values = [
            p.params.sigma2(),
            m.m2,
            m.m4,
            m.m6,
            m6_exact,
            m.mean_f,
            m.mean_f_rot,
            m.mean_g,
            m.var_g,
        ];
        check_finite("moments", &values)?;
        ensure!(m.var_g >= 0.0 && m.mean_g > 0.0 && m.mean_g <= 1.0, "moments out of range at {p:?}");
        let mut f = point_fields(&p);
        f.extend(values.iter().map(|&x| real(x)));
        f.push(String::new());
        line(out, &record(f))?;
    }
    Ok(())
}

fn bound_fields(r: &BoundReport, bits: bool) -> Vec<String> {
    BoundReport::COLUMNS
        .iter()
        .zip(r.values())
        .map(|(&name, v)| {
            if name == "L" {
                r.oversampling.to_string()
            } else if bits && BoundReport::RATE_COLUMNS.contains(&name) {
                real(v / LN_2)
            } else {
                real(v)
            }
        })
        .collect()
}

/// Skipped bound rows keep γ, SNR, α, Δ, L, t and λ; everything else is blank.
fn skipped_bound_row(p: &Point, extra_blanks: usize, reason: &str) -> String {
    let mut f = point_fields(p);
    f.push(real(p.params.lambda()));
    f.extend(std::iter::repeat_n(String::new(), BoundReport::COLUMNS.len() - 7 + extra_blanks));
    f.push(reason.to_string());
    record(f)
}

/// Both analytic bounds with every intermediate, one row per point.
pub fn run_bounds(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let mut cols = BoundReport::COLUMNS.to_vec();
    cols.push("reason");
    line(out, &header(&cols))?;
    for p in s.points()? {
        if let Some(reason) = p.skip_reason() {
            log_skip(&p, &reason);
            line(out, &skipped_bound_row(&p, 0, &reason))?;
            continue;
        }
        let r = evaluate_bounds(&p.request)?;
        let mut f = bound_fields(&r, s.bits);
        f.push(String::new());
        line(out, &record(f))?;
    }
    Ok(())
}

const MC_COLUMNS: [&str; 15] = [
    "quantity", "value", "std_error", "n", "seed", "gamma", "snr", "alpha", "delta", "L", "t", "nu", "zeta",
    "inner_steps", "reason",
];

/// Monte-Carlo estimates next to the analytic values they check, one row
/// per quantity. Analytic rows carry `std_error = 0` and `n = 0`.
pub fn run_mc(s: &Settings, out: &mut dyn Write) -> Result<()> {
    line(out, &header(&MC_COLUMNS))?;
    let cfg = s.mc_config(DEFAULT_SAMPLES);
    for p in s.points()? {
        let tail = |nu: &str, zeta: &str, reason: &str| {
            let mut f = point_fields(&p);
            f.extend([nu.to_string(), zeta.to_string(), cfg.inner_steps.to_string(), reason.to_string()]);
            f
        };
        if let Some(reason) = p.skip_reason() {
            log_skip(&p, &reason);
            let mut f = vec!["skipped".to_string(), String::new(), String::new(), String::new(), cfg.master_seed.to_string()];
            f.extend(tail("", "", &reason));
            line(out, &record(f))?;
            continue;
        }
        let r = evaluate_bounds(&p.request)?;
        let (nu, zeta) = (real(r.nu), real(r.zeta));
        let scale = if s.bits { 1.0 / LN_2 } else { 1.0 };
        let mut emit = |name: &str, value: f64, se: f64, n: u64| -> Result<()> {
            check_finite(name, &[value, se])?;
            let mut f = vec![name.to_string(), real(value), real(se), n.to_string(), cfg.master_seed.to_string()];
            f.extend(tail(&nu, &zeta, ""));
            line(out, &record(f))
        };
        let est = |e: &McEstimate, k: f64| (e.value * k, e.std_error * k, e.n_samples);

        let amp = mc_amplitude_mi(&p.params, r.nu, &cfg)?;
        check_estimate("i_amp", &amp)?;
        let (v, se, n) = est(&amp, scale);
        emit("i_amp", v, se, n)?;
        emit("bound_amp", r.i_amp * scale, 0.0, 0)?;

        let phase = mc_phase_mi(&p.params, r.zeta, &cfg)?;
        check_estimate("i_phase", &phase)?;
        let (v, se, n) = est(&phase, scale);
        emit("i_phase", v, se, n)?;
        emit("bound_phase", r.i_phase * scale, 0.0, 0)?;

        let cos = mc_cos_phi(&p.params, &cfg)?;
        for (name, e) in [("cos_phi", &cos.joint), ("cos_phi_product", &cos.product)] {
            check_estimate(name, e)?;
            let (v, se, n) = est(e, 1.0);
            emit(name, v, se, n)?;
        }
        emit("cos_phi_bound", cosine_lower_bound(&p.params, r.k, r.mean_x_inv_sq)?, 0.0, 0)?;

        let m = mc_fading_moments(&p.params, &cfg)?;
        let closed = FadingMoments::closed_form(&p.params)?;
        let pairs = [
            ("m2", &m.m2, closed.m2),
            ("m4", &m.m4, closed.m4),
            ("m6", &m.m6, closed.m6),
            ("mean_f", &m.mean_f, closed.mean_f),
            ("mean_f_rot", &m.mean_f_rot, closed.mean_f_rot),
            ("var_g", &m.var_g, closed.var_g),
            ("var_n", &m.var_n, p.params.sigma2()),
        ];
        for (name, e, reference) in pairs {
            check_estimate(name, e)?;
            let (v, se, n) = est(e, 1.0);
            emit(name, v, se, n)?;
            emit(&format!("{name}_closed_form"), reference, 0.0, 0)?;
        }
    }
    Ok(())
}

/// Bounds plus Monte-Carlo amplitude and phase estimates over the grid.
pub fn run_sweep(s: &Settings, out: &mut dyn Write) -> Result<()> {
    const MC: [&str; 6] = ["i_amp_mc", "i_amp_se", "i_phase_mc", "i_phase_se", "n", "seed"];
    let mut cols = BoundReport::COLUMNS.to_vec();
    cols.extend(MC);
    cols.push("reason");
    line(out, &header(&cols))?;
    let cfg = s.mc_config(DEFAULT_SAMPLES);
    let scale = if s.bits { 1.0 / LN_2 } else { 1.0 };
    for p in s.points()? {
        if let Some(reason) = p.skip_reason() {
            log_skip(&p, &reason);
            line(out, &skipped_bound_row(&p, MC.len(), &reason))?;
            continue;
        }
        let r = evaluate_bounds(&p.request)?;
        let amp = mc_amplitude_mi(&p.params, r.nu, &cfg)?;
        let phase = mc_phase_mi(&p.params, r.zeta, &cfg)?;
        check_estimate("i_amp", &amp)?;
        check_estimate("i_phase", &phase)?;
        let mut f = bound_fields(&r, s.bits);
        f.extend([
            real(amp.value * scale),
            real(amp.std_error * scale),
            real(phase.value * scale),
            real(phase.std_error * scale),
            amp.n_samples.to_string(),
            cfg.master_seed.to_string(),
            String::new(),
        ]);
        line(out, &record(f))?;
    }
    Ok(())
}

/// The default α grid of `prelog`: 0.01, 0.02, …, 0.99.
pub fn default_prelog_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Rows `alpha, prelog_total, prelog_amplitude, prelog_phase`.
pub fn run_prelog(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let grid = s.alpha.clone().unwrap_or_else(default_prelog_grid);
    if grid.is_empty() {
        bail!("empty alpha grid");
    }
    line(out, &header(&["alpha", "prelog_total", "prelog_amplitude", "prelog_phase"]))?;
    for alpha in grid {
        let total = prelog_piecewise(alpha)?;
        let amp = prelog_amplitude(alpha)?;
        let phase = prelog_phase(alpha)?;
        ensure!(
            (total - (amp + phase)).abs() <= 1e-15,
            "pre-log components disagree at alpha = {alpha}"
        );
        line(out, &record([real(alpha), real(total), real(amp), real(phase)]))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(kv: &[(&str, &str)]) -> Settings {
        let mut s = Settings::default();
        for (k, v) in kv {
            s.set(k, v).unwrap();
        }
        s.validate().unwrap();
        s
    }

    fn run(f: fn(&Settings, &mut dyn Write) -> Result<()>, s: &Settings) -> String {
        let mut buf = Vec::new();
        f(s, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn prelog_rows() {
        let text = run(run_prelog, &Settings::default());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 100);
        assert_eq!(lines[0], "alpha,prelog_total,prelog_amplitude,prelog_phase");
        let s = settings(&[("alpha", "0.5")]);
        let text = run(run_prelog, &s);
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![0.5, 0.75, 0.5, 0.25]);
        assert!(run_prelog(&settings(&[("alpha", "1.5")]), &mut Vec::new()).is_err());
    }

    #[test]
    fn bounds_header_and_skips() {
        let s = settings(&[("delta", "0.01"), ("snr", "100,1e5"), ("nu", "400")]);
        let text = run(run_bounds, &s);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        for col in ["lambda", "mu", "nu", "var_g", "rho", "zeta", "K", "reason"] {
            assert!(lines[0].split(',').any(|c| c == col), "{col}");
        }
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let n_cols = rdr.headers().unwrap().len();
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert!(rows.iter().all(|r| r.len() == n_cols));
        assert!(rows[0][n_cols - 1].starts_with("infeasible power"));
        assert_eq!(&rows[1][n_cols - 1], "");
    }

    #[test]
    fn bits_scale_rates_only() {
        let nats = run(run_bounds, &settings(&[("snr", "1e6")]));
        let bits = run(run_bounds, &settings(&[("snr", "1e6"), ("bits", "true")]));
        let col = |text: &str, name: &str| -> f64 {
            let mut lines = text.lines();
            let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
            lines.next().unwrap().split(',').nth(idx).unwrap().parse().unwrap()
        };
        assert!((col(&bits, "i_amp") * LN_2 - col(&nats, "i_amp")).abs() < 1e-12);
        assert_eq!(col(&bits, "prelog"), col(&nats, "prelog"));
        assert_eq!(col(&bits, "K"), col(&nats, "K"));
    }

    #[test]
    fn moments_of_awgn_are_unit() {
        let text = run(run_moments, &settings(&[("gamma", "0"), ("delta", "0.1"), ("snr", "1e3")]));
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        for x in &row[7..15] {
            let v: f64 = x.parse().unwrap();
            assert!(v == 1.0 || v == 0.0, "{x}");
        }
    }

    #[test]
    fn mc_rows_are_deterministic_across_workers() {
        let base = [("delta", "0.1"), ("snr", "1e3"), ("samples", "1500"), ("inner-steps", "8"), ("seed", "5")];
        let a = run(run_mc, &settings(&base));
        let mut more = base.to_vec();
        more.push(("workers", "3"));
        more.push(("chunk-size", "1"));
        let b = run(run_mc, &settings(&more));
        assert_eq!(a, b);
        assert!(a.lines().any(|l| l.starts_with("i_amp,")));
        assert!(a.lines().any(|l| l.starts_with("var_n_closed_form,")));
    }
}
