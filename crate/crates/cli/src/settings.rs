//! Flag and config-file handling. Every setting has one textual form shared
//! by `--flag value` and `flag = value` lines, so both go through the same
//! parser. Precedence is CLI > config file > built-in default.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;

use phasenoise_core::bounds::{default_support_exponent, BoundRequest, DEFAULT_A};
use phasenoise_core::estimators::McConfig;
use phasenoise_core::ChannelParams;

/// Flags shared by every subcommand. Lists are comma separated; `--alpha`
/// also takes `start:stop:step`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Phase-noise rate γ (comma list)
    #[arg(long, value_name = "LIST")]
    pub gamma: Option<String>,
    /// SNR values, linear scale (comma list)
    #[arg(long, value_name = "LIST")]
    pub snr: Option<String>,
    /// Resolution exponents α, Δ⁻¹ = L = ⌈SNR^α⌉ (comma list or start:stop:step)
    #[arg(long, value_name = "GRID")]
    pub alpha: Option<String>,
    /// Samples per symbol; only with --delta (default round(1/Δ))
    #[arg(long = "L", value_name = "INT")]
    pub l: Option<String>,
    /// Receiver time resolution Δ; replaces the α schedule
    #[arg(long, value_name = "REAL")]
    pub delta: Option<String>,
    /// Input support exponent t (|X|² ≥ Δ^-t)
    #[arg(long, value_name = "REAL")]
    pub t: Option<String>,
    /// Height a = g(0) of the K-bound polynomial
    #[arg(long, value_name = "REAL")]
    pub a: Option<String>,
    /// Amplitude kernel width ν (overrides the schedule)
    #[arg(long, value_name = "REAL")]
    pub nu: Option<String>,
    /// Phase kernel concentration ζ (overrides 1/(2ρ))
    #[arg(long, value_name = "REAL")]
    pub zeta: Option<String>,
    /// Monte-Carlo sample count
    #[arg(long, value_name = "INT")]
    pub samples: Option<String>,
    /// Inner quadrature steps per receiver interval
    #[arg(long = "inner-steps", value_name = "INT")]
    pub inner_steps: Option<String>,
    /// Worker threads for Monte-Carlo runs
    #[arg(long, value_name = "INT")]
    pub workers: Option<String>,
    /// RNG blocks handed to a worker at a time
    #[arg(long = "chunk-size", value_name = "INT")]
    pub chunk_size: Option<String>,
    /// Master RNG seed
    #[arg(long, value_name = "INT")]
    pub seed: Option<String>,
    /// Output file (default stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report information rates in bits instead of nats
    #[arg(long)]
    pub bits: bool,
    /// key=value config file; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

/// Keys accepted in a config file.
pub const CONFIG_KEYS: [&str; 16] = [
    "gamma",
    "snr",
    "alpha",
    "L",
    "delta",
    "t",
    "a",
    "nu",
    "zeta",
    "samples",
    "inner-steps",
    "workers",
    "chunk-size",
    "seed",
    "out",
    "bits",
];

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub gamma: Vec<f64>,
    pub snr: Vec<f64>,
    pub alpha: Option<Vec<f64>>,
    pub oversampling: Option<usize>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub a: f64,
    pub nu: Option<f64>,
    pub zeta: Option<f64>,
    /// `None` lets each command pick its own default.
    pub samples: Option<u64>,
    pub inner_steps: usize,
    pub workers: usize,
    pub chunk_size: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub bits: bool,
}

impl Default for Settings {
    fn default() -> Self {
        let mc = McConfig::default();
        Self {
            gamma: vec![1.0],
            snr: vec![1e6],
            alpha: None,
            oversampling: None,
            delta: None,
            t: None,
            a: DEFAULT_A,
            nu: None,
            zeta: None,
            samples: None,
            inner_steps: mc.inner_steps,
            workers: mc.workers,
            chunk_size: mc.chunk_size,
            seed: mc.master_seed,
            out: None,
            bits: false,
        }
    }
}

fn real(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().with_context(|| format!("{key}: cannot parse {v:?} as a number"))?;
    if !x.is_finite() {
        bail!("{key}: value must be finite, got {v:?}");
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| anyhow!("{key}: cannot parse {v:?} as a non-negative integer"))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    let out = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| real(key, s))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!("{key}: empty list");
    }
    Ok(out)
}

/// Parses `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    if !v.contains(':') {
        return list(key, v);
    }
    let parts: Vec<&str> = v.split(':').collect();
    let [start, stop, step] = parts[..] else {
        bail!("{key}: range must be start:stop:step, got {v:?}");
    };
    let (start, stop, step) = (real(key, start)?, real(key, stop)?, real(key, step)?);
    if step.is_nan() || step <= 0.0 || stop < start {
        bail!("{key}: range needs step > 0 and stop >= start, got {v:?}");
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("{key}: expected true or false, got {v:?}"),
    }
}

impl Settings {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "gamma" => self.gamma = list(key, v)?,
            "snr" => self.snr = list(key, v)?,
            "alpha" => self.alpha = Some(parse_grid(key, v)?),
            "L" => self.oversampling = Some(int(key, v)?),
            "delta" => self.delta = Some(real(key, v)?),
            "t" => self.t = Some(real(key, v)?),
            "a" => self.a = real(key, v)?,
            "nu" => self.nu = Some(real(key, v)?),
            "zeta" => self.zeta = Some(real(key, v)?),
            "samples" => self.samples = Some(int(key, v)?),
            "inner-steps" => self.inner_steps = int(key, v)?,
            "workers" => self.workers = int(key, v)?,
            "chunk-size" => self.chunk_size = int(key, v)?,
            "seed" => self.seed = int(key, v)?,
            "out" => self.out = Some(PathBuf::from(v.trim())),
            "bits" => self.bits = boolean(key, v)?,
            _ => bail!("unknown setting {key:?}"),
        }
        Ok(())
    }

    /// Defaults, then the config file (if any), then the flags.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut s = Self::default();
        if let Some(path) = &args.config {
            for (key, value) in read_config(path)? {
                s.set(&key, &value)?;
            }
        }
        let flags: [(&str, &Option<String>); 14] = [
            ("gamma", &args.gamma),
            ("snr", &args.snr),
            ("alpha", &args.alpha),
            ("L", &args.l),
            ("delta", &args.delta),
            ("t", &args.t),
            ("a", &args.a),
            ("nu", &args.nu),
            ("zeta", &args.zeta),
            ("samples", &args.samples),
            ("inner-steps", &args.inner_steps),
            ("workers", &args.workers),
            ("chunk-size", &args.chunk_size),
            ("seed", &args.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v).with_context(|| format!("--{key}"))?;
            }
        }
        if let Some(out) = &args.out {
            s.out = Some(out.clone());
        }
        if args.bits {
            s.bits = true;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_some() && self.delta.is_some() {
            bail!("--alpha and --delta are mutually exclusive");
        }
        if self.oversampling.is_some() && self.delta.is_none() {
            bail!("--L needs --delta; with the alpha schedule L = ceil(SNR^alpha)");
        }
        if self.gamma.iter().any(|&g| g < 0.0) {
            bail!("gamma must be >= 0");
        }
        if self.snr.iter().any(|&s| s <= 0.0) {
            bail!("snr must be > 0");
        }
        self.mc_config(McConfig::default().n_samples).validate()?;
        Ok(())
    }

    /// The α list, defaulting to `[0.5]` when neither α nor Δ is given.
    pub fn alphas(&self) -> Vec<f64> {
        self.alpha.clone().unwrap_or_else(|| vec![0.5])
    }

    pub fn mc_config(&self, default_samples: u64) -> McConfig {
        McConfig {
            n_samples: self.samples.unwrap_or(default_samples),
            inner_steps: self.inner_steps,
            chunk_size: self.chunk_size,
            master_seed: self.seed,
            workers: self.workers,
        }
    }

    /// Operating points in output order: γ outermost, then SNR, then α.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for &gamma in &self.gamma {
            for &snr in &self.snr {
                match self.delta {
                    Some(delta) => {
                        let l = match self.oversampling {
                            Some(l) => l,
                            None => ((1.0 / delta).round() as usize).max(1),
                        };
                        let t = self.t.unwrap_or(1.0);
                        let params = ChannelParams::new(gamma, delta, l, 1, snr, t)?;
                        out.push(Point::new(params, None, self));
                    }
                    None => {
                        for alpha in self.alphas() {
                            let t = match self.t {
                                Some(t) => t,
                                None => default_support_exponent(alpha)?,
                            };
                            let params = ChannelParams::from_alpha(gamma, snr, alpha, t, 1)?;
                            out.push(Point::new(params, Some(alpha), self));
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One `(γ, SNR, α)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub params: ChannelParams,
    pub alpha: f64,
    pub request: BoundRequest,
}

impl Point {
    fn new(params: ChannelParams, alpha: Option<f64>, s: &Settings) -> Self {
        let request = BoundRequest {
            alpha,
            nu: s.nu,
            zeta: s.zeta,
            a: s.a,
            ..BoundRequest::new(params)
        };
        Self {
            params,
            alpha: alpha.unwrap_or_else(|| params.implied_alpha()),
            request,
        }
    }

    /// Why the point cannot be evaluated, if it cannot.
    pub fn skip_reason(&self) -> Option<String> {
        self.params.input_scale().err().map(|e| e.to_string())
    }
}

/// Reads a flat `key = value` file. Blank lines and `#` comments are
/// ignored; unknown or repeated keys are errors.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key = value, got {raw:?}", i + 1);
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            bail!("line {}: unknown key {key:?}", i + 1);
        }
        if let Some(prev) = seen.insert(key.to_string(), i + 1) {
            bail!("line {}: {key:?} already set on line {prev}", i + 1);
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}
