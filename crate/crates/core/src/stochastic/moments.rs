//! Even moments of `Z = |F|`.
//!
//! Two independent routes are provided:
//!
//! * [`closed_form_moments`]: the exponential-polynomial closed
//!   forms in `α = γ²Δ/2`. They suffer catastrophic cancellation for
//!   small `α` (the `E[Z⁶]` expression divides by `α⁶`), so below `α = 1`
//!   each is evaluated through its Taylor series, whose coefficients are
//!   formed term by term from the same expression.
//! * [`exact_moments`]: a derivation from the Brownian increments.
//!   `E|F|^{2k}` is an average over orderings of `2k` uniform times; given
//!   an ordering the phase difference is Gaussian with variance
//!   `σ² Σ_m g_m S_m²` (gaps `g_m`, partial sign sums `S_m`), and the gaps
//!   are Dirichlet(1, …, 1). Expanding `exp` gives
//!   `E = Σ_r (−α)^r n!/(n+r)! h_r(S₁², …, S_n², 0)` with `n = 2k` and
//!   `h_r` the complete homogeneous symmetric polynomial.
//!
//! The routes agree for `E[Z²]` and `E[Z⁴]`. The closed-form `E[Z⁶]` does
//! not tend to 1 as `α → 0`; its series equals `Σ (r+6) c_r (−α)^r` where
//! `Σ c_r (−α)^r` is the exact moment.

use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::params::ChannelParams;

use super::closed_form::{closed_form_mean_f, closed_form_mean_f_rot};

/// `E[Z²]`, `E[Z⁴]`, `E[Z⁶]` for `Z = |F|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZMoments {
    pub m2: f64,
    pub m4: f64,
    pub m6: f64,
}

impl ZMoments {
    pub const UNIT: ZMoments = ZMoments {
        m2: 1.0,
        m4: 1.0,
        m6: 1.0,
    };

    /// Whether `1 ≥ m2 ≥ m4 ≥ m6 ≥ 0`, as any law on [0, 1] requires.
    pub fn is_admissible(&self) -> bool {
        1.0 >= self.m2 && self.m2 >= self.m4 && self.m4 >= self.m6 && self.m6 >= 0.0
    }
}

/// Which expression set produces the moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentFormula {
    /// The exponential-polynomial closed forms (with `t = 1` in `E[Z²]`).
    #[default]
    ClosedForm,
    /// The increment-ordering series.
    Exact,
}

impl MomentFormula {
    pub fn evaluate(self, alpha: f64) -> Result<ZMoments> {
        match self {
            MomentFormula::ClosedForm => closed_form_moments(alpha),
            MomentFormula::Exact => exact_moments(alpha),
        }
    }
}

/// One term `coef · α^power · e^{−rate·α}` of an exponential polynomial.
#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    power: u32,
    rate: f64,
}

const fn term(coef: f64, power: u32, rate: f64) -> Term {
    Term { coef, power, rate }
}

/// `(Σ terms) / α^denominator`.
struct ExpPoly {
    terms: &'static [Term],
    denominator: u32,
}

const M2_CLOSED: ExpPoly = ExpPoly {
    terms: &[term(-2.0, 0, 0.0), term(2.0, 0, 1.0), term(2.0, 1, 0.0)],
    denominator: 2,
};

const M4_CLOSED: ExpPoly = ExpPoly {
    terms: &[
        term(87.0 / 2.0, 0, 0.0),
        term(-392.0 / 9.0, 0, 1.0),
        term(1.0 / 18.0, 0, 4.0),
        term(-30.0, 1, 0.0),
        term(8.0, 2, 0.0),
        term(-40.0 / 3.0, 1, 1.0),
    ],
    denominator: 4,
};

const M6_CLOSED: ExpPoly = ExpPoly {
    terms: &[
        term(-100.0, 3, 1.0),
        term(144.0, 3, 0.0),
        term(-3.0 / 25.0, 1, 4.0),
        term(-11991.0 / 8.0, 1, 1.0),
        term(1499.0, 1, 0.0),
        term(-1.0 / 200.0, 1, 9.0),
        term(-2123.0 / 3.0, 2, 1.0),
        term(4.0 / 15.0, 2, 4.0),
        term(-792.0, 2, 0.0),
    ],
    denominator: 6,
};

const SERIES_SWITCH: f64 = 1.0;
const SERIES_ORDERS: usize = 60;

impl ExpPoly {
    fn direct(&self, alpha: f64) -> f64 {
        let num: f64 = self
            .terms
            .iter()
            .map(|t| t.coef * alpha.powi(t.power as i32) * (-t.rate * alpha).exp())
            .sum();
        num / alpha.powi(self.denominator as i32)
    }

    /// Taylor coefficient of `α^n` in the numerator.
    fn numerator_coefficient(&self, n: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.power as usize <= n)
            .map(|t| {
                let j = n - t.power as usize;
                if t.rate == 0.0 {
                    if j == 0 {
                        t.coef
                    } else {
                        0.0
                    }
                } else {
                    let mut c = t.coef;
                    for i in 1..=j {
                        c *= -t.rate / i as f64;
                    }
                    c
                }
            })
            .sum()
    }

    fn series(&self, alpha: f64) -> f64 {
        let d = self.denominator as usize;
        let mut sum = 0.0;
        let mut pow = 1.0;
        for n in d..d + SERIES_ORDERS {
            let term = self.numerator_coefficient(n) * pow;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && n > d + 4 {
                break;
            }
            pow *= alpha;
        }
        sum
    }

    fn eval(&self, alpha: f64) -> f64 {
        if alpha < SERIES_SWITCH {
            self.series(alpha)
        } else {
            self.direct(alpha)
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("moment argument alpha = γ²Δ/2 must be > 0, got {alpha}")))
    }
}

/// Closed forms for `E[Z²]`, `E[Z⁴]`, `E[Z⁶]` at `alpha = γ²Δ/2`.
///
/// Returned verbatim; no admissibility clamp is applied because the
/// closed-form `E[Z⁶]` is not a valid moment (it exceeds 1).
pub fn closed_form_moments(alpha: f64) -> Result<ZMoments> {
    check_alpha(alpha)?;
    Ok(ZMoments {
        m2: M2_CLOSED.eval(alpha),
        m4: M4_CLOSED.eval(alpha),
        m6: M6_CLOSED.eval(alpha),
    })
}

const EXACT_MAX_ALPHA: f64 = 1.0;
const EXACT_ORDERS: usize = 80;

fn exact_coefficients() -> &'static [[f64; EXACT_ORDERS]; 3] {
    static TABLE: OnceLock<[[f64; EXACT_ORDERS]; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[0.0; EXACT_ORDERS]; 3];
        for (idx, row) in table.iter_mut().enumerate() {
            let k = idx + 1;
            let n = 2 * k;
            let mut count = 0usize;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                count += 1;
                let signs: Vec<i32> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
                let mut nodes: Vec<f64> = (0..n)
                    .map(|m| {
                        let s: i32 = signs[m..].iter().sum();
                        (s * s) as f64
                    })
                    .collect();
                nodes.push(0.0);
                let mut h = [0.0; EXACT_ORDERS];
                h[0] = 1.0;
                for &x in &nodes {
                    for r in 1..EXACT_ORDERS {
                        h[r] += x * h[r - 1];
                    }
                }
                // n!/(n+r)!
                let mut ratio = 1.0;
                for r in 0..EXACT_ORDERS {
                    if r > 0 {
                        ratio /= (n + r) as f64;
                    }
                    row[r] += h[r] * ratio;
                }
            }
            row.iter_mut().for_each(|c| *c /= count as f64);
        }
        table
    })
}

/// Moments of `|F|` from the increment-ordering series, valid for
/// `0 < alpha ≤ 1`.
pub fn exact_moments(alpha: f64) -> Result<ZMoments> {
    check_alpha(alpha)?;
    if alpha > EXACT_MAX_ALPHA {
        return Err(invalid(format!(
            "exact moment series limited to alpha <= {EXACT_MAX_ALPHA}, got {alpha}"
        )));
    }
    let table = exact_coefficients();
    let eval = |row: &[f64; EXACT_ORDERS]| {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for (r, c) in row.iter().enumerate() {
            let term = c * pow;
            sum += term;
            if r > 4 && term.abs() < 1e-19 {
                break;
            }
            pow *= -alpha;
        }
        sum
    };
    Ok(ZMoments {
        m2: eval(&table[0]),
        m4: eval(&table[1]),
        m6: eval(&table[2]),
    })
}

/// `Σ_{k≥2} (b_k − Σ_{i+j=k} a_i a_j) α^k` for `E[Z⁴] − E[Z²]²` given the
/// Taylor coefficients `a` of `E[Z²]` and `b` of `E[Z⁴]`. The constant and
/// linear terms cancel exactly and are skipped; subtracting the two moments
/// directly loses every digit once `α` is below about 1e-8.
fn variance_series(a: &[f64], b: &[f64], alpha: f64) -> f64 {
    let n = a.len().min(b.len());
    let mut sum = 0.0;
    let mut pow = alpha * alpha;
    for k in 2..n {
        let v = b[k] - (0..=k).map(|i| a[i] * a[k - i]).sum::<f64>();
        let term = v * pow;
        sum += term;
        if k > 6 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= alpha;
    }
    sum
}

/// `Var(Z²) = E[Z⁴] − E[Z²]²` under the given formula set.
pub fn var_z2(formula: MomentFormula, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    match formula {
        MomentFormula::ClosedForm if alpha >= SERIES_SWITCH => {
            let z = closed_form_moments(alpha)?;
            Ok(z.m4 - z.m2 * z.m2)
        }
        MomentFormula::ClosedForm => {
            let coefs = |e: &ExpPoly| -> Vec<f64> {
                let d = e.denominator as usize;
                (d..d + SERIES_ORDERS).map(|n| e.numerator_coefficient(n)).collect()
            };
            Ok(variance_series(&coefs(&M2_CLOSED), &coefs(&M4_CLOSED), alpha))
        }
        MomentFormula::Exact => {
            exact_moments(alpha)?;
            let table = exact_coefficients();
            let signed = |row: &[f64; EXACT_ORDERS]| -> Vec<f64> {
                row.iter().enumerate().map(|(r, c)| if r % 2 == 0 { *c } else { -c }).collect()
            };
            Ok(variance_series(&signed(&table[0]), &signed(&table[1]), alpha))
        }
    }
}

/// `E[G]` with `G = ‖F₁..F_L‖²/L`, i.e. `E[Z²]`.
pub fn mean_g(params: &ChannelParams) -> Result<f64> {
    let alpha = params.half_sigma2();
    if alpha == 0.0 {
        return Ok(1.0);
    }
    Ok(closed_form_moments(alpha)?.m2)
}

/// `Var(G) = (E[Z⁴] − E[Z²]²)/L` from the closed-form moments.
pub fn var_g(params: &ChannelParams) -> Result<f64> {
    let alpha = params.half_sigma2();
    if alpha == 0.0 {
        return Ok(0.0);
    }
    Ok(var_z2(MomentFormula::ClosedForm, alpha)? / params.oversampling as f64)
}

pub fn var_g_from_moments(m2: f64, m4: f64, oversampling: usize) -> f64 {
    (m4 - m2 * m2) / oversampling as f64
}

/// Closed-form statistics of the fading process for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingMoments {
    pub m2: f64,
    pub m4: f64,
    pub m6: f64,
    /// `E[F]`.
    pub mean_f: f64,
    /// Closed form of `E[F₀ e^{−jN₀}]`.
    pub mean_f_rot: f64,
    pub mean_g: f64,
    pub var_g: f64,
}

impl FadingMoments {
    pub fn closed_form(params: &ChannelParams) -> Result<Self> {
        Self::with_formula(params, MomentFormula::ClosedForm)
    }

    pub fn with_formula(params: &ChannelParams, formula: MomentFormula) -> Result<Self> {
        let alpha = params.half_sigma2();
        let z = if alpha == 0.0 {
            ZMoments::UNIT
        } else {
            formula.evaluate(alpha)?
        };
        let var_z2 = if alpha == 0.0 { 0.0 } else { var_z2(formula, alpha)? };
        let s2 = params.sigma2();
        Ok(Self {
            m2: z.m2,
            m4: z.m4,
            m6: z.m6,
            mean_f: closed_form_mean_f(s2)?,
            mean_f_rot: closed_form_mean_f_rot(s2)?,
            mean_g: z.m2,
            var_g: var_z2 / params.oversampling as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 40 digits: (alpha, m2, m4, m6) of the closed-form expressions.
    const CLOSED_REF: [(f64, f64, f64, f64); 8] = [
        (1e-6, 0.999_999_666_666_75, 0.999_999_333_333_699_64, 5.999_993_000_006_800),
        (0.0005, 0.999_833_354_164_583_51, 0.999_666_758_309_529_55, 5.996_501_699_195_902_1),
        (0.00125, 0.999_583_463_509_121_36, 0.999_167_239_211_533_68, 5.991_260_612_444_548_3),
        (0.005, 0.998_335_414_585_068_21, 0.996_675_809_581_099_37, 5.965_169_199_185_476_7),
        (0.05, 0.983_539_600_571_207_27, 0.967_560_085_605_527_96, 5.666_230_677_870_106_4),
        (0.5, 0.852_245_277_701_067_39, 0.739_216_802_680_886_89, 3.650_392_348_301_189_7),
        (2.0, 0.567_667_641_618_306_35, 0.374_779_643_928_991_18, 1.327_212_973_781_290_5),
        (10.0, 0.180_000_907_998_595_25, 0.054_349_196_925_686_868, 0.079_781_566_717_130_332),
    ];

    // Same reference for the exact series.
    const EXACT_REF: [(f64, f64, f64, f64); 5] = [
        (0.0005, 0.999_833_354_164_583_51, 0.999_666_758_309_529_55, 0.999_500_212_410_651_72),
        (0.00125, 0.999_583_463_509_121_36, 0.999_167_239_211_533_68, 0.998_751_326_729_791_03),
        (0.005, 0.998_335_414_585_068_21, 0.996_675_809_581_099_37, 0.995_021_160_980_197_53),
        (0.05, 0.983_539_600_571_207_27, 0.967_560_085_605_527_96, 0.952_039_142_596_543_75),
        (0.5, 0.852_245_277_701_067_39, 0.739_216_802_680_886_89, 0.649_355_442_183_698_52),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_forms_match_high_precision_reference() {
        for (alpha, m2, m4, m6) in CLOSED_REF {
            let z = closed_form_moments(alpha).unwrap();
            assert!(rel(z.m2, m2) < 1e-14, "m2({alpha}) = {}", z.m2);
            assert!(rel(z.m4, m4) < 1e-14, "m4({alpha}) = {}", z.m4);
            assert!(rel(z.m6, m6) < 1e-13, "m6({alpha}) = {}", z.m6);
        }
    }

    #[test]
    fn exact_series_matches_high_precision_reference() {
        for (alpha, m2, m4, m6) in EXACT_REF {
            let z = exact_moments(alpha).unwrap();
            assert!(rel(z.m2, m2) < 1e-14);
            assert!(rel(z.m4, m4) < 1e-14);
            assert!(rel(z.m6, m6) < 1e-14);
            assert!(z.is_admissible());
        }
    }

    #[test]
    fn series_and_direct_agree_near_switch() {
        for poly in [&M2_CLOSED, &M4_CLOSED, &M6_CLOSED] {
            let s = poly.series(0.999);
            let d = poly.direct(0.999);
            assert!(rel(s, d) < 1e-11, "{s} vs {d}");
        }
    }

    #[test]
    fn closed_forms_are_regular_at_zero() {
        for poly in [&M2_CLOSED, &M4_CLOSED, &M6_CLOSED] {
            let scale: f64 = poly.terms.iter().map(|t| t.coef.abs()).sum();
            for n in 0..poly.denominator as usize {
                assert!(poly.numerator_coefficient(n).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn small_alpha_limits() {
        let z = closed_form_moments(1e-9).unwrap();
        assert!((z.m2 - 1.0).abs() < 1e-8 && (z.m4 - 1.0).abs() < 1e-8);
        // The closed-form sixth moment tends to 6, not 1.
        assert!((z.m6 - 6.0).abs() < 1e-6);
        let e = exact_moments(1e-9).unwrap();
        assert!((e.m6 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_m6_is_the_derivative_form_of_the_exact_series() {
        // closed-form m6 = (6 + α d/dα) exact m6, checked by central differences
        for alpha in [0.002, 0.01, 0.1] {
            let h = 1e-5 * alpha;
            let f = |a: f64| exact_moments(a).unwrap().m6;
            let deriv = (f(alpha + h) - f(alpha - h)) / (2.0 * h);
            let want = 6.0 * f(alpha) + alpha * deriv;
            assert!(rel(closed_form_moments(alpha).unwrap().m6, want) < 1e-8);
        }
    }

    #[test]
    fn rejects_non_positive_alpha() {
        assert!(closed_form_moments(0.0).is_err());
        assert!(closed_form_moments(-1.0).is_err());
        assert!(exact_moments(0.0).is_err());
        assert!(exact_moments(2.0).is_err());
    }

    #[test]
    fn var_g_properties() {
        let p0 = ChannelParams::new(0.0, 1e-3, 1000, 1, 1e6, 0.5).unwrap();
        assert_eq!(var_g(&p0).unwrap(), 0.0);
        assert_eq!(mean_g(&p0).unwrap(), 1.0);

        let p = ChannelParams::new(1.0, 1e-3, 1000, 1, 1e6, 0.5).unwrap();
        let mut p2 = p;
        p2.oversampling = 2000;
        let (v1, v2) = (var_g(&p).unwrap(), var_g(&p2).unwrap());
        assert!(rel(v2, 0.5 * v1) < 1e-14);

        // Var(G)/Δ³ → γ²/45 with unit symbol time
        for delta in [1e-2f64, 1e-3, 1e-4] {
            let l = (1.0 / delta).round() as usize;
            let p = ChannelParams::new(1.0, delta, l, 1, 1e6, 0.5).unwrap();
            let ratio = var_g(&p).unwrap() / delta.powi(3) * 45.0;
            assert!((ratio - 1.0).abs() < 0.05, "Δ={delta}: ratio {ratio}");
        }
    }

    #[test]
    fn var_z2_survives_tiny_alpha() {
        // Var G/Δ³ → γ²/45 with L = 1/Δ, so Var(Z²) ≈ (4/45) α²
        for formula in [MomentFormula::ClosedForm, MomentFormula::Exact] {
            for alpha in [1e-14, 1e-10, 4e-10, 1e-7] {
                let v = var_z2(formula, alpha).unwrap();
                assert!(rel(v / (alpha * alpha), 4.0 / 45.0) < 1e-6, "{formula:?} α={alpha}: {v}");
            }
            // where plain subtraction is still accurate the two agree
            for alpha in [1e-2, 0.3, 0.99] {
                let z = formula.evaluate(alpha).unwrap();
                let direct = z.m4 - z.m2 * z.m2;
                assert!(rel(var_z2(formula, alpha).unwrap(), direct) < 1e-9, "{formula:?} α={alpha}");
            }
        }
        let z = closed_form_moments(2.0).unwrap();
        assert_eq!(var_z2(MomentFormula::ClosedForm, 2.0).unwrap(), z.m4 - z.m2 * z.m2);
    }

    #[test]
    fn fading_moments_bundle() {
        let p = ChannelParams::new(1.0, 0.01, 10, 1, 1e4, 1.0).unwrap();
        let fm = FadingMoments::with_formula(&p, MomentFormula::Exact).unwrap();
        assert!(fm.m2 <= 1.0 && fm.m2 >= fm.m4 && fm.m4 >= fm.m6 && fm.m6 >= 0.0);
        assert!(fm.mean_f > 0.0 && fm.mean_f <= 1.0);
        assert!(fm.var_g >= 0.0);
        assert!(fm.mean_f_rot <= fm.mean_f);
    }
}
