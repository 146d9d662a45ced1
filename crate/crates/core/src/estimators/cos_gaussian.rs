use crate::bounds::{cos_gaussian_lower_bound, gaussian_phase_mass, mean_cos_gaussian_phase};
use crate::channel::complex_noise;
use crate::error::{invalid, Result};
use crate::stats::{McEstimate, Welford};

use super::{run_blocks, tags, McConfig};

/// One ρ of the `E[cos∠(ρ + W)] ≥ 1 − 1/ρ²` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosGaussianRow {
    pub rho: f64,
    /// `E[cos Ψ]` by quadrature of the density.
    pub quadrature: f64,
    /// `∫ pdf − 1`.
    pub mass_error: f64,
    pub lower_bound: f64,
    pub holds: bool,
    pub mc: McEstimate,
}

impl CosGaussianRow {
    /// MC minus quadrature, in standard errors.
    pub fn z_score(&self) -> f64 {
        self.mc.z_score(self.quadrature)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosGaussianReport {
    pub rows: Vec<CosGaussianRow>,
    /// ρ values at which the inequality fails.
    pub violations: Vec<f64>,
}

impl CosGaussianReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the inequality on each ρ by quadrature, with an MC cross-check of
/// `cfg.n_samples` draws of `∠(ρ + W)` per ρ. Violations are reported, not
/// raised.
pub fn check_cos_gaussian_bound(rho_grid: &[f64], cfg: &McConfig) -> Result<CosGaussianReport> {
    if rho_grid.is_empty() {
        return Err(invalid("rho grid is empty"));
    }
    let mut rows = Vec::with_capacity(rho_grid.len());
    for (i, &rho) in rho_grid.iter().enumerate() {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("rho must be finite and > 0, got {rho}")));
        }
        let quadrature = mean_cos_gaussian_phase(rho)?;
        let mass_error = gaussian_phase_mass(rho)? - 1.0;
        let lower_bound = cos_gaussian_lower_bound(rho);
        // separate seed per grid point so rows do not share draws
        let row_cfg = cfg.with_seed(cfg.master_seed.wrapping_add(i as u64));
        let (blocks, wall) = run_blocks(&row_cfg, tags::COS_GAUSSIAN, |rng, count| {
            let mut acc = Welford::new();
            for _ in 0..count {
                let z = rho + complex_noise(rng);
                acc.push(z.re / z.norm());
            }
            Ok(acc)
        })?;
        let mut total = Welford::new();
        for b in &blocks {
            total.merge(b);
        }
        rows.push(CosGaussianRow {
            rho,
            quadrature,
            mass_error,
            lower_bound,
            holds: quadrature >= lower_bound,
            mc: McEstimate::from_welford(&total, row_cfg.master_seed, wall),
        });
    }
    let violations = rows.iter().filter(|r| !r.holds).map(|r| r.rho).collect();
    Ok(CosGaussianReport { rows, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_on_grid_and_mc_agrees() {
        let cfg = McConfig::default().with_samples(100_000).with_seed(41);
        let report = check_cos_gaussian_bound(&[0.1, 1.5, 2.0, 5.0, 10.0, 50.0], &cfg).unwrap();
        assert!(report.all_hold());
        for row in &report.rows {
            assert!(row.mass_error.abs() < 1e-10);
            assert!((-1.0..=1.0).contains(&row.quadrature));
        }
        let at2 = report.rows.iter().find(|r| r.rho == 2.0).unwrap();
        assert!(at2.z_score().abs() < 3.0, "{}", at2.z_score());
        assert!(report.rows.iter().find(|r| r.rho == 10.0).unwrap().quadrature >= 0.99);
    }

    #[test]
    fn rejects_bad_grid() {
        let cfg = McConfig::default().with_samples(10);
        assert!(check_cos_gaussian_bound(&[], &cfg).is_err());
        assert!(check_cos_gaussian_bound(&[1.0, -1.0], &cfg).is_err());
    }
}
