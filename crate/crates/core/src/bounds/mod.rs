//! Analytic lower bounds on the amplitude and phase information rates,
//! the negative-moment bound K, and the high-SNR asymptotics.

mod amplitude;
mod asymptotics;
mod kbound;
mod phase;
mod report;

pub use amplitude::{
    amplitude_bound, amplitude_bound_clamped, amplitude_bound_variant, amplitude_nu_schedule,
    default_support_exponent, nu_for_resolution, AmplitudeBoundInputs, AmplitudeVariant,
};
pub use asymptotics::{
    asymptotes_and_prelog, prelog, prelog_amplitude, prelog_phase, prelog_piecewise, Asymptotics,
};
pub use kbound::{k_bound, k_bound_with_moments, k_grid, reference_k, KBound};
pub use phase::{
    cos_gaussian_lower_bound, cos_of_gaussian_phase_pdf, cosine_lower_bound, gaussian_phase_mass,
    mean_cos_gaussian_phase, phase_bound, phase_bound_with_zeta, phase_rho, PhaseBoundInputs,
};
pub use report::{evaluate_bounds, BoundReport, BoundRequest, DEFAULT_A};
