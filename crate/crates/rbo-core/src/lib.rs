//! Pseudospectral laboratory for the rotation-modified Benjamin-Ono equation
//!
//! ```text
//! u_t - H u_xx + (u^2)_x + gamma dx^{-1} u = 0
//! ```
//!
//! on a periodic domain: closed-form Benjamin-Ono solitary waves and their
//! residuals, a stabilized fixed-point solver for rotation-modified ground
//! states, the spectrum of the linearized operator, an integrating-factor
//! time stepper, and orbital-stability diagnostics.
//!
//! Everything is built over a uniform grid on [-L, L) with real fields and
//! their DFT spectra; Fourier phases are referenced to the domain center so
//! even profiles have real coefficients.

mod error;
mod evolution;
mod field;
mod functionals;
mod grid;
mod ground_state;
mod linearized;
mod operators;
mod soliton;
mod stability;

pub use error::CoreError;
pub use evolution::{cfl_suggest, evolve, linear_symbol, step, EvolutionConfig, Trajectory};
pub use field::{RealField, SpectralField};
pub use functionals::{
    action_i, constraint_k, energy_e, functional_record, gn_diagnostic, h_half_norm,
    inv_deriv_norm, m_ratio, mass_v, sobolev_norm, x_norm, FunctionalRecord, WaveParams,
};
pub use grid::Grid;
pub use ground_state::{
    continue_in_gamma, normalize_to_k, petviashvili_solve, petviashvili_solve_seeded, GroundState,
    SeedProfile, SolverOptions,
};
pub use linearized::{
    apply_linearized, dmass_dc, projected_min_eigenvalue, quad_form, LinearizedOp, SpectrumReport,
    MAX_DENSE_N,
};
pub use operators::{
    apply_symbol, dealias, dealiased_product, dealiased_square, derivative, even_project,
    evenness_defect, hilbert, inv_derivative, project_zero_mean, reflect, translate,
};
pub use soliton::{bo_soliton, bo_soliton_dc, gamma_rescale, rbo_residual, Residual, SolitonSpec};
pub use stability::{
    gamma_convergence_study, orbital_distance, perturb, run_stability_experiment,
    uniqueness_probe, GammaStudyRow, PerturbMode, StabilityReport, Verdict,
};
