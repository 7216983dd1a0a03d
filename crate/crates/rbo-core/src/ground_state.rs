//! Stabilized fixed-point solver for even, zero-mean solitary profiles of the
//! rotation-modified traveling-wave equation
//!
//! ```text
//! H psi_x + c psi - gamma dx^{-2} psi = psi^2,
//! ```
//!
//! iterating psi <- M^alpha L^{-1}[psi^2] with the scalar stabilizer
//! M = <L psi, psi> / <psi^2, psi>. The linear symbol s(xi) = |xi| + c +
//! gamma/xi^2 is strictly positive on the modes where it is inverted, and the
//! quadratic term is mean-projected exactly when the rotation term demands a
//! zero-mean solution. At a fixed point M = 1 and the traveling-wave residual
//! vanishes; both are reported so convergence can be judged independently.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::field::RealField;
use crate::functionals::{functional_record, FunctionalRecord, WaveParams};
use crate::grid::Grid;
use crate::operators::{dealiased_square, even_project, project_zero_mean};
use crate::soliton::{bo_soliton, rbo_residual, SolitonSpec};

/// Initial iterate families. Scales follow the speed parameter so every seed
/// starts in the right amplitude regime regardless of c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedProfile {
    /// 2c exp(-(cx)^2/2) — width 1/c, solitary-like but wrong tail.
    Gaussian,
    /// 2c sech^2(cx) — the KdV-shaped seed.
    SechSquared,
    /// The closed-form Benjamin-Ono profile at speed c (exact at gamma = 0).
    Soliton,
}

impl SeedProfile {
    fn sample(self, c: f64, g: &Grid) -> RealField {
        match self {
            SeedProfile::Gaussian => {
                RealField::from_fn(g, |x| 2.0 * c * (-0.5 * (c * x) * (c * x)).exp())
            }
            SeedProfile::SechSquared => RealField::from_fn(g, |x| {
                let s = 1.0 / (c * x).cosh();
                2.0 * c * s * s
            }),
            SeedProfile::Soliton => bo_soliton(&SolitonSpec { c, center: 0.0 }, g),
        }
    }
}

/// Tuning knobs for the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence target for both the relative iterate change and the
    /// relative traveling-wave residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Stabilizer exponent; 2 is optimal for a quadratic nonlinearity.
    pub alpha: f64,
    pub seed: SeedProfile,
    /// Optional under-relaxation factor in (0, 1]; None means a full step.
    pub damping: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 500,
            alpha: 2.0,
            seed: SeedProfile::Soliton,
            damping: None,
        }
    }
}

impl SolverOptions {
    fn assert_valid(&self) {
        assert!(self.tol > 0.0, "tolerance must be positive");
        assert!(self.max_iter >= 1, "need at least one iteration");
        assert!((1.0..=3.0).contains(&self.alpha), "stabilizer exponent outside [1, 3]");
        if let Some(theta) = self.damping {
            assert!(theta > 0.0 && theta <= 1.0, "damping factor outside (0, 1]");
        }
    }
}

/// A converged solitary profile with its convergence evidence.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub psi: RealField,
    pub params: WaveParams,
    pub residual_rel: f64,
    pub iterations: usize,
    pub functionals: FunctionalRecord,
    /// The stabilizer values M_n, one per iteration; the tail approaches 1.
    pub stabilizer_history: Vec<f64>,
}

fn linear_symbol(p: &WaveParams) -> impl Fn(f64) -> f64 + '_ {
    move |xi: f64| {
        if xi == 0.0 {
            p.c
        } else {
            xi.abs() + p.c + p.gamma / (xi * xi)
        }
    }
}

/// One projection pass: exactly even, and exactly mean-free when gamma > 0.
fn confine(u: &RealField, gamma: f64) -> RealField {
    let e = even_project(u);
    if gamma > 0.0 {
        project_zero_mean(&e)
    } else {
        e
    }
}

/// Solve from the seed profile named in `opts`.
pub fn petviashvili_solve(
    p: &WaveParams,
    g: &Grid,
    opts: &SolverOptions,
) -> Result<GroundState, CoreError> {
    let seed = opts.seed.sample(p.c, g);
    petviashvili_solve_seeded(p, g, opts, &seed)
}

/// Solve from an explicit initial iterate (warm starts, continuation).
pub fn petviashvili_solve_seeded(
    p: &WaveParams,
    g: &Grid,
    opts: &SolverOptions,
    seed: &RealField,
) -> Result<GroundState, CoreError> {
    p.assert_valid();
    opts.assert_valid();
    g.assert_same(seed.grid());

    let symbol = linear_symbol(p);
    let mut psi = confine(seed, p.gamma);
    let mut history = Vec::new();
    let mut last_residual = f64::INFINITY;

    for iteration in 1..=opts.max_iter {
        let sq = dealiased_square(&psi);
        let mut w_hat = sq.to_spectrum();
        if p.gamma > 0.0 {
            w_hat.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        }

        // Stabilizer M = <L psi, psi> / <w, psi>: the numerator in spectral
        // form (the symbol is real so this is the exact quadratic form), the
        // denominator against the projected quadratic term.
        let psi_hat = psi.to_spectrum();
        let numerator: f64 = psi_hat
            .coeffs()
            .iter()
            .zip(g.wavenumbers())
            .map(|(coeff, &xi)| symbol(xi) * coeff.norm_sqr())
            .sum::<f64>()
            * g.length();
        let denominator: f64 = w_hat
            .coeffs()
            .iter()
            .zip(psi_hat.coeffs())
            .map(|(w, c)| (w * c.conj()).re)
            .sum::<f64>()
            * g.length();
        if denominator <= 0.0 {
            return Err(CoreError::DegenerateSeed { denominator });
        }
        let stabilizer = numerator / denominator;
        history.push(stabilizer);

        let gain = stabilizer.powf(opts.alpha);
        {
            let coeffs = w_hat.coeffs_mut();
            for (coeff, &xi) in coeffs.iter_mut().zip(g.wavenumbers()) {
                *coeff *= gain / symbol(xi);
            }
            if p.gamma > 0.0 {
                coeffs[0] = Complex64::new(0.0, 0.0);
            }
        }
        let mut next = confine(&w_hat.to_real(), p.gamma);
        if let Some(theta) = opts.damping {
            next = psi.scaled(1.0 - theta).add_scaled(theta, &next);
        }
        if !next.is_finite() {
            return Err(CoreError::Blowup { at_time: None });
        }

        let change = (&next - &psi).l2_norm();
        let scale = psi.l2_norm();
        psi = next;

        debug_assert!(crate::operators::evenness_defect(&psi) == 0.0);
        debug_assert!(p.gamma == 0.0 || psi.mean().abs() <= 1e-14 * psi.linf_norm().max(1.0));

        if change <= opts.tol * scale {
            last_residual = rbo_residual(&psi, p)?.relative_norm;
            if last_residual <= opts.tol {
                return Ok(GroundState {
                    functionals: functional_record(&psi, p)?,
                    psi,
                    params: *p,
                    residual_rel: last_residual,
                    iterations: iteration,
                    stabilizer_history: history,
                });
            }
        }
    }

    if last_residual.is_infinite() {
        last_residual = rbo_residual(&psi, p)?.relative_norm;
    }
    Err(CoreError::NonConvergence { iterations: opts.max_iter, residual: last_residual })
}

/// Rescale a profile so its cubic constraint K equals `target`: cubic
/// homogeneity gives the factor (target/K(psi))^{1/3}.
pub fn normalize_to_k(psi: &RealField, target: f64) -> Result<RealField, CoreError> {
    assert!(target > 0.0 && target.is_finite(), "target constraint must be positive");
    let k = crate::functionals::constraint_k(psi);
    if k <= 0.0 {
        return Err(CoreError::NonPositiveK { k });
    }
    Ok(psi.scaled((target / k).cbrt()))
}

/// Warm-started sweep down a strictly decreasing list of rotation strengths:
/// the first point is solved from the configured seed, each later point from
/// the previous solution. Errors are tagged with the failing gamma.
pub fn continue_in_gamma(
    c: f64,
    gamma_list: &[f64],
    g: &Grid,
    opts: &SolverOptions,
) -> Result<Vec<GroundState>, CoreError> {
    assert!(!gamma_list.is_empty(), "empty continuation list");
    assert!(
        gamma_list.windows(2).all(|w| w[0] > w[1]) && *gamma_list.last().unwrap() > 0.0,
        "continuation list must be strictly decreasing and positive"
    );
    let mut states: Vec<GroundState> = Vec::with_capacity(gamma_list.len());
    for &gamma in gamma_list {
        let p = WaveParams { c, gamma };
        let result = match states.last() {
            None => petviashvili_solve(&p, g, opts),
            Some(prev) => petviashvili_solve_seeded(&p, g, opts, &prev.psi),
        };
        match result {
            Ok(state) => states.push(state),
            Err(e) => return Err(CoreError::ContinuationFailed { gamma, source: Box::new(e) }),
        }
    }
    Ok(states)
}
