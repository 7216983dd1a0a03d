use thiserror::Error;

/// Error type shared by every numerical routine in this crate.
///
/// Contract violations that can only arise from caller bugs (mismatched grids,
/// out-of-range Sobolev exponents) panic instead; these variants are reserved
/// for conditions that depend on runtime data.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Fourier symbol is not Hermitian (sigma(-xi) != conj(sigma(xi)) at xi = {xi}, defect {defect:.3e})")]
    NonHermitianSymbol { xi: f64, defect: f64 },

    #[error("field has non-negligible mean {mean:.3e} (antiderivatives are defined on the zero-mean subspace)")]
    NonZeroMean { mean: f64 },

    #[error("cubic constraint K = {k:.3e} is not positive")]
    NonPositiveK { k: f64 },

    #[error("field is identically zero")]
    ZeroField,

    #[error("rescaling factor {factor:.3e} outside the supported range [2^-10, 2^10]")]
    ScaleOutOfRange { factor: f64 },

    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("iterate became non-finite{}", at_time.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Blowup { at_time: Option<f64> },

    #[error("degenerate seed: the stabilizer denominator <N(psi), psi> = {denominator:.3e} is not positive")]
    DegenerateSeed { denominator: f64 },

    #[error("time step {dt:.3e} exceeds the advisory stability limit {limit:.3e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("dense assembly requested for n = {n}, capped at {max}")]
    AssemblyTooLarge { n: usize, max: usize },

    /// The dense symmetric eigensolver did not converge within its iteration
    /// budget.
    #[error("symmetric eigensolver failed to converge on a {n}x{n} assembly")]
    EigSolverFailure { n: usize },

    #[error("continuation failed at gamma = {gamma}: {source}")]
    ContinuationFailed {
        gamma: f64,
        #[source]
        source: Box<CoreError>,
    },
}

impl CoreError {
    /// Attach a failure time to step-level errors propagated out of `evolve`.
    pub(crate) fn with_time(self, t: f64) -> CoreError {
        match self {
            CoreError::Blowup { .. } => CoreError::Blowup { at_time: Some(t) },
            other => other,
        }
    }
}
