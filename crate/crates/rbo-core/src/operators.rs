//! Fourier-multiplier operators and the handful of exact grid symmetries
//! (reflection, translation, dealiasing) everything else is built from.
//!
//! Symbol conventions: the Hilbert transform is -i sgn(xi), so H d/dx has
//! symbol |xi| and -H d^2/dx^2 propagates as +i xi|xi|. The unpaired Nyquist
//! bin keeps only the real part of any symbol — the Hermitian-compatible part
//! of a self-conjugate mode — which reduces to the usual "zero the Nyquist
//! derivative" rule for odd symbols.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;

/// Relative tolerance for the Hermitian-symbol precondition and the zero-mean
/// precondition on antiderivatives.
pub(crate) const SYMBOL_TOL: f64 = 1e-10;

pub(crate) fn apply_multiplier_spectral(
    spectrum: &mut SpectralField,
    sigma: impl Fn(f64) -> Complex64,
) {
    let n = spectrum.grid().len();
    let wavenumbers: Vec<f64> = spectrum.grid().wavenumbers().to_vec();
    let coeffs = spectrum.coeffs_mut();
    for j in 0..n {
        let s = sigma(wavenumbers[j]);
        // Self-conjugate bins must act through a real factor to keep the field
        // real: bin 0 (checked Hermitian already) and the unpaired Nyquist.
        if j == n / 2 {
            coeffs[j] *= s.re;
        } else {
            coeffs[j] *= s;
        }
    }
}

fn check_hermitian(grid: &Grid, sigma: &impl Fn(f64) -> Complex64) -> Result<(), CoreError> {
    let n = grid.len();
    let s0 = sigma(0.0);
    if s0.im.abs() > SYMBOL_TOL * (1.0 + s0.norm()) {
        return Err(CoreError::NonHermitianSymbol { xi: 0.0, defect: s0.im.abs() });
    }
    for j in 1..n / 2 {
        let xi = grid.wavenumber(j);
        let plus = sigma(xi);
        let minus = sigma(-xi);
        let defect = (plus - minus.conj()).norm();
        if defect > SYMBOL_TOL * (1.0 + plus.norm()) {
            return Err(CoreError::NonHermitianSymbol { xi, defect });
        }
    }
    Ok(())
}

/// Apply a Fourier multiplier u -> F^-1 [ sigma(xi) F u ].
///
/// The symbol must satisfy sigma(-xi) = conj(sigma(xi)) so the result is real;
/// it is checked on every paired grid frequency before anything is touched.
pub fn apply_symbol(
    u: &RealField,
    sigma: impl Fn(f64) -> Complex64,
) -> Result<RealField, CoreError> {
    check_hermitian(u.grid(), &sigma)?;
    let mut spectrum = u.to_spectrum();
    apply_multiplier_spectral(&mut spectrum, sigma);
    Ok(spectrum.to_real())
}

/// Hilbert transform: symbol -i sgn(xi). The mean mode is annihilated
/// (sgn(0) = 0), matching the principal-value transform of a constant.
pub fn hilbert(u: &RealField) -> RealField {
    let mut s = u.to_spectrum();
    apply_multiplier_spectral(&mut s, |xi| Complex64::new(0.0, -sign(xi)));
    s.to_real()
}

/// Spectral derivative d/dx (symbol i xi; Nyquist zeroed).
pub fn derivative(u: &RealField) -> RealField {
    let mut s = u.to_spectrum();
    apply_multiplier_spectral(&mut s, |xi| Complex64::new(0.0, xi));
    s.to_real()
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Zero-mean check shared by the antiderivative operators: the integral of u
/// must vanish at the scale of its L2 norm.
pub(crate) fn require_zero_mean(u: &RealField) -> Result<(), CoreError> {
    let integral = u.integral();
    if integral.abs() > SYMBOL_TOL * u.l2_norm().max(1e-300) {
        return Err(CoreError::NonZeroMean { mean: u.mean() });
    }
    Ok(())
}

/// Antiderivative of order 1 or 2 on the zero-mean subspace (integration
/// constants fixed to zero: the result has zero mean as well).
pub fn inv_derivative(u: &RealField, order: u32) -> Result<RealField, CoreError> {
    assert!(order == 1 || order == 2, "only first and second antiderivatives are defined");
    require_zero_mean(u)?;
    let mut s = u.to_spectrum();
    apply_multiplier_spectral(&mut s, |xi| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else if order == 1 {
            Complex64::new(0.0, -1.0 / xi) // 1/(i xi)
        } else {
            Complex64::new(-1.0 / (xi * xi), 0.0) // 1/(i xi)^2
        }
    });
    s.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    Ok(s.to_real())
}

/// Remove the grid mean.
pub fn project_zero_mean(u: &RealField) -> RealField {
    let m = u.mean();
    RealField::from_samples(u.grid().clone(), u.samples().iter().map(|v| v - m).collect())
}

pub(crate) fn dealias_spectrum(s: &mut SpectralField) {
    let n = s.grid().len();
    let cutoff = s.grid().dealias_cutoff();
    let coeffs = s.coeffs_mut();
    for j in 0..n {
        let k = if j < n / 2 { j } else { n - j };
        if k > cutoff {
            coeffs[j] = Complex64::new(0.0, 0.0);
        }
    }
}

/// 2/3-rule low-pass filter: zero every coefficient with |k| > n/3.
pub fn dealias(u: &RealField) -> RealField {
    let mut s = u.to_spectrum();
    dealias_spectrum(&mut s);
    s.to_real()
}

/// Dealiased pointwise square: P[(Pu)^2] with P the 2/3-rule filter.
///
/// With the cutoff at n/3 the aliased images of the square fall entirely in
/// the discarded band, so this equals the exact L2 projection of (Pu)^2.
pub fn dealiased_square(u: &RealField) -> RealField {
    let filtered = dealias(u);
    let mut s = filtered.pointwise_mul(&filtered).to_spectrum();
    dealias_spectrum(&mut s);
    s.to_real()
}

/// Dealiased pointwise product P[(Pu)(Pv)].
pub fn dealiased_product(u: &RealField, v: &RealField) -> RealField {
    u.grid().assert_same(v.grid());
    let fu = dealias(u);
    let fv = dealias(v);
    let mut s = fu.pointwise_mul(&fv).to_spectrum();
    dealias_spectrum(&mut s);
    s.to_real()
}

/// Exact grid reflection u(x) -> u(-x) (periodic images included).
pub fn reflect(u: &RealField) -> RealField {
    let n = u.grid().len();
    let src = u.samples();
    let samples = (0..n).map(|j| src[(n - j) % n]).collect();
    RealField::from_samples(u.grid().clone(), samples)
}

/// Projection onto the even subspace: (u + reflect u)/2.
pub fn even_project(u: &RealField) -> RealField {
    let n = u.grid().len();
    let src = u.samples();
    let samples = (0..n).map(|j| 0.5 * (src[j] + src[(n - j) % n])).collect();
    RealField::from_samples(u.grid().clone(), samples)
}

/// Largest pointwise asymmetry max_j |u(x_j) - u(-x_j)|.
pub fn evenness_defect(u: &RealField) -> f64 {
    let n = u.grid().len();
    let src = u.samples();
    (0..n).fold(0.0f64, |m, j| m.max((src[j] - src[(n - j) % n]).abs()))
}

/// Spectral translation u(x) -> u(x + z) (exact for band-limited data).
pub fn translate(u: &RealField, z: f64) -> RealField {
    let mut s = u.to_spectrum();
    apply_multiplier_spectral(&mut s, |xi| Complex64::from_polar(1.0, xi * z));
    s.to_real()
}
