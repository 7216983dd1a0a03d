use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::grid::Grid;

/// Process-wide FFT plan cache. rustfft's planner memoizes plans per size, and
/// the returned `Arc<dyn Fft>` is safe to run from any thread, so a single
/// mutex around planning keeps every operation concurrency-safe without
/// handing plans around explicitly.
static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft(n, direction)
}

#[inline]
fn parity(j: usize) -> f64 {
    if j & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized inverse DFT on raw bin data, out[m] = sum_k buf[k] e^{2πikm/n},
/// with none of the centering or scaling the field types apply. For
/// correlation-style sums over all grid shifts at once.
pub(crate) fn raw_inverse_dft(buf: &mut [Complex64]) {
    plan(buf.len(), FftDirection::Inverse).process(buf);
}

/// Real samples on a periodic grid.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

/// Fourier coefficients of a real field, normalized so that coefficient 0 is
/// the grid mean and u(x_j) = sum_k coeff_k exp(i xi_k x_j). The phases are
/// referenced to x = 0 (the domain center), so an even real field has purely
/// real coefficients.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> RealField {
        assert_eq!(samples.len(), grid.len(), "sample count must match the grid");
        debug_assert!(samples.iter().all(|v| v.is_finite()), "field samples must be finite");
        RealField { grid, samples }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> RealField {
        let samples = grid.xs().iter().map(|&x| f(x)).collect();
        RealField::from_samples(grid.clone(), samples)
    }

    pub fn zeros(grid: &Grid) -> RealField {
        RealField { grid: grid.clone(), samples: vec![0.0; grid.len()] }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Trapezoid (= rectangle, periodic) quadrature of the samples.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    /// L2 inner product dx * sum(u v).
    pub fn inner(&self, other: &RealField) -> f64 {
        self.grid.assert_same(&other.grid);
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.dx()
    }

    pub fn scaled(&self, factor: f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|v| v * factor).collect(),
        }
    }

    /// self + factor * other.
    pub fn add_scaled(&self, factor: f64, other: &RealField) -> RealField {
        self.grid.assert_same(&other.grid);
        RealField {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &RealField) -> RealField {
        self.grid.assert_same(&other.grid);
        RealField {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn to_spectrum(&self) -> SpectralField {
        let n = self.grid.len();
        let mut buf: Vec<Complex64> =
            self.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan(n, FftDirection::Forward).process(&mut buf);
        let scale = 1.0 / n as f64;
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= parity(j) * scale;
        }
        SpectralField { grid: self.grid.clone(), coeffs: buf }
    }
}

impl std::ops::Add for &RealField {
    type Output = RealField;
    fn add(self, rhs: &RealField) -> RealField {
        self.add_scaled(1.0, rhs)
    }
}

impl std::ops::Sub for &RealField {
    type Output = RealField;
    fn sub(self, rhs: &RealField) -> RealField {
        self.add_scaled(-1.0, rhs)
    }
}

impl SpectralField {
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> SpectralField {
        assert_eq!(coeffs.len(), grid.len(), "coefficient count must match the grid");
        SpectralField { grid, coeffs }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Grid mean of the underlying field.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// L2 norm via Parseval: sum |coeff|^2 * (2 half_length).
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.length()).sqrt()
    }

    /// Largest Hermitian-symmetry defect |coeff(-xi) - conj(coeff(xi))|,
    /// for diagnostics and debug assertions.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for j in 1..n / 2 {
            let d = (self.coeffs[n - j] - self.coeffs[j].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    pub fn to_real(&self) -> RealField {
        // Defects scale with the magnitudes that *produced* the spectrum, which
        // may exceed the surviving coefficients after cancellation (residuals of
        // near-solutions), hence the absolute floor alongside the relative term.
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        debug_assert!(
            self.hermitian_defect() <= 1e-12 * max.max(1.0),
            "spectrum lost Hermitian symmetry (defect {:.3e}, max |coeff| {:.3e})",
            self.hermitian_defect(),
            max
        );
        let n = self.grid.len();
        let mut buf: Vec<Complex64> =
            self.coeffs.iter().enumerate().map(|(j, c)| c * parity(j)).collect();
        plan(n, FftDirection::Inverse).process(&mut buf);
        let samples = buf.iter().map(|c| c.re).collect();
        RealField { grid: self.grid.clone(), samples }
    }
}
