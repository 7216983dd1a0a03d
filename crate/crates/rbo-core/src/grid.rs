use std::fmt;
use std::sync::Arc;

use crate::error::CoreError;

/// Uniform periodic grid on [-half_length, half_length).
///
/// `n` must be a power of two (>= 16) so that dx = 2L/n is exact in binary
/// floating point and the FFT sizes stay fast. Sample j sits at
/// x_j = -L + j*dx; Fourier bin j carries the signed integer frequency
/// k = j for j < n/2 and k = j - n otherwise, i.e. wavenumber xi_k = pi*k/L.
#[derive(Clone)]
pub struct Grid(Arc<GridData>);

struct GridData {
    n: usize,
    half_length: f64,
    dx: f64,
    xs: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, half_length: f64) -> Result<Grid, CoreError> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(CoreError::InvalidGrid(format!(
                "n = {n} must be a power of two >= {}",
                Self::MIN_POINTS
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "half_length = {half_length} must be finite and positive"
            )));
        }
        let dx = 2.0 * half_length / n as f64;
        let xs = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let wavenumbers = (0..n)
            .map(|j| {
                let k = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                std::f64::consts::PI * k as f64 / half_length
            })
            .collect();
        Ok(Grid(Arc::new(GridData { n, half_length, dx, xs, wavenumbers })))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn half_length(&self) -> f64 {
        self.0.half_length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.0.dx
    }

    /// Domain length 2L; also the Parseval weight for spectral sums.
    #[inline]
    pub fn length(&self) -> f64 {
        2.0 * self.0.half_length
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.0.xs[j]
    }

    #[inline]
    pub fn xs(&self) -> &[f64] {
        &self.0.xs
    }

    /// Signed wavenumber xi for Fourier bin j (standard DFT ordering).
    #[inline]
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.0.wavenumbers[j]
    }

    #[inline]
    pub fn wavenumbers(&self) -> &[f64] {
        &self.0.wavenumbers
    }

    /// Largest integer frequency kept by the 2/3-rule dealias filter.
    #[inline]
    pub fn dealias_cutoff(&self) -> usize {
        self.0.n / 3
    }

    /// Index of the sample sitting exactly at `x`, if there is one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let pos = (x + self.0.half_length) / self.0.dx;
        let j = pos.round();
        if j < 0.0 || j >= self.0.n as f64 {
            return None;
        }
        if (pos - j).abs() > 1e-9 {
            return None;
        }
        Some(j as usize)
    }

    /// Panic unless two fields were built on the same grid. Mixing grids is a
    /// programming error, not a data condition.
    #[inline]
    pub fn assert_same(&self, other: &Grid) {
        assert!(
            self == other,
            "grid mismatch: ({}, {}) vs ({}, {})",
            self.len(),
            self.half_length(),
            other.len(),
            other.half_length()
        );
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.n == other.0.n && self.0.half_length == other.0.half_length)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.0.n)
            .field("half_length", &self.0.half_length)
            .finish()
    }
}
