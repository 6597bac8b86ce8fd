//! Field representations: complex Fourier coefficients and real collocation values.
//!
//! Transform convention: `coeff(0)` equals the mean of the field, so the
//! inverse transform is the plain Fourier sum `f(x) = sum_k coeff(k) e^{i k.x}`.
//! Discrete L^p norms use grid quadrature: `(mean(|f|^p) * area)^{1/p}`.

use crate::error::{Error, Result};
use crate::fft::{fft2_forward, fft2_inverse};
use crate::grid::Grid;
use ndarray::Array2;
use num_complex::Complex;

/// Complex Fourier coefficients of a real scalar field on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array2<Complex<f64>>,
}

/// Real values on the n x n uniform collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Array2<f64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.n();
        SpectralField {
            grid,
            coeffs: Array2::default((n, n)),
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Array2<Complex<f64>>) -> Result<Self> {
        if coeffs.nrows() != grid.n() || coeffs.ncols() != grid.n() {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex<f64>> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex<f64>> {
        &mut self.coeffs
    }

    /// Coefficient at signed integer wavenumbers `(k1, k2)`.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex<f64> {
        self.coeffs[[self.grid.index_of(k1), self.grid.index_of(k2)]]
    }

    pub fn set_coeff(&mut self, k1: i64, k2: i64, value: Complex<f64>) {
        let idx = [self.grid.index_of(k1), self.grid.index_of(k2)];
        self.coeffs[idx] = value;
    }

    /// Mean of the field (the k = 0 coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]].re
    }

    /// New field with each coefficient mapped through `f(k1, k2, c)`,
    /// wavenumbers in physical units.
    pub fn map_modes<F>(&self, mut f: F) -> SpectralField
    where
        F: FnMut(f64, f64, Complex<f64>) -> Complex<f64>,
    {
        let n = self.grid.n();
        let mut out = self.coeffs.clone();
        for i in 0..n {
            let k1 = self.grid.wavenumber(i);
            for j in 0..n {
                let k2 = self.grid.wavenumber(j);
                out[[i, j]] = f(k1, k2, out[[i, j]]);
            }
        }
        SpectralField { grid: self.grid, coeffs: out }
    }

    /// Largest deviation from Hermitian symmetry `coeff(-k) = conj(coeff(k))`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ic = (n - i) % n;
            for j in 0..n {
                let jc = (n - j) % n;
                let d = self.coeffs[[ic, jc]] - self.coeffs[[i, j]].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Force exact Hermitian symmetry by averaging conjugate pairs.
    pub fn hermitian_symmetrize(&mut self) {
        let n = self.grid.n();
        for i in 0..n {
            let ic = (n - i) % n;
            for j in 0..n {
                let jc = (n - j) % n;
                if (i, j) <= (ic, jc) {
                    let a = self.coeffs[[i, j]];
                    let b = self.coeffs[[ic, jc]];
                    let avg = 0.5 * (a + b.conj());
                    self.coeffs[[i, j]] = avg;
                    self.coeffs[[ic, jc]] = avg.conj();
                }
            }
        }
    }

    /// Inverse transform. Fails if the coefficients are not Hermitian-symmetric
    /// to 1e-12 relative; the sub-threshold imaginary residue is discarded.
    /// Fields below numerical zero (coefficients under 1e-13) skip the check.
    pub fn to_physical(&self) -> Result<PhysicalField> {
        let scale = self.coeff_linf();
        if scale > 1e-13 {
            let asym = self.max_asymmetry();
            if asym > 1e-12 * scale {
                return Err(Error::NonHermitian { max_asymmetry: asym });
            }
        }
        let mut work = self.coeffs.clone();
        fft2_inverse(&mut work);
        let values = work.map(|c| c.re);
        Ok(PhysicalField { grid: self.grid, values })
    }

    /// L^2 norm under grid quadrature (Parseval: `sqrt(area * sum |coeff|^2)`).
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (sum * self.grid.area()).sqrt()
    }

    /// Largest coefficient modulus.
    pub fn coeff_linf(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// self + factor * other
    pub fn add_scaled(&self, other: &SpectralField, factor: f64) -> SpectralField {
        debug_assert_eq!(self.grid, other.grid);
        let coeffs = &self.coeffs + &other.coeffs.map(|c| c * factor);
        SpectralField { grid: self.grid, coeffs }
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.map(|c| c * factor),
        }
    }
}

impl std::ops::Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.add_scaled(rhs, 1.0)
    }
}

impl std::ops::Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.add_scaled(rhs, -1.0)
    }
}

impl std::ops::Add<&SpectralField> for SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.add_scaled(rhs, 1.0)
    }
}

impl std::ops::Sub<&SpectralField> for SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.add_scaled(rhs, -1.0)
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.n();
        PhysicalField {
            grid,
            values: Array2::zeros((n, n)),
        }
    }

    /// Sample `f(x1, x2)` at the collocation points.
    pub fn from_fn<F>(grid: Grid, mut f: F) -> Self
    where
        F: FnMut(f64, f64) -> f64,
    {
        let n = grid.n();
        let values = Array2::from_shape_fn((n, n), |(i, j)| {
            f(grid.coordinate(i), grid.coordinate(j))
        });
        PhysicalField { grid, values }
    }

    pub fn from_values(grid: Grid, values: Array2<f64>) -> Result<Self> {
        if values.nrows() != grid.n() || values.ncols() != grid.n() {
            return Err(Error::GridMismatch);
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.values.len() as f64)
    }

    /// Forward transform; `coeff(0)` is the grid mean.
    pub fn to_spectral(&self) -> SpectralField {
        let mut work = self.values.map(|&v| Complex::new(v, 0.0));
        fft2_forward(&mut work);
        let norm = 1.0 / (self.grid.n() * self.grid.n()) as f64;
        work.map_inplace(|c| *c *= norm);
        SpectralField { grid: self.grid, coeffs: work }
    }

    /// Grid-quadrature L^p norm; `p = inf` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "p must be >= 1");
        if p.is_infinite() {
            return self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        }
        let mean_pow = self
            .values
            .iter()
            .map(|v| v.abs().powf(p))
            .sum::<f64>()
            / self.values.len() as f64;
        (mean_pow * self.grid.area()).powf(1.0 / p)
    }

    pub fn linf_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }
}
