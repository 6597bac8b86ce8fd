//! Uniform periodic grid on the square torus and its wavenumber layout.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Square periodic grid with `n` modes per axis on `[0, length)^2`.
///
/// Wavenumbers per axis are the integers `k in {-n/2, ..., n/2 - 1}` scaled
/// by `2*pi/length`. `dealias_radius` is kept in integer-wavenumber units;
/// the physical cutoff is `dealias_radius * 2*pi/length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    dealias_radius: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64, dealias_radius: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n must be even and >= 8, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length must be > 0, got {length}")));
        }
        if !(dealias_radius > 0.0) || dealias_radius > n as f64 / 2.0 {
            return Err(Error::InvalidGrid(format!(
                "dealias_radius must lie in (0, n/2], got {dealias_radius}"
            )));
        }
        Ok(Grid { n, length, dealias_radius })
    }

    /// Grid with the 2/3-rule cutoff `radius = n/3` (integer wavenumbers).
    pub fn with_default_dealias(n: usize, length: f64) -> Result<Self> {
        Grid::new(n, length, n as f64 / 3.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Dealias radius in integer-wavenumber units.
    pub fn dealias_radius(&self) -> f64 {
        self.dealias_radius
    }

    /// Dealias radius in physical wavenumber units.
    pub fn dealias_radius_physical(&self) -> f64 {
        self.dealias_radius * self.wavenumber_scale()
    }

    /// Physical wavenumber per integer index: `2*pi/length`.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Collocation spacing `length / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Domain area `length^2`.
    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Signed integer wavenumber for storage index `i` (FFT bin order).
    pub fn k_int(&self, i: usize) -> i64 {
        debug_assert!(i < self.n);
        if i <= self.n / 2 - 1 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber for storage index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.k_int(i) as f64 * self.wavenumber_scale()
    }

    /// Euclidean modulus of the physical wavenumber at storage index `(i, j)`.
    pub fn modulus(&self, i: usize, j: usize) -> f64 {
        let k1 = self.wavenumber(i);
        let k2 = self.wavenumber(j);
        (k1 * k1 + k2 * k2).sqrt()
    }

    /// Largest physical wavenumber modulus present on the grid.
    pub fn max_modulus(&self) -> f64 {
        let m = self.n as f64 / 2.0;
        (2.0 * m * m).sqrt() * self.wavenumber_scale()
    }

    /// Physical coordinate of collocation point index `i`.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Storage index holding signed integer wavenumber `k`.
    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        (k.rem_euclid(n)) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_layout() {
        let g = Grid::with_default_dealias(16, 2.0 * PI).unwrap();
        assert_eq!(g.k_int(0), 0);
        assert_eq!(g.k_int(7), 7);
        assert_eq!(g.k_int(8), -8);
        assert_eq!(g.k_int(15), -1);
        assert_eq!(g.index_of(-8), 8);
        assert_eq!(g.index_of(-1), 15);
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
        assert!((g.max_modulus() - (128.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wavenumber_scaling_with_length() {
        let g = Grid::with_default_dealias(16, PI).unwrap();
        assert!((g.wavenumber(1) - 2.0).abs() < 1e-15);
        assert!((g.dealias_radius_physical() - 16.0 / 3.0 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(7, 2.0 * PI, 2.0).is_err());
        assert!(Grid::new(6, 2.0 * PI, 2.0).is_err());
        assert!(Grid::new(16, 0.0, 2.0).is_err());
        assert!(Grid::new(16, 2.0 * PI, 0.0).is_err());
        assert!(Grid::new(16, 2.0 * PI, 9.0).is_err());
    }
}
