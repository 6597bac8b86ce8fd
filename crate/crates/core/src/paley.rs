//! Littlewood-Paley dyadic decomposition, Besov/Sobolev frequency norms,
//! and measured-ratio validators for the classical block inequalities.
//!
//! The radial profile is pinned explicitly so every decomposition is
//! reproducible bit for bit: `chi(xi) = h((4/3 - xi)/(4/3 - 3/4))` with the
//! exp-bump smoothstep `h`, and `phi(xi) = chi(xi/2) - chi(xi)`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::ops::{derivative, transport, Axis2};
use ndarray::Array2;

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smoothstep(t: f64) -> f64 {
    let a = bump(t);
    let b = bump(1.0 - t);
    if a == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Radial low-pass profile: 1 on `|xi| <= 3/4`, 0 on `|xi| >= 4/3`, smooth between.
pub fn chi(xi: f64) -> f64 {
    smoothstep((4.0 / 3.0 - xi.abs()) / (4.0 / 3.0 - 3.0 / 4.0))
}

/// Shell profile `phi(xi) = chi(xi/2) - chi(xi)`, supported in `3/4 <= |xi| <= 8/3`.
pub fn phi(xi: f64) -> f64 {
    chi(xi / 2.0) - chi(xi)
}

/// Precomputed dyadic multiplier tables for one grid.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid,
    j_max: i32,
    chi_table: Array2<f64>,
    phi_tables: Vec<Array2<f64>>,
}

/// Besov index `B^s_{p,r}`; use `f64::INFINITY` for `p` or `r` = infinity.
#[derive(Debug, Clone, Copy)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Self {
        assert!(p >= 1.0 && r >= 1.0, "p and r must lie in [1, inf]");
        BesovIndex { s, p, r }
    }
}

/// Build the partition tables; `j_max = ceil(log2(max |k|)) + 1`, which makes
/// `chi + sum_j phi(2^-j .)` telescope to exactly 1 on every grid wavenumber.
pub fn build_partition(grid: Grid) -> DyadicPartition {
    let j_max = grid.max_modulus().log2().ceil() as i32 + 1;
    let n = grid.n();
    let chi_table = Array2::from_shape_fn((n, n), |(i, j)| chi(grid.modulus(i, j)));
    let phi_tables = (0..=j_max)
        .map(|jj| {
            let scale = (2.0f64).powi(-jj);
            Array2::from_shape_fn((n, n), |(i, j)| phi(grid.modulus(i, j) * scale))
        })
        .collect();
    DyadicPartition { grid, j_max, chi_table, phi_tables }
}

impl DyadicPartition {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// `chi(|k|) + sum_{0<=j<=j_max} phi(2^-j |k|)` at storage index `(i, j)`.
    pub fn partition_sum(&self, i: usize, j: usize) -> f64 {
        let mut s = self.chi_table[[i, j]];
        for table in &self.phi_tables {
            s += table[[i, j]];
        }
        s
    }

    fn multiplier(&self, j: i32) -> Option<&Array2<f64>> {
        if j == -1 {
            Some(&self.chi_table)
        } else if j >= 0 && j <= self.j_max {
            Some(&self.phi_tables[j as usize])
        } else {
            None
        }
    }
}

fn apply_table(f: &SpectralField, table: &Array2<f64>) -> SpectralField {
    let coeffs = f.coeffs() * table;
    SpectralField::from_coeffs(f.grid(), coeffs).expect("shape preserved")
}

/// Dyadic block `Delta_j f`; blocks above `j_max` are identically zero on the grid.
pub fn dyadic_block(f: &SpectralField, j: i32, part: &DyadicPartition) -> Result<SpectralField> {
    if j < -1 {
        return Err(Error::BlockIndex { j });
    }
    Ok(match part.multiplier(j) {
        Some(table) => apply_table(f, table),
        None => SpectralField::zeros(f.grid()),
    })
}

/// Low-frequency partial sum `S_j f = sum_{-1 <= q <= j-1} Delta_q f`,
/// realized by the telescoped multiplier `chi(2^-j |k|)`.
pub fn low_pass(f: &SpectralField, j: i32, part: &DyadicPartition) -> SpectralField {
    assert!(j >= 0, "low_pass requires j >= 0");
    if j == 0 {
        return apply_table(f, &part.chi_table);
    }
    let scale = (2.0f64).powi(-j);
    f.map_modes(|k1, k2, c| c * chi((k1 * k1 + k2 * k2).sqrt() * scale))
}

/// Block L^p norm in physical space by grid quadrature.
fn block_lp(f: &SpectralField, p: f64) -> Result<f64> {
    Ok(f.to_physical()?.lp_norm(p))
}

/// Besov norm: the l^r sequence norm over j of `2^{js} ||Delta_j f||_{L^p}`.
pub fn besov_norm(f: &SpectralField, idx: BesovIndex, part: &DyadicPartition) -> Result<f64> {
    let mut terms = Vec::with_capacity((part.j_max + 2) as usize);
    for j in -1..=part.j_max {
        let block = dyadic_block(f, j, part)?;
        let weight = (2.0f64).powf(idx.s * j as f64);
        terms.push(weight * block_lp(&block, idx.p)?);
    }
    Ok(if idx.r.is_infinite() {
        terms.into_iter().fold(0.0, f64::max)
    } else {
        terms
            .into_iter()
            .map(|t| t.powf(idx.r))
            .sum::<f64>()
            .powf(1.0 / idx.r)
    })
}

/// Direct Sobolev norm `sqrt(sum_k (1 + |k|^2)^s |f(k)|^2)`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let mut sum = 0.0;
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            sum += (1.0 + k1 * k1 + k2 * k2).powf(s) * f.coeffs()[[i, j]].norm_sqr();
        }
    }
    sum.sqrt()
}

/// Block characterization of the Sobolev norm:
/// `||S_0 f||_{L^2} + (sum_{q>=0} 2^{2qs} ||Delta_q f||_{L^2}^2)^{1/2}`.
pub fn sobolev_norm_blocks(f: &SpectralField, s: f64, part: &DyadicPartition) -> Result<f64> {
    let low = low_pass(f, 0, part);
    let mut sum = 0.0;
    for q in 0..=part.j_max {
        let block = dyadic_block(f, q, part)?;
        sum += (2.0f64).powf(2.0 * s * q as f64) * block.l2_norm().powi(2);
    }
    Ok(low.l2_norm() + sum.sqrt())
}

/// Measured ratios for the frequency-localized derivative inequalities.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinReport {
    /// `sup_{|a|=k} ||D^a S_j f||_{L^b} / (2^{j(k + 2(1/a - 1/b))} ||S_j f||_{L^a})`;
    /// NaN when `S_j f` vanishes.
    pub low_pass_ratio: f64,
    /// `sup_{|a|=k} ||D^a Delta_j f||_{L^a} / (2^{jk} ||Delta_j f||_{L^a})`;
    /// NaN when the block vanishes.
    pub block_upper: f64,
    /// Reciprocal side: `2^{jk} ||Delta_j f||_{L^a} / sup_{|a|=k} ||D^a Delta_j f||_{L^a}`.
    pub block_lower: f64,
}

fn sup_derivative_lp(f: &SpectralField, order: u32, p: f64) -> Result<f64> {
    if order == 0 {
        return block_lp(f, p);
    }
    let mut best = 0.0f64;
    for a1 in 0..=order {
        let a2 = order - a1;
        let mut d = f.clone();
        if a1 > 0 {
            d = derivative(&d, Axis2::X1, a1);
        }
        if a2 > 0 {
            d = derivative(&d, Axis2::X2, a2);
        }
        best = best.max(block_lp(&d, p)?);
    }
    Ok(best)
}

/// Evaluate the measured Bernstein ratios at block index `j` for exponents
/// `1 <= a <= b` and derivative order `k`.
pub fn bernstein_check(
    f: &SpectralField,
    j: i32,
    a: f64,
    b: f64,
    k: u32,
    part: &DyadicPartition,
) -> Result<BernsteinReport> {
    assert!(a >= 1.0 && b >= a, "need 1 <= a <= b");
    if f.coeff_linf() == 0.0 {
        return Err(Error::ZeroField { context: "bernstein_check" });
    }
    let two_j = (2.0f64).powi(j);

    let sj = low_pass(f, j.max(0), part);
    let sj_norm = block_lp(&sj, a)?;
    let sj_deriv = sup_derivative_lp(&sj, k, b)?;
    let inv_a = 1.0 / a;
    let inv_b = if b.is_infinite() { 0.0 } else { 1.0 / b };
    let factor = two_j.powf(k as f64 + 2.0 * (inv_a - inv_b));
    let low_pass_ratio = sj_deriv / (factor * sj_norm);

    let block = dyadic_block(f, j, part)?;
    let block_norm = block_lp(&block, a)?;
    let block_deriv = sup_derivative_lp(&block, k, a)?;
    let scale = two_j.powi(k as i32);
    let block_upper = block_deriv / (scale * block_norm);
    let block_lower = scale * block_norm / block_deriv;

    Ok(BernsteinReport { low_pass_ratio, block_upper, block_lower })
}

/// Commutator `[Delta_j, g].grad f = Delta_j(g.grad f) - g.grad(Delta_j f)`.
pub fn commutator(
    j: i32,
    g: (&SpectralField, &SpectralField),
    f: &SpectralField,
    part: &DyadicPartition,
) -> Result<SpectralField> {
    if j < -1 {
        return Err(Error::BlockIndex { j });
    }
    let g1 = g.0.to_physical()?;
    let g2 = g.1.to_physical()?;
    let full = transport(&g1, &g2, f)?;
    let block_first = dyadic_block(&full, j, part)?;
    let block_f = dyadic_block(f, j, part)?;
    let second = transport(&g1, &g2, &block_f)?;
    Ok(&block_first - &second)
}
