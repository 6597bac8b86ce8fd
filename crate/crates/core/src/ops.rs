//! Spectral operators: derivatives, inverse Laplacian, Biot-Savart velocity
//! recovery, Helmholtz projection, and the sharp frequency cutoff.

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use num_complex::Complex;

/// Coordinate axis selector for derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis2 {
    X1,
    X2,
}

/// Spectral derivative: multiply `coeff(k)` by `(i k_axis)^order`.
pub fn derivative(f: &SpectralField, axis: Axis2, order: u32) -> SpectralField {
    f.map_modes(|k1, k2, c| {
        let k = match axis {
            Axis2::X1 => k1,
            Axis2::X2 => k2,
        };
        Complex::new(0.0, k).powu(order) * c
    })
}

/// Laplacian: multiply by `-|k|^2`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.map_modes(|k1, k2, c| c * -(k1 * k1 + k2 * k2))
}

/// Inverse Laplacian on zero-mean fields: divide by `-|k|^2`, keep `coeff(0) = 0`.
pub fn inverse_laplacian(f: &SpectralField) -> Result<SpectralField> {
    let mean = f.mean();
    if mean.abs() > 1e-12 {
        return Err(Error::NonZeroMean { context: "inverse_laplacian", mean });
    }
    let mut out = f.map_modes(|k1, k2, c| {
        let k_sq = k1 * k1 + k2 * k2;
        if k_sq == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            c / -k_sq
        }
    });
    out.set_coeff(0, 0, Complex::new(0.0, 0.0));
    Ok(out)
}

/// Velocity from scalar vorticity: `u = mean_u + grad_perp(psi)` with
/// `lap psi = omega`. The result is divergence-free mode by mode and its
/// curl reproduces the input.
pub fn velocity_from_vorticity(
    omega: &SpectralField,
    mean_u: [f64; 2],
) -> Result<(SpectralField, SpectralField)> {
    let mean = omega.mean();
    if mean.abs() > 1e-12 {
        return Err(Error::NonZeroMean { context: "velocity_from_vorticity", mean });
    }
    // u1 = -d2 psi = i k2 omega / |k|^2, u2 = d1 psi = -i k1 omega / |k|^2
    let mut u1 = omega.map_modes(|k1, k2, c| {
        let k_sq = k1 * k1 + k2 * k2;
        if k_sq == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, k2 / k_sq) * c
        }
    });
    let mut u2 = omega.map_modes(|k1, k2, c| {
        let k_sq = k1 * k1 + k2 * k2;
        if k_sq == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, -k1 / k_sq) * c
        }
    });
    u1.set_coeff(0, 0, Complex::new(mean_u[0], 0.0));
    u2.set_coeff(0, 0, Complex::new(mean_u[1], 0.0));
    Ok((u1, u2))
}

/// Scalar curl `d1 v2 - d2 v1`.
pub fn curl(v1: &SpectralField, v2: &SpectralField) -> SpectralField {
    &derivative(v2, Axis2::X1, 1) - &derivative(v1, Axis2::X2, 1)
}

/// Divergence `d1 v1 + d2 v2`.
pub fn divergence(v1: &SpectralField, v2: &SpectralField) -> SpectralField {
    &derivative(v1, Axis2::X1, 1) + &derivative(v2, Axis2::X2, 1)
}

/// Leray-Helmholtz projection onto divergence-free fields:
/// `(Pv)(k) = v(k) - k (k.v(k))/|k|^2`, k = 0 mode untouched.
pub fn helmholtz_project(
    v1: &SpectralField,
    v2: &SpectralField,
) -> (SpectralField, SpectralField) {
    let mut p1 = v1.coeffs().clone();
    let mut p2 = v2.coeffs().clone();
    let grid = v1.grid();
    let n = grid.n();
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let k_sq = k1 * k1 + k2 * k2;
            if k_sq == 0.0 {
                continue;
            }
            let dot = (p1[[i, j]] * k1 + p2[[i, j]] * k2) / k_sq;
            p1[[i, j]] -= dot * k1;
            p2[[i, j]] -= dot * k2;
        }
    }
    (
        SpectralField::from_coeffs(grid, p1).expect("shape preserved"),
        SpectralField::from_coeffs(grid, p2).expect("shape preserved"),
    )
}

/// Sharp frequency-ball cutoff: zero all coefficients with `|k| > n_cut`
/// (physical wavenumber modulus; ties `|k| = n_cut` are kept).
pub fn friedrichs_cutoff(f: &SpectralField, n_cut: f64) -> SpectralField {
    assert!(n_cut > 0.0, "cutoff must be positive");
    f.map_modes(|k1, k2, c| {
        if (k1 * k1 + k2 * k2).sqrt() > n_cut {
            Complex::new(0.0, 0.0)
        } else {
            c
        }
    })
}

/// The grid's standard dealiasing cutoff (2/3 rule by default).
pub fn dealias(f: &SpectralField) -> SpectralField {
    friedrichs_cutoff(f, f.grid().dealias_radius_physical())
}

/// Largest coefficient modulus outside the dealias radius.
pub fn dealias_excess(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let r = grid.dealias_radius_physical();
    let n = grid.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if grid.modulus(i, j) > r {
                worst = worst.max(f.coeffs()[[i, j]].norm());
            }
        }
    }
    worst
}

/// Pointwise product of two physical fields, transformed back and dealiased.
pub fn product_spectral(a: &PhysicalField, b: &PhysicalField) -> SpectralField {
    debug_assert_eq!(a.grid(), b.grid());
    let mut prod = PhysicalField::zeros(a.grid());
    for (dst, (x, y)) in prod
        .values_mut()
        .iter_mut()
        .zip(a.values().iter().zip(b.values().iter()))
    {
        *dst = x * y;
    }
    dealias(&prod.to_spectral())
}

/// Transport term `g . grad f`, formed pseudo-spectrally and dealiased.
pub fn transport(
    g1: &PhysicalField,
    g2: &PhysicalField,
    f: &SpectralField,
) -> Result<SpectralField> {
    let f1 = derivative(f, Axis2::X1, 1).to_physical()?;
    let f2 = derivative(f, Axis2::X2, 1).to_physical()?;
    Ok(&product_spectral(g1, &f1) + &product_spectral(g2, &f2))
}

/// Evaluate a band-limited field on a `factor`-times finer grid by zero padding.
pub fn upsample(f: &SpectralField, factor: usize) -> Result<PhysicalField> {
    assert!(factor >= 1);
    let grid = f.grid();
    let fine = crate::grid::Grid::new(
        grid.n() * factor,
        grid.length(),
        grid.dealias_radius() * factor as f64,
    )?;
    let mut out = SpectralField::zeros(fine);
    let n = grid.n() as i64;
    for i in 0..grid.n() {
        let k1 = grid.k_int(i);
        for j in 0..grid.n() {
            let k2 = grid.k_int(j);
            // skip the unpaired Nyquist line; dealiased fields never carry it
            if k1 == -n / 2 || k2 == -n / 2 {
                continue;
            }
            out.set_coeff(k1, k2, f.coeffs()[[i, j]]);
        }
    }
    out.to_physical()
}

/// L^2 inner product under grid quadrature: `area * sum_k f(k) conj(g(k))`.
pub fn inner(f: &SpectralField, g: &SpectralField) -> f64 {
    debug_assert_eq!(f.grid(), g.grid());
    let s: f64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs().iter())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    s * f.grid().area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalField;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::with_default_dealias(n, 2.0 * PI).unwrap()
    }

    fn random_band_limited(g: Grid, seed: u64, kmax: i64, zero_mean: bool) -> SpectralField {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(g);
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                if zero_mean && k1 == 0 && k2 == 0 {
                    continue;
                }
                f.set_coeff(
                    k1,
                    k2,
                    num_complex::Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                );
            }
        }
        f.hermitian_symmetrize();
        f
    }

    #[test]
    fn derivative_of_cosine() {
        let g = grid(16);
        let f = PhysicalField::from_fn(g, |x1, _| x1.cos()).to_spectral();
        let df = derivative(&f, Axis2::X1, 1).to_physical().unwrap();
        for i in 0..16 {
            let expect = -g.coordinate(i).sin();
            assert!((df.values()[[i, 3]] - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_along_independent_axis_vanishes() {
        let g = grid(16);
        let f = PhysicalField::from_fn(g, |x1, _| (2.0 * x1).sin()).to_spectral();
        let df = derivative(&f, Axis2::X2, 1);
        assert!(df.coeff_linf() < 1e-14);
    }

    #[test]
    fn laplacian_scales_single_mode() {
        let g = grid(16);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(3, -2, num_complex::Complex::new(0.5, 0.1));
        f.set_coeff(-3, 2, num_complex::Complex::new(0.5, -0.1));
        let lf = laplacian(&f);
        let expect = -(9.0 + 4.0);
        assert!((lf.coeff(3, -2) / f.coeff(3, -2) - expect).norm() < 1e-13);
        // apply via summed axis derivatives as a cross-check
        let alt = &derivative(&f, Axis2::X1, 2) + &derivative(&f, Axis2::X2, 2);
        assert!((&alt - &lf).coeff_linf() < 1e-13);
    }

    #[test]
    fn inverse_laplacian_inverts() {
        let g = grid(32);
        let f = random_band_limited(g, 3, 5, true);
        let back = inverse_laplacian(&laplacian(&f)).unwrap();
        assert!((&back - &f).coeff_linf() < 1e-12 * f.coeff_linf());
    }

    #[test]
    fn inverse_laplacian_of_negative_cosine() {
        let g = grid(16);
        let f = PhysicalField::from_fn(g, |x1, _| -x1.cos()).to_spectral();
        let psi = inverse_laplacian(&f).unwrap().to_physical().unwrap();
        for i in 0..16 {
            assert!((psi.values()[[i, 0]] - g.coordinate(i).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_laplacian_rejects_nonzero_mean() {
        let g = grid(8);
        let f = PhysicalField::from_fn(g, |_, _| 1.0).to_spectral();
        match inverse_laplacian(&f) {
            Err(Error::NonZeroMean { mean, .. }) => assert!((mean - 1.0).abs() < 1e-12),
            other => panic!("expected NonZeroMean, got {other:?}"),
        }
    }

    #[test]
    fn taylor_green_velocity() {
        let g = grid(32);
        let omega = PhysicalField::from_fn(g, |x1, x2| 2.0 * x1.sin() * x2.sin()).to_spectral();
        let (u1, u2) = velocity_from_vorticity(&omega, [0.0, 0.0]).unwrap();
        let u1p = u1.to_physical().unwrap();
        let u2p = u2.to_physical().unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let (x1, x2) = (g.coordinate(i), g.coordinate(j));
                assert!((u1p.values()[[i, j]] - x1.sin() * x2.cos()).abs() < 1e-12);
                assert!((u2p.values()[[i, j]] + x1.cos() * x2.sin()).abs() < 1e-12);
            }
        }
        let back = curl(&u1, &u2);
        assert!((&back - &omega).coeff_linf() < 1e-12);
    }

    #[test]
    fn zero_vorticity_gives_mean_flow() {
        let g = grid(8);
        let omega = SpectralField::zeros(g);
        let (u1, u2) = velocity_from_vorticity(&omega, [0.7, -1.2]).unwrap();
        let u1p = u1.to_physical().unwrap();
        let u2p = u2.to_physical().unwrap();
        assert!(u1p.values().iter().all(|v| (v - 0.7).abs() < 1e-14));
        assert!(u2p.values().iter().all(|v| (v + 1.2).abs() < 1e-14));
    }

    #[test]
    fn velocity_is_divergence_free_and_curl_consistent() {
        let g = grid(32);
        let omega = random_band_limited(g, 17, 8, true);
        let (u1, u2) = velocity_from_vorticity(&omega, [0.0, 0.0]).unwrap();
        let div = divergence(&u1, &u2);
        assert!(div.coeff_linf() < 1e-13);
        let back = curl(&u1, &u2);
        let errp = (&back - &omega).to_physical().unwrap().linf_norm();
        assert!(errp < 1e-12, "curl mismatch {errp:.3e}");
    }

    #[test]
    fn projection_annihilates_gradients() {
        let g = grid(32);
        let phi = random_band_limited(g, 23, 7, true);
        let g1 = derivative(&phi, Axis2::X1, 1);
        let g2 = derivative(&phi, Axis2::X2, 1);
        let (p1, p2) = helmholtz_project(&g1, &g2);
        assert!(p1.coeff_linf() < 1e-13 * phi.coeff_linf().max(1.0));
        assert!(p2.coeff_linf() < 1e-13 * phi.coeff_linf().max(1.0));
    }

    #[test]
    fn projection_fixes_divergence_free_fields() {
        let g = grid(32);
        let omega = random_band_limited(g, 29, 7, true);
        let (u1, u2) = velocity_from_vorticity(&omega, [0.3, 0.4]).unwrap();
        let (p1, p2) = helmholtz_project(&u1, &u2);
        assert!((&p1 - &u1).coeff_linf() < 1e-14);
        assert!((&p2 - &u2).coeff_linf() < 1e-14);
    }

    #[test]
    fn projection_is_idempotent() {
        let g = grid(32);
        let v1 = random_band_limited(g, 31, 9, false);
        let v2 = random_band_limited(g, 37, 9, false);
        let (p1, p2) = helmholtz_project(&v1, &v2);
        let (q1, q2) = helmholtz_project(&p1, &p2);
        assert!((&q1 - &p1).coeff_linf() < 1e-14);
        assert!((&q2 - &p2).coeff_linf() < 1e-14);
    }

    #[test]
    fn cutoff_is_idempotent_and_commutes_with_projection() {
        let g = grid(32);
        let v1 = random_band_limited(g, 41, 12, false);
        let v2 = random_band_limited(g, 43, 12, false);
        let jj = friedrichs_cutoff(&friedrichs_cutoff(&v1, 6.0), 6.0);
        assert!((&jj - &friedrichs_cutoff(&v1, 6.0)).coeff_linf() == 0.0);

        let (p1, p2) = helmholtz_project(&v1, &v2);
        let (jp1, jp2) = (friedrichs_cutoff(&p1, 6.0), friedrichs_cutoff(&p2, 6.0));
        let (pj1, pj2) =
            helmholtz_project(&friedrichs_cutoff(&v1, 6.0), &friedrichs_cutoff(&v2, 6.0));
        assert!((&jp1 - &pj1).coeff_linf() < 1e-14);
        assert!((&jp2 - &pj2).coeff_linf() < 1e-14);
    }

    #[test]
    fn cutoff_above_grid_band_is_identity() {
        let g = grid(16);
        let f = random_band_limited(g, 47, 7, false);
        let n_cut = g.max_modulus();
        assert!((&friedrichs_cutoff(&f, n_cut) - &f).coeff_linf() == 0.0);
    }

    #[test]
    fn cutoff_is_orthogonal_projection() {
        let g = grid(32);
        let f = random_band_limited(g, 53, 12, false);
        let low = friedrichs_cutoff(&f, 5.0);
        let high = &f - &low;
        let total = f.l2_norm().powi(2);
        let split = low.l2_norm().powi(2) + high.l2_norm().powi(2);
        assert!((total - split).abs() < 1e-12 * total);
    }

    #[test]
    fn dealias_kills_products_beyond_radius() {
        let g = grid(16); // radius 16/3 ~ 5.33
        let a = PhysicalField::from_fn(g, |x1, _| (3.0 * x1).cos());
        let b = PhysicalField::from_fn(g, |x1, _| (4.0 * x1).cos());
        let mut prod = PhysicalField::zeros(g);
        for (dst, (x, y)) in prod
            .values_mut()
            .iter_mut()
            .zip(a.values().iter().zip(b.values().iter()))
        {
            *dst = x * y;
        }
        let ph = dealias(&prod.to_spectral());
        // cos3 cos4 = (cos7 + cos1)/2; mode 7 dies, mode 1 survives
        assert!(ph.coeff(7, 0).norm() < 1e-15);
        assert!((ph.coeff(1, 0).re - 0.25).abs() < 1e-13);
        // a field inside the radius is untouched, and dealias is idempotent
        let f = random_band_limited(g, 59, 3, false); // |k| <= sqrt(18) < 16/3
        assert!((&dealias(&f) - &f).coeff_linf() == 0.0);
        let df = dealias(&prod.to_spectral());
        assert!((&dealias(&df) - &df).coeff_linf() == 0.0);
    }

    #[test]
    fn parseval_identity() {
        let g = grid(32);
        let f = random_band_limited(g, 61, 10, false);
        let gfield = random_band_limited(g, 67, 10, false);
        let spectral = inner(&f, &gfield);
        let fp = f.to_physical().unwrap();
        let gp = gfield.to_physical().unwrap();
        let physical: f64 = fp
            .values()
            .iter()
            .zip(gp.values().iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (32.0 * 32.0)
            * g.area();
        assert!((spectral - physical).abs() < 1e-12 * spectral.abs().max(1.0));
    }
}
