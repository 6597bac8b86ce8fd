//! Right-hand sides of the convection system in vorticity-streamfunction
//! form, the combined quantity Z that removes the troublesome micro-rotation
//! Laplacian from the vorticity budget, and the exactly solvable k = 0 flows.
//!
//! Prognostic variables: scalar vorticity `Omega = d1 u2 - d2 u1`,
//! micro-rotation `omega`, temperature `theta`, and the spatial mean of the
//! velocity (which the vorticity cannot encode). With `u` recovered from
//! `Omega` the system reads
//!
//!   dOmega/dt = -u.grad(Omega) - 2 kappa lap(omega) + d1 theta
//!   domega/dt = -u.grad(omega) + gamma lap(omega) - 4 kappa omega + 2 kappa Omega
//!   dtheta/dt = -u.grad(theta) + mu lap(theta) + u2
//!   d(mean u)/dt = (0, mean theta)
//!
//! The k = 0 modes of `omega` and `theta` fall out of the same formulas
//! (advection and diffusion are mean free on the torus); tests assert this
//! rather than special-casing it here.

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::ops::{
    dealias_excess, derivative, inner, transport, velocity_from_vorticity, Axis2,
};
use num_complex::Complex;

/// Physical constants. The velocity equation carries no dissipation at all;
/// the dissipative structure lives entirely in `gamma` and `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub kappa: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl Params {
    pub fn new(kappa: f64, gamma: f64, mu: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::Config {
                path: "params.kappa".into(),
                message: format!("kappa must be >= 0, got {kappa}"),
            });
        }
        if !(gamma > 0.0) || !(mu > 0.0) {
            return Err(Error::Config {
                path: "params".into(),
                message: format!(
                    "the well-posedness hypotheses require gamma > 0 and mu > 0, \
                     got gamma = {gamma}, mu = {mu}"
                ),
            });
        }
        Ok(Params { kappa, gamma, mu })
    }
}

/// One simulation instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub omega_big: SpectralField,
    pub omega_small: SpectralField,
    pub theta: SpectralField,
    pub mean_u: [f64; 2],
    pub time: f64,
}

/// Time derivative of a `State`.
#[derive(Debug, Clone)]
pub struct Tendency {
    pub d_omega_big: SpectralField,
    pub d_omega_small: SpectralField,
    pub d_theta: SpectralField,
    pub d_mean_u: [f64; 2],
}

/// Term toggles for test harnesses; production code uses `RhsTerms::default()`
/// which enables everything.
#[derive(Debug, Clone, Copy)]
pub struct RhsTerms {
    pub advection: bool,
    pub micro_coupling: bool,
    pub buoyancy: bool,
    pub thermal_forcing: bool,
}

impl Default for RhsTerms {
    fn default() -> Self {
        RhsTerms {
            advection: true,
            micro_coupling: true,
            buoyancy: true,
            thermal_forcing: true,
        }
    }
}

impl RhsTerms {
    /// Every coupling off: the right-hand side reduces to pure diffusion.
    pub fn none() -> Self {
        RhsTerms {
            advection: false,
            micro_coupling: false,
            buoyancy: false,
            thermal_forcing: false,
        }
    }
}

impl State {
    pub fn new(
        omega_big: SpectralField,
        omega_small: SpectralField,
        theta: SpectralField,
        mean_u: [f64; 2],
        time: f64,
    ) -> Result<Self> {
        if omega_big.grid() != omega_small.grid() || omega_big.grid() != theta.grid() {
            return Err(Error::GridMismatch);
        }
        let state = State { omega_big, omega_small, theta, mean_u, time };
        state.check_valid()?;
        Ok(state)
    }

    pub fn zero(grid: Grid) -> Self {
        State {
            omega_big: SpectralField::zeros(grid),
            omega_small: SpectralField::zeros(grid),
            theta: SpectralField::zeros(grid),
            mean_u: [0.0, 0.0],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.omega_big.grid()
    }

    /// Enforce the two structural invariants: zero-mean vorticity and
    /// frequency support inside the dealias radius.
    pub fn check_valid(&self) -> Result<()> {
        let mean = self.omega_big.mean();
        if mean.abs() > 1e-12 * self.omega_big.coeff_linf().max(1.0) {
            return Err(Error::NonZeroMean { context: "State vorticity", mean });
        }
        for (name, f) in [
            ("omega_big", &self.omega_big),
            ("omega_small", &self.omega_small),
            ("theta", &self.theta),
        ] {
            let excess = dealias_excess(f);
            if excess > 1e-12 * f.coeff_linf().max(1.0) {
                return Err(Error::NotDealiased { field: name, max_excess: excess });
            }
        }
        Ok(())
    }

    /// Reconstructed velocity, divergence-free with the stored mean.
    pub fn velocity(&self) -> Result<(SpectralField, SpectralField)> {
        velocity_from_vorticity(&self.omega_big, self.mean_u)
    }

    pub fn is_finite(&self) -> bool {
        self.omega_big.is_finite()
            && self.omega_small.is_finite()
            && self.theta.is_finite()
            && self.mean_u.iter().all(|v| v.is_finite())
            && self.time.is_finite()
    }

    /// Name of the first non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<&'static str> {
        if !self.omega_big.is_finite() {
            Some("omega_big")
        } else if !self.omega_small.is_finite() {
            Some("omega_small")
        } else if !self.theta.is_finite() {
            Some("theta")
        } else if !self.mean_u.iter().all(|v| v.is_finite()) {
            Some("mean_u")
        } else {
            None
        }
    }
}

/// Everything except the diagonal diffusion of `omega` and `theta`; this is
/// the part a time integrator treats explicitly.
pub fn explicit_rhs(state: &State, p: &Params, terms: &RhsTerms) -> Result<Tendency> {
    state.check_valid()?;
    let grid = state.grid();
    let (u1, u2) = state.velocity()?;

    let mut d_omega_big = SpectralField::zeros(grid);
    let mut d_omega_small = SpectralField::zeros(grid);
    let mut d_theta = SpectralField::zeros(grid);
    let mut d_mean_u = [0.0, 0.0];

    if terms.advection {
        let u1p = u1.to_physical()?;
        let u2p = u2.to_physical()?;
        d_omega_big = transport(&u1p, &u2p, &state.omega_big)?.scaled(-1.0);
        d_omega_small = transport(&u1p, &u2p, &state.omega_small)?.scaled(-1.0);
        d_theta = transport(&u1p, &u2p, &state.theta)?.scaled(-1.0);
    }

    if terms.micro_coupling {
        let kappa = p.kappa;
        // -2 kappa lap(omega) acts as +2 kappa |k|^2 on coefficients
        d_omega_big = &d_omega_big
            + &state
                .omega_small
                .map_modes(|k1, k2, c| c * (2.0 * kappa * (k1 * k1 + k2 * k2)));
        d_omega_small = &d_omega_small
            + &state.omega_small.scaled(-4.0 * kappa)
            + &state.omega_big.scaled(2.0 * kappa);
    }

    if terms.buoyancy {
        d_omega_big = &d_omega_big + &derivative(&state.theta, Axis2::X1, 1);
        d_mean_u[1] = state.theta.mean();
    }

    if terms.thermal_forcing {
        d_theta = &d_theta + &u2;
    }

    Ok(Tendency { d_omega_big, d_omega_small, d_theta, d_mean_u })
}

/// Full tendency of the system, diffusion included.
pub fn rhs(state: &State, p: &Params) -> Result<Tendency> {
    rhs_with_terms(state, p, &RhsTerms::default())
}

/// Full tendency with term toggles (diffusion is always present).
pub fn rhs_with_terms(state: &State, p: &Params, terms: &RhsTerms) -> Result<Tendency> {
    let mut t = explicit_rhs(state, p, terms)?;
    let gamma = p.gamma;
    let mu = p.mu;
    t.d_omega_small = &t.d_omega_small
        + &state
            .omega_small
            .map_modes(|k1, k2, c| c * (-gamma * (k1 * k1 + k2 * k2)));
    t.d_theta = &t.d_theta
        + &state
            .theta
            .map_modes(|k1, k2, c| c * (-mu * (k1 * k1 + k2 * k2)));
    Ok(t)
}

/// Combined quantity `Z = Omega + (2 kappa / gamma) omega`; its evolution is
/// free of the micro-rotation Laplacian.
pub fn compute_z(state: &State, p: &Params) -> SpectralField {
    state
        .omega_big
        .add_scaled(&state.omega_small, 2.0 * p.kappa / p.gamma)
}

/// Closed-form coefficients of the Z source `alpha Z + beta omega + d1 theta`,
/// obtained by substituting Z into the two component equations:
/// `alpha = 4 kappa^2 / gamma`, `beta = -(8 kappa^2 / gamma)(1 + kappa / gamma)`.
pub fn z_source_coefficients(p: &Params) -> (f64, f64) {
    let alpha = 4.0 * p.kappa * p.kappa / p.gamma;
    let beta = -(8.0 * p.kappa * p.kappa / p.gamma) * (1.0 + p.kappa / p.gamma);
    (alpha, beta)
}

/// Transport-free source of Z, assembled structurally from the component
/// tendencies: `rhs_Omega + (2 kappa / gamma) rhs_omega + u.grad(Z)`.
pub fn rhs_z(state: &State, p: &Params) -> Result<SpectralField> {
    let t = rhs(state, p)?;
    let z = compute_z(state, p);
    let (u1, u2) = state.velocity()?;
    let transport_z = transport(&u1.to_physical()?, &u2.to_physical()?, &z)?;
    Ok(&t.d_omega_big.add_scaled(&t.d_omega_small, 2.0 * p.kappa / p.gamma) + &transport_z)
}

/// Tendency of `G = grad_perp(theta)` assembled from its own evolution
/// equation, with the forcing read as `grad_perp(u2)`. Diagnostic cross-check
/// only: the canonical gradient always comes from differentiating `theta`.
pub fn rhs_grad_theta_perp(
    state: &State,
    p: &Params,
) -> Result<(SpectralField, SpectralField)> {
    state.check_valid()?;
    let (u1, u2) = state.velocity()?;
    let u1p = u1.to_physical()?;
    let u2p = u2.to_physical()?;

    let g1 = derivative(&state.theta, Axis2::X2, 1).scaled(-1.0);
    let g2 = derivative(&state.theta, Axis2::X1, 1);
    let g1p = g1.to_physical()?;
    let g2p = g2.to_physical()?;

    let mu = p.mu;
    let diffuse = |f: &SpectralField| f.map_modes(|k1, k2, c| c * (-mu * (k1 * k1 + k2 * k2)));

    // stretching (G.grad)u, formed pseudo-spectrally
    let stretch = |ui: &SpectralField| -> Result<SpectralField> {
        transport(&g1p, &g2p, ui)
    };

    let d_g1 = &(&transport(&u1p, &u2p, &g1)?.scaled(-1.0) + &diffuse(&g1))
        + &(&stretch(&u1)? + &derivative(&u2, Axis2::X2, 1).scaled(-1.0));
    let d_g2 = &(&transport(&u1p, &u2p, &g2)?.scaled(-1.0) + &diffuse(&g2))
        + &(&stretch(&u2)? + &derivative(&u2, Axis2::X1, 1));
    Ok((d_g1, d_g2))
}

/// Exact flow of the k = 0 components over `dt`: `mean_u1` is conserved,
/// `(mean_u2, mean_theta)` evolve by the cosh/sinh rotation of d/dt = (th, u2),
/// and `mean_omega` decays by `exp(-4 kappa dt)`.
pub fn mean_mode_flow(
    mean_u: [f64; 2],
    theta_bar: f64,
    omega_bar: f64,
    p: &Params,
    dt: f64,
) -> ([f64; 2], f64, f64) {
    assert!(dt >= 0.0, "dt must be nonnegative");
    let (c, s) = (dt.cosh(), dt.sinh());
    let u2 = mean_u[1] * c + theta_bar * s;
    let th = mean_u[1] * s + theta_bar * c;
    let om = omega_bar * (-4.0 * p.kappa * dt).exp();
    ([mean_u[0], u2], th, om)
}

/// Instantaneous terms of the L^2 energy identity
/// `d/dt E = -diss_omega - diss_theta - relax_omega + cross_micro + cross_buoyancy`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyRates {
    /// `gamma ||grad omega||^2`
    pub diss_omega: f64,
    /// `mu ||grad theta||^2`
    pub diss_theta: f64,
    /// `4 kappa ||omega||^2`
    pub relax_omega: f64,
    /// `4 kappa <Omega, omega>`
    pub cross_micro: f64,
    /// `2 <u2, theta>`
    pub cross_buoyancy: f64,
}

impl EnergyRates {
    pub fn net(&self) -> f64 {
        self.cross_micro + self.cross_buoyancy - self.diss_omega - self.diss_theta
            - self.relax_omega
    }
}

/// Half the total L^2 energy `(||u||^2 + ||omega||^2 + ||theta||^2) / 2`.
pub fn half_l2_energy(state: &State) -> f64 {
    let grid = state.grid();
    let area = grid.area();
    let n = grid.n();
    let mut u_sq = (state.mean_u[0] * state.mean_u[0] + state.mean_u[1] * state.mean_u[1]) * area;
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let k_sq = k1 * k1 + k2 * k2;
            if k_sq > 0.0 {
                u_sq += state.omega_big.coeffs()[[i, j]].norm_sqr() / k_sq * area;
            }
        }
    }
    0.5 * (u_sq + state.omega_small.l2_norm().powi(2) + state.theta.l2_norm().powi(2))
}

pub fn energy_rates(state: &State, p: &Params) -> EnergyRates {
    let grid = state.grid();
    let area = grid.area();
    let n = grid.n();
    let mut grad_omega_sq = 0.0;
    let mut grad_theta_sq = 0.0;
    let mut cross_micro = 0.0;
    let mut cross_buoyancy = state.mean_u[1] * state.theta.mean() * area;
    for i in 0..n {
        let k1 = grid.wavenumber(i);
        for j in 0..n {
            let k2 = grid.wavenumber(j);
            let k_sq = k1 * k1 + k2 * k2;
            let om = state.omega_small.coeffs()[[i, j]];
            let th = state.theta.coeffs()[[i, j]];
            let w = state.omega_big.coeffs()[[i, j]];
            grad_omega_sq += k_sq * om.norm_sqr();
            grad_theta_sq += k_sq * th.norm_sqr();
            cross_micro += (w * om.conj()).re;
            if k_sq > 0.0 {
                // u2(k) = -i k1 Omega(k) / |k|^2
                let u2 = Complex::new(0.0, -k1 / k_sq) * w;
                cross_buoyancy += (u2 * th.conj()).re;
            }
        }
    }
    EnergyRates {
        diss_omega: p.gamma * grad_omega_sq * area,
        diss_theta: p.mu * grad_theta_sq * area,
        relax_omega: 4.0 * p.kappa * state.omega_small.l2_norm().powi(2),
        cross_micro: 4.0 * p.kappa * cross_micro * area,
        cross_buoyancy: 2.0 * cross_buoyancy,
    }
}

/// `<2 kappa curl(omega), u>` evaluated directly (used to check the exchange
/// identity against `2 kappa <Omega, omega>`).
pub fn micro_coupling_work(state: &State, p: &Params) -> Result<f64> {
    let (u1, u2) = state.velocity()?;
    let c1 = derivative(&state.omega_small, Axis2::X2, 1);
    let c2 = derivative(&state.omega_small, Axis2::X1, 1).scaled(-1.0);
    Ok(2.0 * p.kappa * (inner(&c1, &u1) + inner(&c2, &u2)))
}
