//! Time integration: integrating-factor Runge-Kutta schemes that solve the
//! stiff diagonal diffusion of `omega` and `theta` exactly through modewise
//! exponential factors, treat everything else explicitly, and advance the
//! k = 0 modes by their exact closed-form flow.
//!
//! Each step also accumulates the time integrals of the energy-identity
//! terms with the scheme's own quadrature weights, so energy budgets close
//! at the integrator's order rather than at sampling-quadrature order.

use crate::dynamics::{
    energy_rates, explicit_rhs, mean_mode_flow, EnergyRates, Params, RhsTerms, State, Tendency,
};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "IFRK2")]
    Ifrk2,
    #[serde(rename = "IFRK4")]
    Ifrk4,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::Ifrk2 => 2,
            Scheme::Ifrk4 => 4,
        }
    }
}

/// Fixed step or advection-limited automatic choice at run start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: DtPolicy,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
}

impl IntegratorConfig {
    pub fn new(dt: DtPolicy, t_end: f64, cfl_safety: f64, scheme: Scheme) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::Config {
                path: "integrator.t_end".into(),
                message: format!("t_end must be > 0, got {t_end}"),
            });
        }
        if !(cfl_safety > 0.0 && cfl_safety <= 1.0) {
            return Err(Error::Config {
                path: "integrator.cfl_safety".into(),
                message: format!("cfl_safety must lie in (0, 1], got {cfl_safety}"),
            });
        }
        if let DtPolicy::Fixed(v) = dt {
            if !(v > 0.0) {
                return Err(Error::Config {
                    path: "integrator.dt".into(),
                    message: format!("dt must be > 0, got {v}"),
                });
            }
        }
        Ok(IntegratorConfig { dt, t_end, cfl_safety, scheme })
    }
}

/// Time-integrated energy terms accumulated over one step (or a span of
/// steps) with the scheme's stage quadrature.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepBudget {
    pub diss_omega: f64,
    pub diss_theta: f64,
    pub relax_omega: f64,
    pub cross_micro: f64,
    pub cross_buoyancy: f64,
}

impl StepBudget {
    pub fn accumulate(&mut self, other: &StepBudget) {
        self.diss_omega += other.diss_omega;
        self.diss_theta += other.diss_theta;
        self.relax_omega += other.relax_omega;
        self.cross_micro += other.cross_micro;
        self.cross_buoyancy += other.cross_buoyancy;
    }

    fn add_rates(&mut self, rates: &EnergyRates, weight: f64) {
        self.diss_omega += weight * rates.diss_omega;
        self.diss_theta += weight * rates.diss_theta;
        self.relax_omega += weight * rates.relax_omega;
        self.cross_micro += weight * rates.cross_micro;
        self.cross_buoyancy += weight * rates.cross_buoyancy;
    }

    /// Net energy input: cross terms minus dissipation and relaxation.
    pub fn net(&self) -> f64 {
        self.cross_micro + self.cross_buoyancy - self.diss_omega - self.diss_theta
            - self.relax_omega
    }
}

/// Modewise integrating factors over an interval `dt`.
struct IfFactors {
    omega: Array2<f64>,
    theta: Array2<f64>,
}

fn factors(grid: Grid, p: &Params, dt: f64) -> IfFactors {
    let n = grid.n();
    let make = |coef: f64| {
        Array2::from_shape_fn((n, n), |(i, j)| {
            let k1 = grid.wavenumber(i);
            let k2 = grid.wavenumber(j);
            (-coef * (k1 * k1 + k2 * k2) * dt).exp()
        })
    };
    IfFactors { omega: make(p.gamma), theta: make(p.mu) }
}

/// `out = base (*) fac_base + sum_i w_i * x_i (*) fac_i`, all elementwise.
fn combine(
    base: &SpectralField,
    fac_base: Option<&Array2<f64>>,
    parts: &[(&SpectralField, Option<&Array2<f64>>, f64)],
) -> SpectralField {
    let grid = base.grid();
    let mut out = base.coeffs().clone();
    if let Some(fac) = fac_base {
        for (c, f) in out.iter_mut().zip(fac.iter()) {
            *c *= *f;
        }
    }
    for (x, fac, w) in parts {
        match fac {
            Some(f) => {
                for ((c, x), f) in out.iter_mut().zip(x.coeffs().iter()).zip(f.iter()) {
                    *c += x * *f * *w;
                }
            }
            None => {
                for (c, x) in out.iter_mut().zip(x.coeffs().iter()) {
                    *c += x * *w;
                }
            }
        }
    }
    SpectralField::from_coeffs(grid, out).expect("shape preserved")
}

/// Build a stage state: RK-combined fluctuations plus exact k = 0 flow at
/// the stage time offset `c_dt` from the base state.
#[allow(clippy::too_many_arguments)]
fn make_stage(
    base: &State,
    p: &Params,
    c_dt: f64,
    omega_big: SpectralField,
    omega_small: SpectralField,
    theta: SpectralField,
) -> State {
    let (mean_u, theta_bar, omega_bar) = mean_mode_flow(
        base.mean_u,
        base.theta.mean(),
        base.omega_small.mean(),
        p,
        c_dt,
    );
    let mut state = State {
        omega_big,
        omega_small,
        theta,
        mean_u,
        time: base.time + c_dt,
    };
    state.omega_big.set_coeff(0, 0, Complex::new(0.0, 0.0));
    state.omega_small.set_coeff(0, 0, Complex::new(theta_bar * 0.0 + omega_bar, 0.0));
    state.theta.set_coeff(0, 0, Complex::new(theta_bar, 0.0));
    state
}

fn check_finite(state: &State) -> Result<()> {
    if let Some(field) = state.first_non_finite() {
        return Err(Error::IntegrationFailure {
            time: state.time,
            field: field.to_string(),
        });
    }
    Ok(())
}

/// One integrating-factor RK step with full physics.
pub fn step(state: &State, dt: f64, p: &Params, scheme: Scheme) -> Result<(State, StepBudget)> {
    step_with_terms(state, dt, p, scheme, &RhsTerms::default())
}

/// One step with term toggles (test harness entry point).
pub fn step_with_terms(
    state: &State,
    dt: f64,
    p: &Params,
    scheme: Scheme,
    terms: &RhsTerms,
) -> Result<(State, StepBudget)> {
    assert!(dt > 0.0, "dt must be positive");
    let grid = state.grid();
    let out = match scheme {
        Scheme::Ifrk2 => {
            let e_full = factors(grid, p, dt);
            let mut budget = StepBudget::default();

            let n1 = explicit_rhs(state, p, terms)?;
            budget.add_rates(&energy_rates(state, p), dt / 2.0);

            let y2 = make_stage(
                state,
                p,
                dt,
                combine(&state.omega_big, None, &[(&n1.d_omega_big, None, dt)]),
                combine(
                    &state.omega_small,
                    Some(&e_full.omega),
                    &[(&n1.d_omega_small, Some(&e_full.omega), dt)],
                ),
                combine(
                    &state.theta,
                    Some(&e_full.theta),
                    &[(&n1.d_theta, Some(&e_full.theta), dt)],
                ),
            );
            let n2 = explicit_rhs(&y2, p, terms)?;
            budget.add_rates(&energy_rates(&y2, p), dt / 2.0);

            let half = dt / 2.0;
            let next = make_stage(
                state,
                p,
                dt,
                combine(
                    &state.omega_big,
                    None,
                    &[(&n1.d_omega_big, None, half), (&n2.d_omega_big, None, half)],
                ),
                combine(
                    &state.omega_small,
                    Some(&e_full.omega),
                    &[
                        (&n1.d_omega_small, Some(&e_full.omega), half),
                        (&n2.d_omega_small, None, half),
                    ],
                ),
                combine(
                    &state.theta,
                    Some(&e_full.theta),
                    &[
                        (&n1.d_theta, Some(&e_full.theta), half),
                        (&n2.d_theta, None, half),
                    ],
                ),
            );
            (next, budget)
        }
        Scheme::Ifrk4 => {
            let e_half = factors(grid, p, dt / 2.0);
            let e_full = factors(grid, p, dt);
            let mut budget = StepBudget::default();
            let half = dt / 2.0;
            let sixth = dt / 6.0;
            let third = dt / 3.0;

            let n1 = explicit_rhs(state, p, terms)?;
            budget.add_rates(&energy_rates(state, p), sixth);

            // y2 = E(h/2) (y + h/2 N1)
            let y2 = make_stage(
                state,
                p,
                half,
                combine(&state.omega_big, None, &[(&n1.d_omega_big, None, half)]),
                combine(
                    &state.omega_small,
                    Some(&e_half.omega),
                    &[(&n1.d_omega_small, Some(&e_half.omega), half)],
                ),
                combine(
                    &state.theta,
                    Some(&e_half.theta),
                    &[(&n1.d_theta, Some(&e_half.theta), half)],
                ),
            );
            let n2 = explicit_rhs(&y2, p, terms)?;
            budget.add_rates(&energy_rates(&y2, p), third);

            // y3 = E(h/2) y + h/2 N2
            let y3 = make_stage(
                state,
                p,
                half,
                combine(&state.omega_big, None, &[(&n2.d_omega_big, None, half)]),
                combine(
                    &state.omega_small,
                    Some(&e_half.omega),
                    &[(&n2.d_omega_small, None, half)],
                ),
                combine(
                    &state.theta,
                    Some(&e_half.theta),
                    &[(&n2.d_theta, None, half)],
                ),
            );
            let n3 = explicit_rhs(&y3, p, terms)?;
            budget.add_rates(&energy_rates(&y3, p), third);

            // y4 = E(h) y + h E(h/2) N3
            let y4 = make_stage(
                state,
                p,
                dt,
                combine(&state.omega_big, None, &[(&n3.d_omega_big, None, dt)]),
                combine(
                    &state.omega_small,
                    Some(&e_full.omega),
                    &[(&n3.d_omega_small, Some(&e_half.omega), dt)],
                ),
                combine(
                    &state.theta,
                    Some(&e_full.theta),
                    &[(&n3.d_theta, Some(&e_half.theta), dt)],
                ),
            );
            let n4 = explicit_rhs(&y4, p, terms)?;
            budget.add_rates(&energy_rates(&y4, p), sixth);

            // y' = E(h) y + h/6 [E(h) N1 + 2 E(h/2) (N2 + N3) + N4]
            let n23_omega_big = &n2.d_omega_big + &n3.d_omega_big;
            let n23_omega_small = &n2.d_omega_small + &n3.d_omega_small;
            let n23_theta = &n2.d_theta + &n3.d_theta;
            let next = make_stage(
                state,
                p,
                dt,
                combine(
                    &state.omega_big,
                    None,
                    &[
                        (&n1.d_omega_big, None, sixth),
                        (&n23_omega_big, None, third),
                        (&n4.d_omega_big, None, sixth),
                    ],
                ),
                combine(
                    &state.omega_small,
                    Some(&e_full.omega),
                    &[
                        (&n1.d_omega_small, Some(&e_full.omega), sixth),
                        (&n23_omega_small, Some(&e_half.omega), third),
                        (&n4.d_omega_small, None, sixth),
                    ],
                ),
                combine(
                    &state.theta,
                    Some(&e_full.theta),
                    &[
                        (&n1.d_theta, Some(&e_full.theta), sixth),
                        (&n23_theta, Some(&e_half.theta), third),
                        (&n4.d_theta, None, sixth),
                    ],
                ),
            );
            (next, budget)
        }
    };
    check_finite(&out.0)?;
    Ok(out)
}

/// Advection-limited step size:
/// `cfl_safety * min(spacing / max(1, ||u||_inf), 1 / (1 + 4 kappa))`.
/// The exact diffusion factors impose no constraint.
pub fn auto_dt(state: &State, p: &Params, cfg: &IntegratorConfig) -> Result<f64> {
    let (u1, u2) = state.velocity()?;
    let u1p = u1.to_physical()?;
    let u2p = u2.to_physical()?;
    let u_max = u1p
        .values()
        .iter()
        .zip(u2p.values().iter())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .fold(0.0f64, f64::max);
    let advective = state.grid().spacing() / u_max.max(1.0);
    let relax = 1.0 / (1.0 + 4.0 * p.kappa);
    Ok(cfg.cfl_safety * advective.min(relax))
}

/// Integrate from `initial.time` to `cfg.t_end`, invoking `on_sample` on the
/// initial state, every `cadence` steps, and on the final state. The sample
/// callback receives the accumulated stage-quadrature budget since the
/// previous sample. Deterministic for fixed inputs.
pub fn run<F>(
    initial: State,
    p: &Params,
    cfg: &IntegratorConfig,
    cadence: u64,
    mut on_sample: F,
) -> Result<State>
where
    F: FnMut(&State, u64, &StepBudget),
{
    let cadence = cadence.max(1);
    let dt = match cfg.dt {
        DtPolicy::Fixed(v) => v,
        DtPolicy::Auto => auto_dt(&initial, p, cfg)?,
    };
    let mut state = initial;
    let mut span = StepBudget::default();
    on_sample(&state, 0, &span);
    if cfg.t_end <= state.time {
        return Ok(state);
    }
    let mut step_idx: u64 = 0;
    let eps = 1e-12 * cfg.t_end.abs().max(1.0);
    let mut sampled_at = 0u64;
    while state.time < cfg.t_end - eps {
        let dt_step = dt.min(cfg.t_end - state.time);
        let (next, budget) = step(&state, dt_step, p, cfg.scheme)?;
        state = next;
        span.accumulate(&budget);
        step_idx += 1;
        let done = state.time >= cfg.t_end - eps;
        if step_idx % cadence == 0 || done {
            on_sample(&state, step_idx, &span);
            span = StepBudget::default();
            sampled_at = step_idx;
        }
    }
    let _ = sampled_at;
    Ok(state)
}

/// Collect sampled states of a run (plus per-span budgets).
pub fn run_collect(
    initial: State,
    p: &Params,
    cfg: &IntegratorConfig,
    cadence: u64,
) -> Result<(State, Vec<(State, u64, StepBudget)>)> {
    let mut samples = Vec::new();
    let final_state = run(initial, p, cfg, cadence, |s, idx, b| {
        samples.push((s.clone(), idx, *b));
    })?;
    Ok((final_state, samples))
}
