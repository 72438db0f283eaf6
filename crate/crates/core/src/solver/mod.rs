//! Strang split-step Fourier integration of
//! `i u_t + Δu + i a(t) u = μ |u|^{p-1} u` in the direct (`u`) and gauged
//! (`v = e^{A(t)} u`) formulations.

pub mod checkpoint;
mod config;

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;

pub use config::{
    energy_critical_exponent, Formulation, GridSpec, InitialDataSpec, ScatteringSpec, SimConfig,
    TimeSpec, DEFAULT_BLOWUP_THRESHOLD,
};

use crate::damping::DampingProfile;
use crate::diagnostics::{compute_record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::grid::{self, Field, Grid};

/// Largest `A(t)` for which `e^{A(t)}` stays comfortably inside f64 range.
pub const MAX_GAUGE_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeDirection {
    /// `v = e^{A(t)} u`
    UToV,
    /// `u = e^{-A(t)} v`
    VToU,
}

/// Pointwise multiplication by `e^{±A(t)}`.
pub fn gauge_transfer(
    f: &Field,
    t: f64,
    profile: &DampingProfile,
    direction: GaugeDirection,
) -> Result<Field> {
    let a = profile.A_of_t(t)?;
    if a > MAX_GAUGE_EXPONENT {
        return Err(Error::Scaling(a));
    }
    let factor = match direction {
        GaugeDirection::UToV => a.exp(),
        GaugeDirection::VToU => (-a).exp(),
    };
    Ok(Field {
        time: t,
        ..f.scaled(factor)
    })
}

/// Reusable time stepper owning its scratch buffers and the cached free-flow
/// multiplier for the current step size.
pub struct Stepper {
    grid: Arc<Grid>,
    profile: DampingProfile,
    formulation: Formulation,
    p: f64,
    mu: f64,
    nonlinear: bool,
    half_flow: Vec<Complex64>,
    half_flow_dt: f64,
}

/// Per-step by-products available without extra transforms.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    /// `‖∇w‖²` of the evolved state `w` (`u` or `v` depending on formulation).
    pub state_grad_norm_sq: f64,
}

impl Stepper {
    pub fn new(cfg: &SimConfig, grid: Arc<Grid>) -> Self {
        Stepper {
            grid,
            profile: cfg.damping.clone(),
            formulation: cfg.formulation,
            p: cfg.p,
            mu: cfg.mu(),
            nonlinear: cfg.nonlinear,
            half_flow: Vec::new(),
            half_flow_dt: f64::NAN,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn refresh_flow(&mut self, dt: f64) {
        if self.half_flow_dt == dt {
            return;
        }
        self.half_flow = self
            .grid
            .k_squared()
            .iter()
            .map(|k2| Complex64::from_polar(1.0, -k2 * dt / 2.0))
            .collect();
        self.half_flow_dt = dt;
    }

    /// Phase weight multiplying `μ|w|^{p-1}` in the nonlinear substep over `[t0, t1]`.
    ///
    /// Gauged: `∫ e^{(1-p)A(s)} ds`. Direct: the same integral rescaled to the
    /// substep midpoint, `∫ e^{(1-p)(A(s)-A(t_m))} ds`, so that both
    /// formulations rotate by identical phases.
    fn phase_weight(&self, t0: f64, t1: f64, tm: f64) -> Result<f64> {
        let c = 1.0 - self.p;
        match self.formulation {
            Formulation::Direct => self.profile.exp_weight_integral(c, t0, t1, tm),
            Formulation::Gauged => self.profile.exp_weight_integral(c, t0, t1, 0.0),
        }
    }

    /// Advances `state` from `state.time` by `dt` (negative `dt` steps backward).
    pub fn step(&mut self, state: &mut Field, dt: f64) -> Result<StepInfo> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Domain(format!("step size must be finite and nonzero, got {dt}")));
        }
        if *state.grid != *self.grid {
            return Err(Error::Config("state lives on a different grid".into()));
        }
        let t0 = state.time;
        let tm = clamp_time(t0 + 0.5 * dt);
        let t1 = clamp_time(t0 + dt);
        self.refresh_flow(dt);

        let (damp_first, damp_second) = match self.formulation {
            Formulation::Direct => (
                (-self.profile.increment(t0, tm)).exp(),
                (-self.profile.increment(tm, t1)).exp(),
            ),
            Formulation::Gauged => (1.0, 1.0),
        };

        let data = &mut state.values;
        grid::forward_in_place(&self.grid, data);
        for (c, m) in data.iter_mut().zip(&self.half_flow) {
            *c *= m * damp_first;
        }
        grid::inverse_in_place(&self.grid, data);

        if self.nonlinear {
            let weight = self.phase_weight(t0, t1, tm)?;
            let scale = -self.mu * weight;
            let exponent = 0.5 * (self.p - 1.0);
            let cubic = self.p == 3.0;
            for z in data.iter_mut() {
                let r2 = z.norm_sqr();
                let amp = if cubic { r2 } else { r2.powf(exponent) };
                *z *= Complex64::from_polar(1.0, scale * amp);
            }
        }

        grid::forward_in_place(&self.grid, data);
        let mut grad = 0.0;
        for ((c, m), k2) in data
            .iter_mut()
            .zip(&self.half_flow)
            .zip(self.grid.k_squared())
        {
            *c *= m * damp_second;
            grad += k2 * c.norm_sqr();
        }
        grid::inverse_in_place(&self.grid, data);
        state.time = t1;

        if !grad.is_finite() || data.iter().any(|z| !z.is_finite()) {
            return Err(Error::Instability {
                time: t1,
                reason: "non-finite values after step".into(),
            });
        }
        Ok(StepInfo {
            state_grad_norm_sq: grad * self.grid.box_volume(),
        })
    }
}

// Roundoff from repeated addition can leave t a hair below zero when stepping back.
fn clamp_time(t: f64) -> f64 {
    if t < 0.0 && t > -1e-12 {
        0.0
    } else {
        t
    }
}

/// One Strang step of the configured formulation starting from `state` at time `t`.
pub fn step_strang(state: &Field, t: f64, dt: f64, cfg: &SimConfig) -> Result<Field> {
    let mut stepper = Stepper::new(cfg, state.grid.clone());
    let mut next = Field {
        time: t,
        ..state.clone()
    };
    stepper.step(&mut next, dt)?;
    Ok(next)
}

/// Receives diagnostics records (and the physical-space `u`) during a run.
pub trait Sink {
    fn accept(&mut self, record: &DiagnosticsRecord, u: &Field) -> Result<()>;
}

impl Sink for Vec<DiagnosticsRecord> {
    fn accept(&mut self, record: &DiagnosticsRecord, _u: &Field) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUp {
    pub time: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub final_time: f64,
    pub final_record: DiagnosticsRecord,
    pub blow_up: Option<BlowUp>,
    pub wall_time: Duration,
    /// Physical-space `u` at `final_time`.
    pub final_state: Field,
}

/// Tracks `∫₀ᵗ a(s) e^{2A(s)} ‖u(s)‖_{p+1}^{p+1} ds` by the trapezoid rule.
#[derive(Debug, Clone)]
pub struct RunningIntegral {
    value: f64,
    last_t: f64,
    last_integrand: f64,
}

impl RunningIntegral {
    pub fn start(t: f64, integrand: f64) -> Self {
        RunningIntegral {
            value: 0.0,
            last_t: t,
            last_integrand: integrand,
        }
    }

    pub fn advance(&mut self, t: f64, integrand: f64) {
        self.value += 0.5 * (t - self.last_t) * (integrand + self.last_integrand);
        self.last_t = t;
        self.last_integrand = integrand;
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

fn hamiltonian_integrand(cfg: &SimConfig, state: &Field, t: f64) -> Result<f64> {
    let a_big = cfg.damping.A_of_t(t)?;
    let rate = cfg.damping.a_of_t(t)?;
    let lp1 = state.power_integral(cfg.p + 1.0);
    Ok(match cfg.formulation {
        Formulation::Direct => rate * (2.0 * a_big).exp() * lp1,
        // ‖u‖^{p+1} = e^{-(p+1)A} ‖v‖^{p+1}
        Formulation::Gauged => rate * ((1.0 - cfg.p) * a_big).exp() * lp1,
    })
}

fn to_physical(cfg: &SimConfig, state: &Field) -> Result<Field> {
    match cfg.formulation {
        Formulation::Direct => Ok(state.clone()),
        Formulation::Gauged => gauge_transfer(state, state.time, &cfg.damping, GaugeDirection::VToU),
    }
}

/// Runs `cfg` from its configured initial data.
pub fn evolve(cfg: &SimConfig, sinks: &mut [&mut dyn Sink]) -> Result<TrajectorySummary> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let u0 = cfg.initial_field(&grid)?;
    evolve_from(cfg, u0, sinks)
}

/// Runs `cfg` from the given `u₀` (interpreted at `t = 0`).
pub fn evolve_from(
    cfg: &SimConfig,
    u0: Field,
    sinks: &mut [&mut dyn Sink],
) -> Result<TrajectorySummary> {
    let started = Instant::now();
    let n_steps = cfg.n_steps()?;
    let cadence = cfg.cadence_steps()?;
    let dt = cfg.time.dt;
    let mut stepper = Stepper::new(cfg, u0.grid.clone());
    // v(0) = u(0), so the initial state is the same in both formulations.
    let mut state = Field { time: 0.0, ..u0 };
    let mut integral = RunningIntegral::start(0.0, hamiltonian_integrand(cfg, &state, 0.0)?);

    let mut emit = |state: &Field, integral: f64| -> Result<DiagnosticsRecord> {
        let u = to_physical(cfg, state)?;
        let record = compute_record(&u, u.time, cfg, integral)?;
        for sink in sinks.iter_mut() {
            sink.accept(&record, &u)?;
        }
        Ok(record)
    };

    let mut last = emit(&state, 0.0)?;
    let mut blow_up = None;
    let mut steps = 0;
    for n in 1..=n_steps {
        let info = stepper.step(&mut state, dt)?;
        // keep the clock on the lattice n·dt
        state.time = n as f64 * dt;
        integral.advance(state.time, hamiltonian_integrand(cfg, &state, state.time)?);
        steps = n;
        let grad_u = match cfg.formulation {
            Formulation::Direct => info.state_grad_norm_sq.sqrt(),
            Formulation::Gauged => {
                info.state_grad_norm_sq.sqrt() * (-cfg.damping.A_of_t(state.time)?).exp()
            }
        };
        if grad_u > cfg.time.blowup_threshold {
            last = emit(&state, integral.value())?;
            blow_up = Some(BlowUp {
                time: state.time,
                grad_norm: grad_u,
            });
            break;
        }
        if n % cadence == 0 {
            last = emit(&state, integral.value())?;
        }
    }
    let final_state = to_physical(cfg, &state)?;
    Ok(TrajectorySummary {
        steps,
        final_time: state.time,
        final_record: last,
        blow_up,
        wall_time: started.elapsed(),
        final_state,
    })
}
