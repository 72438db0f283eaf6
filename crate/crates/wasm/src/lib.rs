//! Browser bindings: a 1D damped NLS simulation, damping curves and the
//! Gagliardo-Nirenberg ascent.

use std::sync::Arc;

use dnls_core::damping::{damping_scalars, DampingProfile, DEFAULT_HORIZON};
use dnls_core::diagnostics::compute_record;
use dnls_core::grid::{Field, Grid};
use dnls_core::inequalities::gn_estimate;
use dnls_core::solver::{InitialDataSpec, SimConfig, Stepper};
use wasm_bindgen::prelude::*;

fn js(e: dnls_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn profile(spec: &str) -> Result<DampingProfile, JsError> {
    spec.parse().map_err(js)
}

/// 1D focusing simulation from a Gaussian, advanced frame by frame.
#[wasm_bindgen]
pub struct Simulation {
    cfg: SimConfig,
    stepper: Stepper,
    u: Field,
    mass0: f64,
    x: Vec<f64>,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(damping: &str, p: f64, amplitude: f64, width: f64, points: usize, half_length: f64, dt: f64) -> Result<Simulation, JsError> {
        let mut cfg = SimConfig::new_1d(
            points,
            half_length,
            InitialDataSpec::Gaussian {
                amplitude,
                width,
                center: vec![],
                wave_vector: vec![],
                noise: 0.0,
            },
        );
        cfg.p = p;
        cfg.damping = profile(damping)?;
        cfg.time.dt = dt;
        cfg.validate().map_err(js)?;
        let grid: Arc<Grid> = cfg.build_grid().map_err(js)?;
        let u = cfg.initial_field(&grid).map_err(js)?;
        let x = grid.coords().to_vec();
        Ok(Simulation {
            stepper: Stepper::new(&cfg, grid),
            mass0: u.mass(),
            u,
            cfg,
            x,
        })
    }

    /// Takes `steps` time steps.
    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        for _ in 0..steps {
            self.stepper.step(&mut self.u, self.cfg.time.dt).map_err(js)?;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.u.time
    }

    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// `|u|²` on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.u.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `[t, mass, energy, ‖∇u‖, e^{2A}M/M₀ - 1]`
    pub fn diagnostics(&self) -> Result<Vec<f64>, JsError> {
        let t = self.u.time;
        let r = compute_record(&self.u, t, &self.cfg, 0.0).map_err(js)?;
        let a = self.cfg.damping.A_of_t(t).map_err(js)?;
        Ok(vec![t, r.mass, r.energy, r.grad_norm, (2.0 * a).exp() * r.mass / self.mass0 - 1.0])
    }
}

/// `a(t)` then `A(t)` at `n` uniform times in `[0, t_max]`, concatenated.
#[wasm_bindgen]
pub fn damping_curves(spec: &str, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let prof = profile(spec)?;
    let ts: Vec<f64> = (0..n).map(|i| t_max * i as f64 / (n.max(2) - 1) as f64).collect();
    let mut out = Vec::with_capacity(2 * n);
    for &t in &ts {
        out.push(prof.a_of_t(t).map_err(js)?);
    }
    for &t in &ts {
        out.push(prof.A_of_t(t).map_err(js)?);
    }
    Ok(out)
}

/// `[inf A(t)/t, 1 if A(t) → ∞ else 0]`
#[wasm_bindgen]
pub fn damping_summary(spec: &str) -> Result<Vec<f64>, JsError> {
    let s = damping_scalars(&profile(spec)?, DEFAULT_HORIZON);
    Ok(vec![s.a_lower, if s.divergent { 1.0 } else { 0.0 }])
}

/// 1D sharp constant by ascent. Returns `[K, iterations, profile...]`.
#[wasm_bindgen]
pub fn gn_ascent(p: f64, points: usize, half_length: f64) -> Result<Vec<f64>, JsError> {
    let grid = Grid::shared(1, points, half_length).map_err(js)?;
    let est = gn_estimate(1, p, &grid).map_err(js)?;
    let mut out = vec![est.k, est.iterations as f64];
    out.extend(est.trial_profile.values.iter().map(|z| z.norm()));
    Ok(out)
}
