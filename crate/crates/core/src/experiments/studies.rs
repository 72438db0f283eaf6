use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::damping::DampingProfile;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scattering::linear_fit;
use crate::solver::{evolve, InitialDataSpec, SimConfig};

/// Accepted window for a fitted Strang order.
pub const ORDER_WINDOW: (f64, f64) = (1.9, 2.1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// `√2η sech(ηx) e^{iη²t}`
    ExactSoliton,
    /// Differences between successive refinements.
    SelfConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub reference: Reference,
    pub dts: Vec<f64>,
    /// `L²` errors; for self-convergence entry `i` is `‖u_{dtᵢ} - u_{dtᵢ₊₁}‖`.
    pub errors: Vec<f64>,
    pub order: f64,
    pub pass: bool,
}

impl ConvergenceReport {
    pub fn to_text(&self) -> String {
        let mut s = String::from("[convergence]\n");
        let _ = writeln!(s, "reference = {}", match self.reference {
            Reference::ExactSoliton => "exact_soliton",
            Reference::SelfConvergence => "self_convergence",
        });
        let _ = writeln!(s, "order = {:.6}", self.order);
        let _ = writeln!(s, "pass = {}", self.pass);
        for (dt, e) in self.dts.iter().zip(&self.errors) {
            let _ = writeln!(s, "error_dt_{dt:e} = {e:.16e}");
        }
        s
    }
}

fn exact_soliton_available(cfg: &SimConfig) -> Option<f64> {
    match cfg.initial {
        InitialDataSpec::Soliton { eta }
            if cfg.damping.is_zero() && cfg.mu == -1 && cfg.nonlinear && cfg.dim == 1 && cfg.p == 3.0 =>
        {
            Some(eta)
        }
        _ => None,
    }
}

pub fn soliton(grid: &std::sync::Arc<Grid>, eta: f64, t: f64) -> Field {
    let mut f = Field::from_fn(grid.clone(), |x| {
        Complex64::from_polar(2f64.sqrt() * eta / (eta * x[0]).cosh(), eta * eta * t)
    });
    f.time = t;
    f
}

/// Final-time errors over `dts` and the least-squares slope of
/// `log error` against `log dt`.
pub fn convergence_study(cfg: &SimConfig, dts: &[f64]) -> Result<ConvergenceReport> {
    let exact = exact_soliton_available(cfg);
    let needed = if exact.is_some() { 2 } else { 3 };
    if dts.len() < needed {
        return Err(Error::InsufficientData(format!("convergence study needs at least {needed} dts")));
    }
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let mut finals = Vec::with_capacity(dts.len());
    for &dt in &dts {
        let mut c = cfg.clone();
        c.time.dt = dt;
        c.time.cadence = Some(c.time.t_end);
        let out = evolve(&c, &mut [])?;
        if out.blow_up.is_some() {
            return Err(Error::Numeric(format!("blow-up guard tripped at dt = {dt}")));
        }
        finals.push(out.final_state);
    }
    let (reference, errors, fit_dts) = match exact {
        Some(eta) => {
            let ex = soliton(&finals[0].grid, eta, cfg.time.t_end);
            let errs = finals
                .iter()
                .map(|u| u.difference(&ex).map(|d| d.mass().sqrt()))
                .collect::<Result<Vec<_>>>()?;
            (Reference::ExactSoliton, errs, dts.clone())
        }
        None => {
            let errs = finals
                .windows(2)
                .map(|w| w[0].difference(&w[1]).map(|d| d.mass().sqrt()))
                .collect::<Result<Vec<_>>>()?;
            (Reference::SelfConvergence, errs, dts[..dts.len() - 1].to_vec())
        }
    };
    let pts: Vec<(f64, f64)> = fit_dts
        .iter()
        .zip(&errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(dt, e)| (dt.ln(), e.ln()))
        .collect();
    let order = linear_fit(&pts).map_or(f64::NAN, |(slope, _)| slope);
    Ok(ConvergenceReport {
        reference,
        dts: fit_dts,
        errors,
        order,
        pass: order >= ORDER_WINDOW.0 && order <= ORDER_WINDOW.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupStudy {
    pub dts: Vec<f64>,
    /// Time the guard tripped at each `dt`, if it did.
    pub times: Vec<Option<f64>>,
    /// Every refinement trips the guard and the two finest times agree to 5%.
    pub confirmed: bool,
}

impl BlowupStudy {
    pub fn to_text(&self) -> String {
        let mut s = String::from("[blow_up]\n");
        for (dt, t) in self.dts.iter().zip(&self.times) {
            match t {
                Some(t) => {
                    let _ = writeln!(s, "time_dt_{dt:e} = {t:.16e}");
                }
                None => {
                    let _ = writeln!(s, "time_dt_{dt:e} = none");
                }
            }
        }
        let _ = writeln!(s, "confirmed = {}", self.confirmed);
        s
    }
}

/// Reruns `cfg` at `dt/2, …, dt/2^levels` and compares blow-up times.
pub fn blowup_refinement(cfg: &SimConfig, levels: usize) -> Result<BlowupStudy> {
    let mut dts = Vec::with_capacity(levels + 1);
    let mut times = Vec::with_capacity(levels + 1);
    for j in 0..=levels {
        let mut c = cfg.clone();
        c.time.dt = cfg.time.dt / (1u64 << j) as f64;
        let t = match evolve(&c, &mut []) {
            Ok(out) => out.blow_up.map(|b| b.time),
            // a non-finite state past the guard is still a blow-up signal
            Err(Error::Instability { time, .. }) => Some(time),
            Err(e) => return Err(e),
        };
        dts.push(c.time.dt);
        times.push(t);
    }
    let confirmed = match (times[times.len() - 2], times[times.len() - 1]) {
        (Some(a), Some(b)) => times.iter().all(Option::is_some) && (a - b).abs() <= 0.05 * b.max(dts[0]),
        _ => false,
    };
    Ok(BlowupStudy { dts, times, confirmed })
}

/// `A(t) <= 50` horizon for a profile, searched on a doubling grid; used to
/// bound linear-regime exactness checks.
pub fn damping_horizon(profile: &DampingProfile, budget: f64, t_max: f64) -> Result<f64> {
    let mut t = t_max;
    while t > 1e-6 && profile.A_of_t(t)? > budget {
        t /= 2.0;
    }
    Ok(t)
}
