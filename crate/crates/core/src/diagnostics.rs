//! Functionals along a trajectory and residuals of the exact laws they obey:
//!
//! * `M(t) = e^{-2A(t)} M(0)`
//! * `E' = -2a I`, `K' + 2aK = 4V`, `V' + 2aV = 2P`
//! * `𝓗(u) = e^{2A}E + μ (2(p-1)/(p+1)) ∫₀ᵗ a e^{2A} ‖u‖_{p+1}^{p+1}` is constant.
//!
//! The nonlinear terms carry the sign `μ`, so for the focusing case `μ = -1`
//! `E = ‖∇u‖² - (2/(p+1))‖u‖_{p+1}^{p+1}`, `I = ‖∇u‖² - ‖u‖_{p+1}^{p+1}` and
//! `P = ‖∇u‖² - (N(p-1)/(2(p+1)))‖u‖_{p+1}^{p+1}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::damping::DampingProfile;
use crate::error::{Error, Result};
use crate::grid::{self, Field};
use crate::solver::SimConfig;

/// Column order of the diagnostics CSV.
pub const CSV_HEADERS: [&str; 14] = [
    "t",
    "A_t",
    "mass",
    "energy",
    "I",
    "virial_K",
    "V",
    "P",
    "H_v",
    "H_u",
    "grad_norm",
    "h1_norm",
    "lp1_norm",
    "boundary_mass_fraction",
];

/// Equation parameters needed to interpret a series of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    pub p: f64,
    pub mu: f64,
    pub damping: DampingProfile,
}

impl Model {
    /// `2(p-1)/(p+1)`
    pub fn hamiltonian_coefficient(&self) -> f64 {
        2.0 * (self.p - 1.0) / (self.p + 1.0)
    }
}

impl SimConfig {
    pub fn model(&self) -> Model {
        Model {
            dim: self.dim,
            p: self.p,
            mu: self.mu(),
            damping: self.damping.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "A_t")]
    pub a_t: f64,
    pub mass: f64,
    pub energy: f64,
    #[serde(rename = "I")]
    pub i_functional: f64,
    #[serde(rename = "virial_K")]
    pub virial_k: f64,
    #[serde(rename = "V")]
    pub v_functional: f64,
    #[serde(rename = "P")]
    pub p_functional: f64,
    #[serde(rename = "H_v")]
    pub h_v: f64,
    #[serde(rename = "H_u")]
    pub h_u: f64,
    pub grad_norm: f64,
    pub h1_norm: f64,
    pub lp1_norm: f64,
    pub boundary_mass_fraction: f64,
}

impl DiagnosticsRecord {
    pub fn zero(t: f64) -> Self {
        DiagnosticsRecord {
            t,
            a_t: 0.0,
            mass: 0.0,
            energy: 0.0,
            i_functional: 0.0,
            virial_k: 0.0,
            v_functional: 0.0,
            p_functional: 0.0,
            h_v: 0.0,
            h_u: 0.0,
            grad_norm: 0.0,
            h1_norm: 0.0,
            lp1_norm: 0.0,
            boundary_mass_fraction: 0.0,
        }
    }

    fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.a_t,
            self.mass,
            self.energy,
            self.i_functional,
            self.virial_k,
            self.v_functional,
            self.p_functional,
            self.h_v,
            self.h_u,
            self.grad_norm,
            self.h1_norm,
            self.lp1_norm,
            self.boundary_mass_fraction,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        DiagnosticsRecord {
            t: v[0],
            a_t: v[1],
            mass: v[2],
            energy: v[3],
            i_functional: v[4],
            virial_k: v[5],
            v_functional: v[6],
            p_functional: v[7],
            h_v: v[8],
            h_u: v[9],
            grad_norm: v[10],
            h1_norm: v[11],
            lp1_norm: v[12],
            boundary_mass_fraction: v[13],
        }
    }
}

/// All functionals of `u` at time `t`. `running_integral` is
/// `∫₀ᵗ a(s) e^{2A(s)} ‖u(s)‖_{p+1}^{p+1} ds` as accumulated by the driver.
pub fn compute_record(
    f: &Field,
    t: f64,
    cfg: &SimConfig,
    running_integral: f64,
) -> Result<DiagnosticsRecord> {
    record_for_model(f, t, &cfg.model(), running_integral)
}

pub fn record_for_model(
    f: &Field,
    t: f64,
    model: &Model,
    running_integral: f64,
) -> Result<DiagnosticsRecord> {
    f.check_finite()?;
    if !running_integral.is_finite() || !t.is_finite() {
        return Err(Error::Numeric("non-finite time or running integral".into()));
    }
    let p = model.p;
    let mu = model.mu;
    let n = model.dim as f64;
    let a_t = model.damping.A_of_t(t)?;
    let spec = grid::forward_transform(f);
    let mass = spec.mass();
    let grad_sq = spec.gradient_norm_sq();
    let lp1_pow = f.power_integral(p + 1.0);
    let energy = grad_sq + mu * 2.0 / (p + 1.0) * lp1_pow;
    let i_functional = grad_sq + mu * lp1_pow;
    let p_functional = grad_sq + mu * n * (p - 1.0) / (2.0 * (p + 1.0)) * lp1_pow;
    let k = grid::weighted_variance(f);
    let v = grid::v_functional(f);
    let growth = (2.0 * a_t).exp();
    // v = e^{A}u: ‖∇v‖² = e^{2A}‖∇u‖², e^{(1-p)A}‖v‖^{p+1} = e^{2A}‖u‖^{p+1}
    let h_v = growth * grad_sq + mu * 2.0 / (p + 1.0) * growth * lp1_pow;
    let h_u = growth * energy + mu * model.hamiltonian_coefficient() * running_integral;
    Ok(DiagnosticsRecord {
        t,
        a_t,
        mass,
        energy,
        i_functional,
        virial_k: k.value,
        v_functional: v.value,
        p_functional,
        h_v,
        h_u,
        grad_norm: grad_sq.sqrt(),
        h1_norm: (mass + grad_sq).sqrt(),
        lp1_norm: lp1_pow.powf(1.0 / (p + 1.0)),
        boundary_mass_fraction: k.boundary_mass_fraction,
    })
}

pub fn write_csv<W: Write>(out: W, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut writer = CsvSink::new(out)?;
    for r in records {
        writer.write(r)?;
    }
    writer.flush()
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<DiagnosticsRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADERS {
        return Err(Error::Config(format!(
            "diagnostics CSV headers {:?} do not match {:?}",
            headers.iter().collect::<Vec<_>>(),
            CSV_HEADERS
        )));
    }
    let mut records = Vec::new();
    for (row, line) in reader.records().enumerate() {
        let line = line?;
        let values = line
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(format!("CSV row {}: {e}", row + 2)))?;
        records.push(DiagnosticsRecord::from_values(&values));
    }
    Ok(records)
}

/// Streams records as CSV with 17 significant digits.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_HEADERS)?;
        Ok(CsvSink { writer })
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        self.writer
            .write_record(r.values().iter().map(|v| format!("{v:.16e}")))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer
            .flush()
            .map_err(|e| Error::io("<diagnostics csv>", e))
    }
}

impl<W: Write> crate::solver::Sink for CsvSink<W> {
    fn accept(&mut self, record: &DiagnosticsRecord, _u: &Field) -> Result<()> {
        self.write(record)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityTolerances {
    pub mass: f64,
    pub differential: f64,
    pub hamiltonian: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        IdentityTolerances {
            mass: 1e-9,
            differential: 1e-4,
            hamiltonian: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// `max |e^{2A} M / M₀ - 1|`
    pub mass_id: f64,
    /// `max |E' + 2aI|` by centered differences
    pub energy_id: f64,
    /// `max |K' + 2aK - 4V|`
    pub k_id: f64,
    /// `max |V' + 2aV - 2P|`
    pub v_id: f64,
    /// `max |𝓗(t)/𝓗(0) - 1|`, absolute when `𝓗(0) ≈ 0`
    pub hu_conservation: f64,
    /// Gauged-side law `H_v(t) = E(u₀) - μ(2(p-1)/(p+1))∫ a e^{(1-p)A}‖v‖^{p+1}`
    /// with the integral rebuilt from the records by the trapezoid rule.
    pub hv_id: f64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn identity_report(
    series: &[DiagnosticsRecord],
    model: &Model,
    tol: &IdentityTolerances,
) -> Result<IdentityReport> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "identity checks need at least 3 records, got {}",
            series.len()
        )));
    }
    let first = &series[0];
    let profile = &model.damping;
    let mut mass_id: f64 = 0.0;
    if first.mass > 0.0 {
        for r in series {
            let a = profile.A_of_t(r.t)?;
            mass_id = mass_id.max(((2.0 * a).exp() * r.mass / first.mass - 1.0).abs());
        }
    }

    let (mut energy_id, mut k_id, mut v_id): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for w in series.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let span = next.t - prev.t;
        let a = profile.a_of_t(mid.t)?;
        let de = (next.energy - prev.energy) / span;
        let dk = (next.virial_k - prev.virial_k) / span;
        let dv = (next.v_functional - prev.v_functional) / span;
        energy_id = energy_id.max((de + 2.0 * a * mid.i_functional).abs());
        k_id = k_id.max((dk + 2.0 * a * mid.virial_k - 4.0 * mid.v_functional).abs());
        v_id = v_id.max((dv + 2.0 * a * mid.v_functional - 2.0 * mid.p_functional).abs());
    }

    let h0 = first.h_u;
    let hu_conservation = series
        .iter()
        .map(|r| {
            if h0.abs() < 1e-12 {
                (r.h_u - h0).abs()
            } else {
                (r.h_u / h0 - 1.0).abs()
            }
        })
        .fold(0.0, f64::max);

    let e0 = first.energy;
    let coeff = model.hamiltonian_coefficient();
    let integrand = |r: &DiagnosticsRecord| -> Result<f64> {
        let a = profile.a_of_t(r.t)?;
        Ok(a * (2.0 * r.a_t).exp() * r.lp1_norm.powf(model.p + 1.0))
    };
    let mut acc = 0.0;
    let mut prev_integrand = integrand(first)?;
    let scale = if e0.abs() < 1e-12 { 1.0 } else { e0.abs() };
    let mut hv_id: f64 = (first.h_v - e0).abs() / scale;
    for w in series.windows(2) {
        let f1 = integrand(&w[1])?;
        acc += 0.5 * (w[1].t - w[0].t) * (prev_integrand + f1);
        prev_integrand = f1;
        let rhs = e0 - model.mu * coeff * acc;
        hv_id = hv_id.max((w[1].h_v - rhs).abs() / scale);
    }

    let check = |name, residual: f64, tolerance| IdentityCheck {
        name,
        residual,
        tolerance,
        pass: residual <= tolerance,
    };
    let checks = vec![
        check("mass", mass_id, tol.mass),
        check("energy", energy_id, tol.differential),
        check("virial_k", k_id, tol.differential),
        check("virial_v", v_id, tol.differential),
        check("hamiltonian_u", hu_conservation, tol.hamiltonian),
    ];
    Ok(IdentityReport {
        mass_id,
        energy_id,
        k_id,
        v_id,
        hu_conservation,
        hv_id,
        checks,
    })
}

/// Time weight applied inside a space-time norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWeight {
    None,
    /// Multiply the spatial norm by `e^{rate · t}`.
    Exp(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeNorm {
    /// `(t, ∫₀ᵗ (w(s)‖·‖(s))^θ ds)`
    pub cumulative: Vec<(f64, f64)>,
    /// `(∫₀ᵀ …)^{1/θ}`
    pub norm: f64,
    /// Relative growth of the cumulative integral over the last 20% of the run.
    pub tail_growth: f64,
    /// `tail_growth < 1%`
    pub saturated: bool,
}

/// Running `∫₀ᵀ ‖u(t)‖^θ dt` from sampled spatial norms `(t, ‖u(t)‖)`.
pub fn spacetime_norm(samples: &[(f64, f64)], exponent: f64, weight: TimeWeight) -> Result<SpaceTimeNorm> {
    if !(exponent >= 1.0) {
        return Err(Error::Domain(format!("time exponent must be >= 1, got {exponent}")));
    }
    let weighted = |&(t, v): &(f64, f64)| -> f64 {
        let w = match weight {
            TimeWeight::None => 1.0,
            TimeWeight::Exp(rate) => (rate * t).exp(),
        };
        (w * v).powf(exponent)
    };
    let mut cumulative = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    if let Some(first) = samples.first() {
        cumulative.push((first.0, 0.0));
    }
    for w in samples.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (weighted(&w[0]) + weighted(&w[1]));
        cumulative.push((w[1].0, acc));
    }
    let tail_growth = match (samples.first(), samples.last()) {
        (Some(first), Some(last)) if acc > 0.0 => {
            let cut = last.0 - 0.2 * (last.0 - first.0);
            let before = cumulative
                .iter()
                .rev()
                .find(|(t, _)| *t <= cut)
                .map(|c| c.1)
                .unwrap_or(0.0);
            (acc - before) / acc
        }
        _ => 0.0,
    };
    Ok(SpaceTimeNorm {
        cumulative,
        norm: acc.powf(1.0 / exponent),
        tail_growth,
        saturated: tail_growth < 0.01,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiminfCheck {
    /// Minimum of `I(u(t))` over the trailing half of the series.
    pub min_tail_i: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Required damping budget `A(t_end)` for the liminf check to be meaningful.
pub const LIMINF_MIN_DAMPING: f64 = 3.0;

/// Tests `liminf I(u(t)) <= 0` on the trailing half of the run, with
/// tolerance `1e-3 · ‖u₀‖²_{H¹}`.
pub fn liminf_check(series: &[DiagnosticsRecord]) -> Result<LiminfCheck> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) if series.len() >= 2 => (f, l),
        _ => return Err(Error::InsufficientData("liminf check needs at least 2 records".into())),
    };
    if last.a_t < LIMINF_MIN_DAMPING {
        return Err(Error::InsufficientData(format!(
            "A(t_end) = {} < {LIMINF_MIN_DAMPING}; run too short for the liminf check",
            last.a_t
        )));
    }
    let t_half = first.t + 0.5 * (last.t - first.t);
    let min_tail_i = series
        .iter()
        .filter(|r| r.t >= t_half)
        .map(|r| r.i_functional)
        .fold(f64::INFINITY, f64::min);
    let tolerance = 1e-3 * first.h1_norm * first.h1_norm;
    Ok(LiminfCheck {
        min_tail_i,
        tolerance,
        pass: min_tail_i <= tolerance,
    })
}
