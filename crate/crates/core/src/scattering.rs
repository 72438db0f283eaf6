//! Back-propagated profiles `w(t) = e^{A(t)} e^{-itΔ} u(t)`, their `H¹`
//! Cauchy behaviour, and the decay envelopes of scattering runs.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::damping::{damping_scalars, DampingProfile, DEFAULT_HORIZON};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::grid::{self, Field, SpectralField};
use crate::solver::{Sink, MAX_GAUGE_EXPONENT};

/// Undoes the damped free flow: `ŵ_k = e^{A(t)} e^{i|k|²t} û_k`.
pub fn back_propagate(f: &Field, t: f64, profile: &DampingProfile) -> Result<Field> {
    let a = profile.A_of_t(t)?;
    if a > MAX_GAUGE_EXPONENT {
        return Err(Error::Scaling(a));
    }
    let gain = a.exp();
    let mut spec = grid::forward_transform(f);
    spec.apply_multiplier(|k2| Complex64::from_polar(gain, k2 * t));
    let mut w = grid::inverse_transform(&spec);
    w.time = t;
    Ok(w)
}

/// Stores `(t, w(t))` whenever a record lands on a multiple of `every`.
#[derive(Debug)]
pub struct ScatteringSampler {
    profile: DampingProfile,
    every: f64,
    pub samples: Vec<(f64, Field)>,
}

impl ScatteringSampler {
    pub fn new(profile: DampingProfile, every: f64) -> Self {
        ScatteringSampler {
            profile,
            every,
            samples: Vec::new(),
        }
    }
}

impl Sink for ScatteringSampler {
    fn accept(&mut self, record: &DiagnosticsRecord, u: &Field) -> Result<()> {
        let k = (record.t / self.every).round();
        if (record.t - k * self.every).abs() <= 1e-9 * self.every.max(record.t) {
            let w = back_propagate(u, record.t, &self.profile)?;
            self.samples.push((record.t, w));
        }
        Ok(())
    }
}

/// Exponential fit `d(t) ≈ prefactor · e^{-rate t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub prefactor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyResult {
    pub times: Vec<f64>,
    /// `‖w(tᵢ) - w(tⱼ)‖_{H¹}`
    pub matrix: Vec<Vec<f64>>,
    /// `(tᵢ, ‖w(t_max) - w(tᵢ)‖_{H¹})` for samples after burn-in, excluding `t_max`.
    pub tail_differences: Vec<(f64, f64)>,
    pub final_h1: f64,
    /// Last tail difference over `‖w(t_max)‖_{H¹}`.
    pub relative_last: f64,
    pub monotone_tail: bool,
    pub rate_fit: Option<RateFit>,
    pub pass: bool,
}

/// Relative threshold for the last Cauchy difference.
pub const CAUCHY_TOLERANCE: f64 = 1e-3;

fn h1_distance_sq(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coefficients
        .iter()
        .zip(&b.coefficients)
        .zip(a.grid.k_squared())
        .map(|((x, y), k2)| (1.0 + k2) * (x - y).norm_sqr())
        .sum::<f64>()
        * a.grid.box_volume()
}

/// Pairwise `H¹` differences of back-propagated samples and the tail verdict.
///
/// Samples before `burn_in` are kept in the matrix but excluded from the
/// verdict; at least 4 samples must remain.
pub fn cauchy_test(samples: &[(f64, Field)], burn_in: f64) -> Result<CauchyResult> {
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Domain("Cauchy samples must have increasing times".into()));
    }
    let tail: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].0 >= burn_in).collect();
    if tail.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "Cauchy test needs >= 4 samples after burn-in {burn_in}, got {}",
            tail.len()
        )));
    }
    let spectra: Vec<SpectralField> = samples.iter().map(|(_, w)| grid::forward_transform(w)).collect();
    let n = samples.len();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = h1_distance_sq(&spectra[i], &spectra[j]).sqrt();
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    let last = n - 1;
    let final_h1 = (spectra[last].mass() + spectra[last].gradient_norm_sq()).sqrt();
    let floor = 1e-12 * final_h1.max(f64::MIN_POSITIVE);
    let tail_differences: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&i| i != last)
        .map(|&i| (samples[i].0, matrix[i][last]))
        .collect();

    // monotone over the trailing half of the post-burn-in samples, ignoring roundoff-level values
    let half = &tail_differences[tail_differences.len() / 2..];
    let monotone_tail = half
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 || w[1].1 <= floor);
    let last_diff = tail_differences.last().map(|d| d.1).unwrap_or(0.0);
    let relative_last = if final_h1 > 0.0 { last_diff / final_h1 } else { last_diff };

    let fit_pts: Vec<(f64, f64)> = tail_differences
        .iter()
        .filter(|(_, d)| *d > floor)
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    let rate_fit = linear_fit(&fit_pts).map(|(slope, intercept)| RateFit {
        rate: -slope,
        prefactor: intercept.exp(),
    });

    Ok(CauchyResult {
        times: samples.iter().map(|s| s.0).collect(),
        matrix,
        tail_differences,
        final_h1,
        relative_last,
        monotone_tail,
        rate_fit,
        pass: relative_last < CAUCHY_TOLERANCE && monotone_tail,
    })
}

/// Least-squares `y = slope·x + intercept`; `None` with fewer than 2 points.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub a_lower: f64,
    /// `(t, e^{A(t)} ‖∇u(t)‖)`
    pub weighted_grad: Vec<(f64, f64)>,
    /// `sup_t e^{A(t)} ‖∇u(t)‖` over the samples; the fitted constant of the
    /// decay envelope `‖∇u(t)‖ ≤ C e^{-A(t)}`.
    pub sup_weighted_grad: f64,
    /// `(max - min) / max` of the weighted gradient over the trailing half.
    pub tail_variation: f64,
    pub decay_envelope_ok: bool,
    /// `e^{A(t)} >= e^{a̲ t}(1 - 1e-9)` on every sample.
    pub bound_scatt_ok: bool,
    /// `e^{-a̲ T} ‖u(T)‖_{H¹}` at the last sample.
    pub exp_scat_value: f64,
    /// Minimum of `e^{-a̲ t} ‖u(t)‖_{H¹}` over the trailing half.
    pub exp_scat_tail_min: f64,
    pub epsilon: f64,
    pub exp_scat_ok: bool,
}

pub fn decay_report(
    series: &[DiagnosticsRecord],
    profile: &DampingProfile,
    epsilon: f64,
) -> Result<DecayReport> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InsufficientData("decay report needs records".into())),
    };
    let horizon = DEFAULT_HORIZON.max(last.t);
    let a_lower = damping_scalars(profile, horizon).a_lower;
    let mut weighted_grad = Vec::with_capacity(series.len());
    let mut bound_scatt_ok = true;
    for r in series {
        let a = profile.A_of_t(r.t)?;
        weighted_grad.push((r.t, a.exp() * r.grad_norm));
        bound_scatt_ok &= a >= a_lower * r.t + (1.0 - 1e-9f64).ln();
    }
    let sup_weighted_grad = weighted_grad.iter().map(|w| w.1).fold(0.0, f64::max);
    let t_half = first.t + 0.5 * (last.t - first.t);
    let tail: Vec<&DiagnosticsRecord> = series.iter().filter(|r| r.t >= t_half).collect();
    let tail_w: Vec<f64> = weighted_grad
        .iter()
        .filter(|w| w.0 >= t_half)
        .map(|w| w.1)
        .collect();
    let tail_max = tail_w.iter().copied().fold(0.0, f64::max);
    let tail_min = tail_w.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_variation = if tail_max > 0.0 { (tail_max - tail_min) / tail_max } else { 0.0 };
    let decay_envelope_ok = series
        .iter()
        .all(|r| r.grad_norm <= sup_weighted_grad * (-profile.integral(r.t)).exp() * (1.0 + 1e-12));
    let exp_scat = |r: &DiagnosticsRecord| (-a_lower * r.t).exp() * r.h1_norm;
    let exp_scat_value = exp_scat(last);
    let exp_scat_tail_min = tail.iter().map(|r| exp_scat(r)).fold(f64::INFINITY, f64::min);
    Ok(DecayReport {
        a_lower,
        weighted_grad,
        sup_weighted_grad,
        tail_variation,
        decay_envelope_ok,
        bound_scatt_ok,
        exp_scat_value,
        exp_scat_tail_min,
        epsilon,
        exp_scat_ok: exp_scat_tail_min < epsilon || exp_scat_tail_min == 0.0,
    })
}

/// Collected scattering evidence for one run.
#[derive(Debug, Clone)]
pub struct ScatteringReport {
    pub cauchy: Option<CauchyResult>,
    pub decay: DecayReport,
    /// Latest back-propagated sample, the finite-horizon stand-in for `u⁺`.
    pub u_plus: Option<Field>,
    /// `‖w(t_max) - w(t_prev)‖_{H¹}`, the residual bound reported with `u⁺`.
    pub u_plus_residual: Option<f64>,
    pub verdict: bool,
}

pub fn scattering_report(
    series: &[DiagnosticsRecord],
    samples: &[(f64, Field)],
    profile: &DampingProfile,
    burn_in: f64,
    epsilon: f64,
) -> Result<ScatteringReport> {
    let decay = decay_report(series, profile, epsilon)?;
    let cauchy = if samples.is_empty() {
        None
    } else {
        Some(cauchy_test(samples, burn_in)?)
    };
    let u_plus = samples.last().map(|s| s.1.clone());
    let u_plus_residual = cauchy
        .as_ref()
        .and_then(|c| c.tail_differences.last().map(|d| d.1));
    let verdict = decay.bound_scatt_ok && cauchy.as_ref().is_none_or(|c| c.pass);
    Ok(ScatteringReport {
        cauchy,
        decay,
        u_plus,
        u_plus_residual,
        verdict,
    })
}

impl ScatteringReport {
    /// `key = value` text with `[section]` headers.
    pub fn to_text(&self) -> String {
        let d = &self.decay;
        let mut s = String::new();
        let _ = writeln!(s, "[decay]");
        let _ = writeln!(s, "a_lower = {:.16e}", d.a_lower);
        let _ = writeln!(s, "sup_weighted_grad = {:.16e}", d.sup_weighted_grad);
        let _ = writeln!(s, "tail_variation = {:.16e}", d.tail_variation);
        let _ = writeln!(s, "decay_envelope_ok = {}", d.decay_envelope_ok);
        let _ = writeln!(s, "bound_scatt_ok = {}", d.bound_scatt_ok);
        let _ = writeln!(s, "exp_scat_value = {:.16e}", d.exp_scat_value);
        let _ = writeln!(s, "exp_scat_tail_min = {:.16e}", d.exp_scat_tail_min);
        let _ = writeln!(s, "epsilon = {:.16e}", d.epsilon);
        let _ = writeln!(s, "exp_scat_ok = {}", d.exp_scat_ok);
        if let Some(c) = &self.cauchy {
            let _ = writeln!(s, "\n[cauchy]");
            let _ = writeln!(s, "samples = {}", c.times.len());
            let _ = writeln!(s, "final_h1 = {:.16e}", c.final_h1);
            let _ = writeln!(s, "relative_last = {:.16e}", c.relative_last);
            let _ = writeln!(s, "monotone_tail = {}", c.monotone_tail);
            if let Some(fit) = c.rate_fit {
                let _ = writeln!(s, "rate = {:.16e}", fit.rate);
                let _ = writeln!(s, "prefactor = {:.16e}", fit.prefactor);
            }
            let _ = writeln!(s, "pass = {}", c.pass);
        }
        let _ = writeln!(s, "\n[u_plus]");
        if let Some(u) = &self.u_plus {
            let _ = writeln!(s, "time = {:.16e}", u.time);
            let _ = writeln!(s, "h1_norm = {:.16e}", grid::h1_norm(u));
        }
        if let Some(r) = self.u_plus_residual {
            let _ = writeln!(s, "residual_bound = {r:.16e}");
        }
        let _ = writeln!(s, "\n[verdict]");
        let _ = writeln!(s, "scatters = {}", self.verdict);
        s
    }

    /// Cauchy matrix as CSV with a leading `t` column.
    pub fn cauchy_csv(&self) -> Option<String> {
        let c = self.cauchy.as_ref()?;
        let mut s = String::from("t");
        for t in &c.times {
            let _ = write!(s, ",{t:.16e}");
        }
        s.push('\n');
        for (t, row) in c.times.iter().zip(&c.matrix) {
            let _ = write!(s, "{t:.16e}");
            for v in row {
                let _ = write!(s, ",{v:.16e}");
            }
            s.push('\n');
        }
        Some(s)
    }
}
