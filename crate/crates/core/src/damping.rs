//! Damping profiles `a(t)`, their antiderivatives `A(t) = ∫₀ᵗ a`, and the
//! scalars derived from them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Absolute tolerance for quadrature-backed antiderivatives.
pub const ANTIDERIVATIVE_TOL: f64 = 1e-10;

/// Default horizon for the infimum of `A(t)/t`.
pub const DEFAULT_HORIZON: f64 = 1e4;

const INFIMUM_SAMPLES: usize = 10_000;
const INFIMUM_START: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DampingProfile {
    Zero,
    Constant { a: f64 },
    /// `a / (1 + t)^θ`
    PowerLaw { a: f64, theta: f64 },
    /// `a₀ (1 + sin t)`
    Oscillating { a0: f64 },
    /// Piecewise-linear through `(t, a)` samples, held constant past the last sample.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
        source: Option<String>,
    },
}

/// Derived scalars: `a_lower = inf_{t>0} A(t)/t` and whether `∫₀^∞ a = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingScalars {
    pub a_lower: f64,
    pub divergent: bool,
    /// True when `divergent` was extrapolated from finite samples.
    pub heuristic: bool,
    pub horizon_used: f64,
}

impl DampingProfile {
    pub fn constant(a: f64) -> Result<Self> {
        Self::Constant { a }.validated()
    }

    pub fn power_law(a: f64, theta: f64) -> Result<Self> {
        Self::PowerLaw { a, theta }.validated()
    }

    pub fn oscillating(a0: f64) -> Result<Self> {
        Self::Oscillating { a0 }.validated()
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::Tabulated {
            times,
            values,
            source: None,
        }
        .validated()
    }

    /// Reads a two-column `t,a` CSV (header optional).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, row) in reader.records().enumerate() {
            let row = row?;
            if row.len() < 2 {
                return Err(Error::Config(format!(
                    "{}: row {} needs two columns",
                    path.display(),
                    line + 1
                )));
            }
            match (row[0].parse::<f64>(), row[1].parse::<f64>()) {
                (Ok(t), Ok(a)) => {
                    times.push(t);
                    values.push(a);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "{}: row {} is not numeric",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Self::Tabulated {
            times,
            values,
            source: Some(path.display().to_string()),
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        let bad = |what: &str| Err(Error::Config(format!("damping profile: {what}")));
        match &self {
            Self::Zero => {}
            Self::Constant { a } if !(a.is_finite() && *a >= 0.0) => return bad("a must be >= 0"),
            Self::PowerLaw { a, theta }
                if !(a.is_finite() && *a >= 0.0 && theta.is_finite() && *theta >= 0.0) =>
            {
                return bad("power_law needs a >= 0 and theta >= 0")
            }
            Self::Oscillating { a0 } if !(a0.is_finite() && *a0 >= 0.0) => {
                return bad("a0 must be >= 0")
            }
            Self::Tabulated { times, values, .. } => {
                if times.len() != values.len() || times.len() < 2 {
                    return bad("tabulated profile needs at least two (t, a) samples");
                }
                if times[0] != 0.0 {
                    return bad("tabulated profile must start at t = 0");
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("tabulated times must be strictly increasing");
                }
                if values.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
                    return bad("tabulated values must be finite and >= 0");
                }
            }
            _ => {}
        }
        Ok(self)
    }

    /// `a(t)` for `t >= 0`.
    pub fn a_of_t(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.rate(t))
    }

    /// `A(t) = ∫₀ᵗ a(s) ds` for `t >= 0`; `t = ∞` gives the total integral.
    #[allow(non_snake_case)]
    pub fn A_of_t(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.integral(t))
    }

    pub(crate) fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { a } => *a,
            Self::PowerLaw { a, theta } => a / (1.0 + t).powf(*theta),
            Self::Oscillating { a0 } => a0 * (1.0 + t.sin()),
            Self::Tabulated { times, values, .. } => interpolate(times, values, t),
        }
    }

    pub(crate) fn integral(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { a } if t.is_infinite() => {
                if *a > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Self::Constant { a } => a * t,
            Self::PowerLaw { a, .. } if *a == 0.0 => 0.0,
            Self::PowerLaw { a, theta } if (*theta - 1.0).abs() < 1e-12 => a * t.ln_1p(),
            Self::PowerLaw { a, theta } => {
                if t.is_infinite() {
                    if *theta > 1.0 {
                        a / (theta - 1.0)
                    } else {
                        f64::INFINITY
                    }
                } else {
                    a * ((1.0 + t).powf(1.0 - theta) - 1.0) / (1.0 - theta)
                }
            }
            Self::Oscillating { a0 } if t.is_infinite() => {
                if *a0 > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Self::Oscillating { a0 } => a0 * (t + 1.0 - t.cos()),
            Self::Tabulated { times, values, .. } => tabulated_integral(times, values, t),
        }
    }

    /// `A(t₁) - A(t₀)`, computed without cancellation for the closed forms.
    pub(crate) fn increment(&self, t0: f64, t1: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { a } => a * (t1 - t0),
            _ => self.integral(t1) - self.integral(t0),
        }
    }

    /// `∫_{t₀}^{t₁} exp(c (A(s) - A(t_ref))) ds`.
    ///
    /// Closed form for constant and zero damping; Gauss–Kronrod otherwise.
    pub fn exp_weight_integral(&self, c: f64, t0: f64, t1: f64, t_ref: f64) -> Result<f64> {
        match self {
            Self::Zero => return Ok(t1 - t0),
            Self::Constant { a } => {
                let rate = c * a;
                if rate == 0.0 {
                    return Ok(t1 - t0);
                }
                let upper = (rate * (t1 - t_ref)).exp_m1();
                let lower = (rate * (t0 - t_ref)).exp_m1();
                return Ok((upper - lower) / rate);
            }
            Self::PowerLaw { a, .. } | Self::Oscillating { a0: a } if *a == 0.0 => {
                return Ok(t1 - t0)
            }
            _ => {}
        }
        let base = self.integral(t_ref);
        let tol = 1e-12 * (t1 - t0).abs().max(f64::MIN_POSITIVE);
        quadrature::integrate(|s| (c * (self.integral(s) - base)).exp(), t0, t1, tol)
    }

    /// Whether the profile is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { a } | Self::Oscillating { a0: a } | Self::PowerLaw { a, .. } => {
                *a == 0.0
            }
            Self::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// `lim_{t→∞} A(t)/t` when the kind determines it.
    fn asymptotic_mean(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { a } => *a,
            Self::PowerLaw { a, theta } => {
                if *theta == 0.0 {
                    *a
                } else {
                    0.0
                }
            }
            Self::Oscillating { a0 } => *a0,
            Self::Tabulated { values, .. } => *values.last().unwrap_or(&0.0),
        }
    }

    fn divergence(&self) -> (bool, bool) {
        match self {
            Self::Zero => (false, false),
            Self::Constant { a } => (*a > 0.0, false),
            Self::PowerLaw { a, theta } => (*a > 0.0 && *theta <= 1.0, false),
            Self::Oscillating { a0 } => (*a0 > 0.0, false),
            Self::Tabulated { times, values, .. } => (tabulated_trend_diverges(times, values), true),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("damping evaluated at t = {t} < 0")));
    }
    Ok(())
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let i = times.partition_point(|&s| s <= t).saturating_sub(1);
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] + w * (values[i + 1] - values[i])
}

// Exact for the piecewise-linear interpolant.
fn tabulated_integral(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t.is_infinite() {
        return if values[last] > 0.0 {
            f64::INFINITY
        } else {
            tabulated_integral(times, values, times[last])
        };
    }
    let mut total = 0.0;
    for i in 0..last {
        if t <= times[i] {
            return total;
        }
        let hi = t.min(times[i + 1]);
        let a_hi = interpolate(times, values, hi);
        total += 0.5 * (values[i] + a_hi) * (hi - times[i]);
    }
    if t > times[last] {
        total += values[last] * (t - times[last]);
    }
    total
}

// Fits a(t) ~ t^{-s} over the last decade of samples; ∫ a diverges when s <= 1.
fn tabulated_trend_diverges(times: &[f64], values: &[f64]) -> bool {
    let t_end = *times.last().unwrap();
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, a)| **t >= t_end / 10.0 && **t > 0.0 && **a > 0.0)
        .map(|(t, a)| (t.ln(), a.ln()))
        .collect();
    if pts.len() < 2 {
        return *values.last().unwrap() > 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return true;
    }
    -(sxy / sxx) <= 1.0
}

/// `a_lower` as the minimum of `A(t)/t` over a log-spaced grid on
/// `(1e-6, horizon]` combined with the kind's `t → ∞` limit.
pub fn damping_scalars(profile: &DampingProfile, horizon: f64) -> DampingScalars {
    let horizon = if horizon.is_finite() && horizon > INFIMUM_START {
        horizon
    } else {
        DEFAULT_HORIZON
    };
    let log_lo = INFIMUM_START.ln();
    let step = (horizon.ln() - log_lo) / (INFIMUM_SAMPLES - 1) as f64;
    let grid_min = (0..INFIMUM_SAMPLES)
        .map(|i| {
            let t = (log_lo + step * i as f64).exp();
            profile.integral(t) / t
        })
        .fold(f64::INFINITY, f64::min);
    let a_lower = grid_min.min(profile.asymptotic_mean()).max(0.0);
    let (mut divergent, heuristic) = profile.divergence();
    if !heuristic {
        divergent |= a_lower > 0.0;
    }
    DampingScalars {
        a_lower,
        divergent,
        heuristic,
        horizon_used: horizon,
    }
}

impl fmt::Display for DampingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "zero"),
            Self::Constant { a } => write!(f, "constant:a={a}"),
            Self::PowerLaw { a, theta } => write!(f, "power_law:a={a},theta={theta}"),
            Self::Oscillating { a0 } => write!(f, "oscillating:a0={a0}"),
            Self::Tabulated {
                source: Some(path), ..
            } => write!(f, "tabulated:path={path}"),
            Self::Tabulated { times, .. } => write!(f, "tabulated:<{} samples>", times.len()),
        }
    }
}

impl FromStr for DampingProfile {
    type Err = Error;

    /// Parses `zero`, `constant:a=0.5`, `power_law:a=1,theta=2`,
    /// `oscillating:a0=0.3` or `tabulated:path=<csv>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for item in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::Config(format!("damping parameter `{item}` is not key=value"))
            })?;
            params.push((k.trim(), v.trim()));
        }
        let take = |name: &str| -> Result<f64> {
            let raw = params
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Config(format!("damping `{kind}` needs `{name}`")))?;
            raw.parse()
                .map_err(|_| Error::Config(format!("damping `{name}` = `{raw}` is not a number")))
        };
        let allow = |names: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !names.contains(k)) {
                Some((k, _)) => Err(Error::Config(format!(
                    "unknown damping parameter `{k}` for `{kind}`"
                ))),
                None => Ok(()),
            }
        };
        match kind {
            "zero" => {
                allow(&[])?;
                Ok(Self::Zero)
            }
            "constant" => {
                allow(&["a"])?;
                Self::constant(take("a")?)
            }
            "power_law" => {
                allow(&["a", "theta"])?;
                Self::power_law(take("a")?, take("theta")?)
            }
            "oscillating" => {
                allow(&["a0"])?;
                Self::oscillating(take("a0")?)
            }
            "tabulated" => {
                allow(&["path"])?;
                let path = params
                    .iter()
                    .find(|(k, _)| *k == "path")
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::Config("tabulated damping needs `path`".into()))?;
                Self::from_csv(path)
            }
            other => Err(Error::Config(format!("unknown damping kind `{other}`"))),
        }
    }
}

impl TryFrom<String> for DampingProfile {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DampingProfile> for String {
    fn from(p: DampingProfile) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Composite Simpson on a fine grid, independent of the closed forms.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    fn builtins() -> Vec<DampingProfile> {
        vec![
            DampingProfile::Zero,
            DampingProfile::constant(0.5).unwrap(),
            DampingProfile::power_law(1.0, 2.0).unwrap(),
            DampingProfile::power_law(0.7, 1.0).unwrap(),
            DampingProfile::power_law(0.7, 0.5).unwrap(),
            DampingProfile::oscillating(0.3).unwrap(),
            DampingProfile::tabulated(vec![0.0, 1.0, 2.5, 4.0], vec![0.2, 0.8, 0.1, 0.4]).unwrap(),
        ]
    }

    #[test]
    fn rates_at_sample_points() {
        assert_eq!(DampingProfile::constant(0.5).unwrap().a_of_t(7.0).unwrap(), 0.5);
        let pl = DampingProfile::power_law(1.0, 2.0).unwrap();
        assert!((pl.a_of_t(1.0).unwrap() - 0.25).abs() < 1e-15);
        let osc = DampingProfile::oscillating(0.3).unwrap();
        assert!((osc.a_of_t(PI / 2.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(osc.a_of_t(-1.0), Err(Error::Domain(_))));
        assert!(matches!(osc.A_of_t(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn antiderivative_examples() {
        let c = DampingProfile::constant(0.5).unwrap();
        assert!((c.A_of_t(2.0).unwrap() - 1.0).abs() < 1e-15);
        let pl = DampingProfile::power_law(1.0, 2.0).unwrap();
        assert!((pl.A_of_t(f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        // ∫₀^T (1+s)^{-2} ds → 1 as T grows; Simpson on the substitution s = u/(1-u).
        let oracle = simpson(|u| pl.rate(u / (1.0 - u)) / (1.0 - u).powi(2), 0.0, 1.0 - 1e-9, 20_000);
        assert!((oracle - 1.0).abs() < 1e-6);
        let osc = DampingProfile::oscillating(0.3).unwrap();
        let closed = osc.A_of_t(2.0 * PI).unwrap();
        assert!((closed - 0.3 * 2.0 * PI).abs() < 1e-12);
        assert!((closed - simpson(|s| osc.rate(s), 0.0, 2.0 * PI, 2000)).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_match_quadrature_oracle() {
        for profile in builtins() {
            for &t in &[0.0, 0.1, 1.0, 2.5, 3.7, 10.0, 50.0] {
                let closed = profile.A_of_t(t).unwrap();
                let oracle = if let DampingProfile::Tabulated { times, .. } = &profile {
                    // integrate piece by piece so Simpson never straddles a kink
                    let mut knots: Vec<f64> = times.iter().copied().filter(|s| *s < t).collect();
                    knots.push(t);
                    knots
                        .windows(2)
                        .map(|w| simpson(|s| profile.rate(s), w[0], w[1], 200))
                        .sum()
                } else {
                    simpson(|s| profile.rate(s), 0.0, t, 20_000)
                };
                assert!((closed - oracle).abs() < 1e-9, "{profile} at {t}: {closed} vs {oracle}");
            }
        }
    }

    #[test]
    fn antiderivative_is_nondecreasing() {
        for profile in builtins() {
            let mut prev = 0.0;
            for i in 0..2000 {
                let t = i as f64 * 0.05;
                let a = profile.A_of_t(t).unwrap();
                assert!(prev <= a + 1e-12, "{profile}");
                prev = a;
            }
        }
    }

    #[test]
    fn scalars_examples() {
        let s = damping_scalars(&DampingProfile::constant(0.4).unwrap(), DEFAULT_HORIZON);
        assert!((s.a_lower - 0.4).abs() < 1e-12 && s.divergent && !s.heuristic);

        let s = damping_scalars(&DampingProfile::power_law(1.0, 1.0).unwrap(), DEFAULT_HORIZON);
        assert_eq!(s.a_lower, 0.0);
        assert!(s.divergent);

        let s = damping_scalars(&DampingProfile::power_law(1.0, 2.0).unwrap(), DEFAULT_HORIZON);
        assert_eq!(s.a_lower, 0.0);
        assert!(!s.divergent);

        // A(t)/t = a₀(1 + (1 - cos t)/t): the grid minimum sits above a₀, the limit reaches it.
        let osc = DampingProfile::oscillating(0.3).unwrap();
        let grid_only = (1..=1000)
            .map(|n| {
                let t = 2.0 * PI * n as f64;
                osc.integral(t) / t
            })
            .fold(f64::INFINITY, f64::min);
        assert!((grid_only - 0.3).abs() < 1e-9);
        let s = damping_scalars(&osc, DEFAULT_HORIZON);
        assert!((s.a_lower - 0.3).abs() < 1e-15 && s.divergent);

        let s = damping_scalars(&DampingProfile::Zero, DEFAULT_HORIZON);
        assert_eq!((s.a_lower, s.divergent), (0.0, false));
    }

    #[test]
    fn lower_mean_bounds_antiderivative() {
        for profile in builtins() {
            let s = damping_scalars(&profile, DEFAULT_HORIZON);
            assert!(s.a_lower >= 0.0);
            if s.a_lower > 0.0 {
                assert!(s.divergent);
            }
            for i in 1..=5000 {
                let t = 1e-3 * (1.0023f64).powi(i);
                assert!(s.a_lower * t - profile.integral(t) <= 1e-9, "{profile} at {t}");
            }
        }
    }

    #[test]
    fn tabulated_trend_heuristic() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let slow: Vec<f64> = times.iter().map(|t| 1.0 / (1.0 + t).sqrt()).collect();
        let fast: Vec<f64> = times.iter().map(|t| 1.0 / (1.0 + t).powi(3)).collect();
        let s = damping_scalars(&DampingProfile::tabulated(times.clone(), slow).unwrap(), 1e3);
        assert!(s.divergent && s.heuristic);
        let s = damping_scalars(&DampingProfile::tabulated(times, fast).unwrap(), 1e3);
        assert!(!s.divergent && s.heuristic);
    }

    #[test]
    fn exp_weight_closed_form_matches_quadrature() {
        let c = DampingProfile::constant(0.3).unwrap();
        let closed = c.exp_weight_integral(-2.0, 1.0, 1.1, 1.05).unwrap();
        let quad = quadrature::integrate(|s| (-2.0 * 0.3 * (s - 1.05)).exp(), 1.0, 1.1, 1e-15).unwrap();
        assert!((closed - quad).abs() < 1e-15);
        let osc = DampingProfile::oscillating(0.2).unwrap();
        let w = osc.exp_weight_integral(-2.0, 0.5, 0.6, 0.0).unwrap();
        let oracle = simpson(|s| (-2.0 * osc.integral(s)).exp(), 0.5, 0.6, 200);
        assert!((w - oracle).abs() < 1e-13);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!("zero".parse::<DampingProfile>().unwrap(), DampingProfile::Zero);
        assert_eq!(
            "constant:a=0.5".parse::<DampingProfile>().unwrap(),
            DampingProfile::Constant { a: 0.5 }
        );
        assert_eq!(
            "power_law:a=1,theta=2".parse::<DampingProfile>().unwrap(),
            DampingProfile::PowerLaw { a: 1.0, theta: 2.0 }
        );
        assert_eq!(
            "oscillating:a0=0.3".parse::<DampingProfile>().unwrap(),
            DampingProfile::Oscillating { a0: 0.3 }
        );
        assert!("constant:a=-1".parse::<DampingProfile>().is_err());
        assert!("constant:b=1".parse::<DampingProfile>().is_err());
        assert!("ramp:a=1".parse::<DampingProfile>().is_err());
        for p in builtins().into_iter().filter(|p| !matches!(p, DampingProfile::Tabulated { .. })) {
            assert_eq!(p.to_string().parse::<DampingProfile>().unwrap(), p);
        }
    }

    #[test]
    fn tabulated_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        std::fs::write(&path, "t,a\n0,0.5\n1,0.5\n2,1.0\n").unwrap();
        let spec = format!("tabulated:path={}", path.display());
        let p: DampingProfile = spec.parse().unwrap();
        assert!((p.A_of_t(2.0).unwrap() - 1.25).abs() < 1e-15);
        assert!((p.A_of_t(3.0).unwrap() - 2.25).abs() < 1e-15);
        assert_eq!(p.to_string(), spec);
    }
}
