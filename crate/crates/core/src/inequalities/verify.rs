//! Executable forms of the Grönwall and bootstrap lemmas, and their replay
//! on simulated runs.

use serde::Serialize;

use super::exponents::exponents;
use crate::damping::DampingProfile;
use crate::diagnostics::{DiagnosticsRecord, Model};
use crate::error::{Error, Result};
use crate::quadrature;

/// Relative slack on every pointwise inequality.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GronwallBranch {
    /// `β = 1`, bound `(2C + sup_{[0,t₀]} f) exp(2∫h)`
    Linear,
    /// `β < 1`, Young + convexity route
    Sublinear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    pub branch: GronwallBranch,
    pub hypotheses_ok: bool,
    /// Why the hypotheses failed, if they did.
    pub hypothesis_note: Option<String>,
    /// Largest `f - RHS` over the samples (negative when strict).
    pub max_hypothesis_excess: f64,
    pub t0: Option<f64>,
    /// Pointwise bound; empty when the hypotheses fail.
    pub bound: Vec<f64>,
    /// Smallest `bound - f`.
    pub min_bound_margin: f64,
    pub satisfied: bool,
}

fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
        out.push(acc);
    }
    out
}

fn check_uniform(t: &[f64]) -> Result<()> {
    if t.len() < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let dt = t[1] - t[0];
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(w[1].abs())) {
        return Err(Error::Domain("samples must be uniformly spaced and increasing".into()));
    }
    Ok(())
}

/// Checks `f ≤ C + g f^β + ∫₀ᵗ h f^β` pointwise and, when it holds,
/// compares `f` with the lemma's explicit bound.
pub fn gronwall_verify(t: &[f64], f: &[f64], g: &[f64], h: &[f64], c: f64, beta: f64) -> Result<GronwallReport> {
    if f.len() != t.len() || g.len() != t.len() || h.len() != t.len() {
        return Err(Error::Domain("t, f, g, h must have equal lengths".into()));
    }
    check_uniform(t)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, 1]")));
    }
    let branch = if beta == 1.0 { GronwallBranch::Linear } else { GronwallBranch::Sublinear };
    let mut report = GronwallReport {
        branch,
        hypotheses_ok: false,
        hypothesis_note: None,
        max_hypothesis_excess: f64::NAN,
        t0: None,
        bound: Vec::new(),
        min_bound_margin: f64::NAN,
        satisfied: false,
    };
    let all_finite = [f, g, h].iter().all(|v| v.iter().all(|x| x.is_finite()));
    if !all_finite || !c.is_finite() {
        report.hypothesis_note = Some("non-finite input".into());
        return Ok(report);
    }
    if !(c > 0.0) {
        report.hypothesis_note = Some(format!("C = {c} is not positive"));
        return Ok(report);
    }
    if [f, g, h].iter().any(|v| v.iter().any(|&x| x < 0.0)) {
        report.hypothesis_note = Some("f, g and h must be nonnegative".into());
        return Ok(report);
    }
    let fb: Vec<f64> = f.iter().map(|x| x.powf(beta)).collect();
    let hfb: Vec<f64> = h.iter().zip(&fb).map(|(a, b)| a * b).collect();
    let int_hfb = cumulative_trapezoid(t, &hfb);
    let int_h = cumulative_trapezoid(t, h);
    let mut excess = f64::NEG_INFINITY;
    let mut holds = true;
    for i in 0..t.len() {
        let rhs = c + g[i] * fb[i] + int_hfb[i];
        excess = excess.max(f[i] - rhs);
        holds &= f[i] <= rhs * (1.0 + SLACK);
    }
    report.max_hypothesis_excess = excess;
    if !holds {
        report.hypothesis_note = Some("integral inequality violated".into());
        return Ok(report);
    }
    let bound: Vec<f64> = match branch {
        GronwallBranch::Linear => {
            // t₀: from here on g stays ≤ 1/2
            let Some(i0) = (0..t.len()).find(|&i| g[i..].iter().all(|&x| x <= 0.5)) else {
                report.hypothesis_note = Some("g never settles below 1/2".into());
                return Ok(report);
            };
            report.t0 = Some(t[i0]);
            let sup = f[..=i0].iter().copied().fold(0.0, f64::max);
            int_h.iter().map(|ih| (2.0 * c + sup) * (2.0 * ih).exp()).collect()
        }
        GronwallBranch::Sublinear => {
            let g_inf = g.iter().copied().fold(0.0, f64::max);
            let young = 2.0 * (1.0 - beta) * (2.0 * beta).powf(beta / (1.0 - beta)) * g_inf;
            int_h
                .iter()
                .map(|ih| (2.0 * c + young + 2.0 * (1.0 - beta) * ih) * (2.0 * beta * ih).exp())
                .collect()
        }
    };
    report.hypotheses_ok = true;
    report.min_bound_margin = bound.iter().zip(f).map(|(b, x)| b - x).fold(f64::INFINITY, f64::min);
    report.satisfied = bound.iter().zip(f).all(|(b, x)| *x <= b * (1.0 + SLACK));
    report.bound = bound;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    /// `(θ-1) θ^{θ/(1-θ)}`
    pub threshold: f64,
    /// `a b^{1/(θ-1)}`
    pub smallness_value: f64,
    pub smallness_ok: bool,
    /// `X ≤ a + b X^θ` at every sample.
    pub hypothesis_ok: bool,
    /// `θa/(θ-1)`
    pub bound: f64,
    pub max_x: f64,
    pub conclusion_ok: bool,
}

pub fn bootstrap_verify(x: &[f64], a: f64, b: f64, theta: f64) -> Result<BootstrapReport> {
    if !(theta > 1.0) {
        return Err(Error::Domain(format!("theta = {theta} must exceed 1")));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain("a and b must be positive".into()));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let threshold = (theta - 1.0) * theta.powf(theta / (1.0 - theta));
    let smallness_value = a * b.powf(1.0 / (theta - 1.0));
    let bound = theta * a / (theta - 1.0);
    let max_x = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BootstrapReport {
        threshold,
        smallness_value,
        smallness_ok: x[0] <= a * (1.0 + SLACK) && smallness_value < threshold,
        hypothesis_ok: x.iter().all(|&v| v >= 0.0 && v <= (a + b * v.powf(theta)) * (1.0 + SLACK)),
        bound,
        max_x,
        conclusion_ok: x.iter().all(|&v| v < bound),
    })
}

/// `(p-1)∫₀ᵗ a e^{(1-p)A}` by quadrature against its closed form `1 - e^{(1-p)A(t)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightIdentity {
    pub quadrature: f64,
    pub closed_form: f64,
    pub residual: f64,
}

pub fn damped_weight_identity(profile: &DampingProfile, p: f64, t: f64) -> Result<WeightIdentity> {
    let integrand = |s: f64| profile.rate(s) * ((1.0 - p) * profile.integral(s)).exp();
    let mut quad = 0.0;
    // split at table nodes so the kinks sit on panel boundaries
    let mut cuts = vec![0.0];
    if let DampingProfile::Tabulated { times, .. } = profile {
        cuts.extend(times.iter().copied().filter(|&s| s > 0.0 && s < t));
    }
    cuts.push(t);
    for w in cuts.windows(2) {
        quad += quadrature::integrate(integrand, w[0], w[1], 1e-13)?;
    }
    let quadrature = (p - 1.0) * quad;
    let closed_form = 1.0 - ((1.0 - p) * profile.A_of_t(t)?).exp();
    Ok(WeightIdentity {
        quadrature,
        closed_form,
        residual: (quadrature - closed_form).abs(),
    })
}

fn initial(series: &[DiagnosticsRecord]) -> Result<&DiagnosticsRecord> {
    series
        .first()
        .filter(|r| r.t == 0.0)
        .ok_or_else(|| Error::InsufficientData("series must start at t = 0".into()))
}

/// The Grönwall inequality chain from the mass-subcritical scattering proof,
/// evaluated on a run: `f = e^{2A}‖∇u‖²`, `g`, `h` built from `K` and
/// `‖u₀‖₂`, `C = E(u₀)` and `β = σ/2`.
///
/// A nonpositive `E(u₀)` is raised to a tiny positive `C`, which keeps the
/// inequality true.
pub fn scat1_gronwall_replay(series: &[DiagnosticsRecord], model: &Model, k: f64) -> Result<GronwallReport> {
    let ex = exponents(model.dim, model.p)?;
    let r0 = initial(series)?;
    let p = model.p;
    let m0 = r0.mass.sqrt().powf(p + 1.0 - ex.sigma);
    let coef = 2.0 * k / (p + 1.0) * m0;
    let t: Vec<f64> = series.iter().map(|r| r.t).collect();
    let f: Vec<f64> = series.iter().map(|r| (2.0 * r.a_t).exp() * r.grad_norm.powi(2)).collect();
    let g: Vec<f64> = series.iter().map(|r| coef * (-(p - 1.0) * r.a_t).exp()).collect();
    let h: Vec<f64> = series
        .iter()
        .map(|r| coef * (p - 1.0) * model.damping.rate(r.t) * (-(p - 1.0) * r.a_t).exp())
        .collect();
    let c = r0.energy.max(1e-300 + 1e-12 * r0.grad_norm.powi(2));
    gronwall_verify(&t, &f, &g, &h, c, ex.sigma / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scat3Replay {
    pub weight_identity: WeightIdentity,
    pub bootstrap: BootstrapReport,
    /// `max_t e^{A}‖∇u‖ / ‖∇u₀‖`
    pub max_growth: f64,
}

/// The bootstrap step of the intercritical small-data proof on a run:
/// `Y = (sup_{s≤t} e^{A}‖∇u‖)²` against `a = ‖∇u₀‖²`, `b = 4K‖u₀‖^{p+1-σ}/(p+1)`,
/// `θ = σ/2`.
pub fn scat3_bootstrap_replay(series: &[DiagnosticsRecord], model: &Model, k: f64) -> Result<Scat3Replay> {
    let ex = exponents(model.dim, model.p)?;
    let r0 = initial(series)?;
    let p = model.p;
    let t_end = series.last().map(|r| r.t).unwrap_or(0.0);
    let weight_identity = damped_weight_identity(&model.damping, p, t_end)?;
    if weight_identity.residual > 1e-10 {
        return Err(Error::Numeric(format!(
            "damped weight identity residual {} exceeds 1e-10",
            weight_identity.residual
        )));
    }
    let grad0_sq = r0.grad_norm.powi(2);
    let a = grad0_sq.max(r0.energy);
    let b = 4.0 * k / (p + 1.0) * r0.mass.sqrt().powf(p + 1.0 - ex.sigma);
    let mut sup: f64 = 0.0;
    let y: Vec<f64> = series
        .iter()
        .map(|r| {
            sup = sup.max(r.a_t.exp() * r.grad_norm);
            sup * sup
        })
        .collect();
    let bootstrap = bootstrap_verify(&y, a, b, ex.sigma / 2.0)?;
    Ok(Scat3Replay {
        weight_identity,
        max_growth: sup / r0.grad_norm,
        bootstrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, t_end: f64) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn trivial_sublinear_case() {
        let t = uniform(11, 1.0);
        let one = vec![1.0; 11];
        let zero = vec![0.0; 11];
        let r = gronwall_verify(&t, &one, &zero, &zero, 1.0, 0.5).unwrap();
        assert!(r.hypotheses_ok && r.satisfied);
        assert!(r.bound.iter().all(|&b| (b - 2.0).abs() < 1e-15));
        assert_eq!(r.branch, GronwallBranch::Sublinear);
    }

    // f(1 - g - h dt/2) = C + (trapezoid up to the previous node) + h_{i-1} f_{i-1} dt/2
    fn linear_equality_case(n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let t = uniform(n, 10.0);
        let dt = t[1];
        let g: Vec<f64> = t.iter().map(|s| 0.9 * (-s).exp()).collect();
        let h = vec![0.03; n];
        let mut f = vec![0.0; n];
        let mut acc = 0.0;
        f[0] = 1.0 / (1.0 - g[0]);
        for i in 1..n {
            let known = 1.0 + acc + 0.5 * dt * h[i - 1] * f[i - 1];
            f[i] = known / (1.0 - g[i] - 0.5 * dt * h[i]);
            acc += 0.5 * dt * (h[i - 1] * f[i - 1] + h[i] * f[i]);
        }
        (t, f, g, h)
    }

    #[test]
    fn linear_branch_equality_case() {
        let (t, f, g, h) = linear_equality_case(2001);
        // ODE oracle: F' = h(C + F)/(1 - g), f = (C + F)/(1 - g)
        let rhs = |s: f64, y: f64| 0.03 * (1.0 + y) / (1.0 - 0.9 * (-s).exp());
        let (mut y, mut s, ds) = (0.0, 0.0, 1e-3);
        while s < 10.0 - 1e-12 {
            let k1 = rhs(s, y);
            let k2 = rhs(s + ds / 2.0, y + ds / 2.0 * k1);
            let k3 = rhs(s + ds / 2.0, y + ds / 2.0 * k2);
            let k4 = rhs(s + ds, y + ds * k3);
            y += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s += ds;
        }
        let ode_f = (1.0 + y) / (1.0 - 0.9 * (-10f64).exp());
        assert!((f[2000] - ode_f).abs() < 1e-5 * ode_f);
        let r = gronwall_verify(&t, &f, &g, &h, 1.0, 1.0).unwrap();
        assert!(r.hypotheses_ok && r.satisfied, "{r:?}");
        assert_eq!(r.branch, GronwallBranch::Linear);
        // g(t) = 0.9e^{-t} ≤ 1/2 from ln(1.8) on
        assert!((r.t0.unwrap() - 1.8f64.ln()).abs() < 5e-3 + 1e-12);
        let ih: f64 = 0.3;
        let sup = f[..=t.iter().position(|&s| s == r.t0.unwrap()).unwrap()]
            .iter()
            .copied()
            .fold(0.0, f64::max);
        assert!((r.bound[2000] - (2.0 + sup) * (2.0 * ih).exp()).abs() < 1e-12 * r.bound[2000]);
    }

    #[test]
    fn violation_is_detected() {
        let t = uniform(11, 1.0);
        let mut f = vec![1.0; 11];
        f[6] = 3.0;
        let zero = vec![0.0; 11];
        let r = gronwall_verify(&t, &f, &zero, &zero, 1.0, 0.5).unwrap();
        assert!(!r.hypotheses_ok && !r.satisfied && r.bound.is_empty());
        assert!((r.max_hypothesis_excess - 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_branch_needs_decaying_g() {
        let t = uniform(11, 1.0);
        let r = gronwall_verify(&t, &[0.1; 11], &[0.9; 11], &[0.0; 11], 1.0, 1.0).unwrap();
        assert!(!r.hypotheses_ok);
    }

    #[test]
    fn gronwall_rejects_bad_inputs() {
        let t = [0.0, 0.1, 0.3];
        assert!(gronwall_verify(&t, &[1.0; 3], &[0.0; 3], &[0.0; 3], 1.0, 0.5).is_err());
        let t = uniform(3, 1.0);
        assert!(gronwall_verify(&t, &[1.0; 3], &[0.0; 3], &[0.0; 3], 1.0, 1.5).is_err());
        let r = gronwall_verify(&t, &[1.0; 3], &[0.0; 3], &[0.0; 3], -1.0, 0.5).unwrap();
        assert!(!r.hypotheses_ok);
    }

    #[test]
    fn bootstrap_examples() {
        let r = bootstrap_verify(&[1.0, 1.2, 1.35], 1.0, 0.2, 2.0).unwrap();
        assert!((r.threshold - 0.25).abs() < 1e-15);
        assert!(r.smallness_ok && r.conclusion_ok && r.hypothesis_ok);
        assert_eq!(r.bound, 2.0);
        let r = bootstrap_verify(&[1.0], 1.0, 0.3, 2.0).unwrap();
        assert!(!r.smallness_ok);
        let r = bootstrap_verify(&[1.0], 1.0, 0.25, 2.0).unwrap();
        assert!(!r.smallness_ok);
        let r = bootstrap_verify(&[0.7; 5], 0.7, 0.1, 3.0).unwrap();
        assert!(r.conclusion_ok && r.hypothesis_ok);
        let r = bootstrap_verify(&[1.0, 2.5], 1.0, 0.2, 2.0).unwrap();
        assert!(!r.conclusion_ok && !r.hypothesis_ok);
        assert!(bootstrap_verify(&[1.0], 1.0, 0.2, 1.0).is_err());
    }

    #[test]
    fn weight_identity_holds_for_every_kind() {
        let profiles = [
            DampingProfile::Zero,
            DampingProfile::constant(0.4).unwrap(),
            DampingProfile::power_law(1.0, 2.0).unwrap(),
            DampingProfile::oscillating(0.3).unwrap(),
            DampingProfile::tabulated(vec![0.0, 1.0, 2.5, 4.0], vec![0.2, 0.7, 0.1, 0.3]).unwrap(),
        ];
        for prof in &profiles {
            for &t in &[0.5, 3.0, 7.0] {
                let w = damped_weight_identity(prof, 3.0, t).unwrap();
                assert!(w.residual < 1e-10, "{prof} {t}: {w:?}");
                assert!(w.quadrature <= 1.0 + 1e-12);
            }
        }
    }
}
