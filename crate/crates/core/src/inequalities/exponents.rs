use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    MassSubcritical,
    MassCritical,
    Intercritical,
    EnergyCriticalExcluded,
}

/// Position of `p` relative to `1 + 4/N` and `1 + 4/(N-2)`.
pub fn classify(dim: usize, p: f64) -> Criticality {
    let n = dim as f64;
    let mass = 1.0 + 4.0 / n;
    if dim > 2 && p >= 1.0 + 4.0 / (n - 2.0) {
        Criticality::EnergyCriticalExcluded
    } else if (p - mass).abs() <= 1e-12 * mass {
        Criticality::MassCritical
    } else if p < mass {
        Criticality::MassSubcritical
    } else {
        Criticality::Intercritical
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSet {
    pub sigma: f64,
    pub theta: f64,
    pub q0: f64,
    pub r0: f64,
    pub criticality: Criticality,
}

impl ExponentSet {
    /// `2/q0 + N/r0 - N/2`
    pub fn admissibility_defect(&self, dim: usize) -> f64 {
        let n = dim as f64;
        2.0 / self.q0 + n / self.r0 - n / 2.0
    }
}

fn check_range(dim: usize, p: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p = {p} must exceed 1")));
    }
    if classify(dim, p) == Criticality::EnergyCriticalExcluded {
        return Err(Error::Domain(format!(
            "p = {p} is not energy-subcritical in dimension {dim}"
        )));
    }
    Ok(())
}

pub fn exponents(dim: usize, p: f64) -> Result<ExponentSet> {
    check_range(dim, p)?;
    let n = dim as f64;
    Ok(ExponentSet {
        sigma: n * (p - 1.0) / 2.0,
        theta: 2.0 * (p - 1.0) * (p + 1.0) / (4.0 - (n - 2.0) * (p - 1.0)),
        q0: 4.0 * (p + 1.0) / (n * (p - 1.0)),
        r0: p + 1.0,
        criticality: classify(dim, p),
    })
}

/// Exact exponents for rational `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalExponents {
    pub sigma: Ratio<i64>,
    pub theta: Ratio<i64>,
    pub q0: Ratio<i64>,
    pub r0: Ratio<i64>,
}

impl RationalExponents {
    pub fn is_admissible(&self, dim: usize) -> bool {
        let n = Ratio::from_integer(dim as i64);
        Ratio::from_integer(2) / self.q0 + n / self.r0 == n / 2
    }
}

pub fn exponents_rational(dim: usize, p: Ratio<i64>) -> Result<RationalExponents> {
    check_range(dim, *p.numer() as f64 / *p.denom() as f64)?;
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    let four = Ratio::from_integer(4);
    let n = Ratio::from_integer(dim as i64);
    Ok(RationalExponents {
        sigma: n * (p - one) / two,
        theta: two * (p - one) * (p + one) / (four - (n - two) * (p - one)),
        q0: four * (p + one) / (n * (p - one)),
        r0: p + one,
    })
}
