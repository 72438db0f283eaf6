use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::damping::DampingProfile;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, TRUNCATION_THRESHOLD};
use crate::solver::checkpoint;

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Evolve `u` with the damping applied in the linear substep.
    #[default]
    Direct,
    /// Evolve `v = e^{A(t)} u`, whose nonlinearity carries `e^{(1-p)A(t)}`.
    Gauged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub half_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: f64,
    pub dt: f64,
    /// Interval between diagnostics records; defaults to `t_end / 100`.
    #[serde(default)]
    pub cadence: Option<f64>,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
}

fn default_blowup() -> f64 {
    DEFAULT_BLOWUP_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataSpec {
    /// `amplitude · exp(-|x-c|²/(2 width²)) · e^{i k·x}`, optionally perturbed by
    /// seeded noise of relative size `noise` under the same envelope.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default)]
        wave_vector: Vec<f64>,
        #[serde(default)]
        noise: f64,
    },
    /// `√2 η sech(η x)`, the cubic 1D ground state.
    Soliton { eta: f64 },
    /// A stored checkpoint multiplied by `scale`.
    ScaledProfile { path: PathBuf, scale: f64 },
}

/// Optional settings for the scattering analysis of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSpec {
    /// Interval between stored back-propagated samples.
    pub sample_every: f64,
    /// Samples before this time are excluded from verdicts.
    #[serde(default)]
    pub burn_in: f64,
    /// `ε` for the exponential-smallness check, as a fraction of `‖u₀‖_{H¹}`.
    #[serde(default = "default_eps")]
    pub epsilon_factor: f64,
}

fn default_eps() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub dim: usize,
    pub p: f64,
    /// `-1` focusing, `+1` defocusing.
    #[serde(default = "default_mu")]
    pub mu: i32,
    #[serde(default)]
    pub damping: DampingProfile,
    #[serde(default)]
    pub formulation: Formulation,
    /// Test hook: `false` drops the nonlinear substep.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub initial: InitialDataSpec,
    #[serde(default)]
    pub scattering: Option<ScatteringSpec>,
}

impl Default for DampingProfile {
    fn default() -> Self {
        DampingProfile::Zero
    }
}

fn default_name() -> String {
    "run".into()
}

fn default_mu() -> i32 {
    -1
}

fn default_true() -> bool {
    true
}

/// `1 + 4/(N-2)` for `N >= 3`, infinite otherwise.
pub fn energy_critical_exponent(dim: usize) -> f64 {
    if dim >= 3 {
        1.0 + 4.0 / (dim as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

impl SimConfig {
    /// A 1D cubic focusing config with the given data, used by tests and the demo.
    pub fn new_1d(points: usize, half_length: f64, initial: InitialDataSpec) -> Self {
        SimConfig {
            name: default_name(),
            dim: 1,
            p: 3.0,
            mu: -1,
            damping: DampingProfile::Zero,
            formulation: Formulation::Direct,
            nonlinear: true,
            seed: 0,
            grid: GridSpec {
                points,
                half_length,
            },
            time: TimeSpec {
                t_end: 1.0,
                dt: 1e-3,
                cadence: None,
                blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            },
            initial,
            scattering: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Validation(msg));
        if !(1..=3).contains(&self.dim) {
            return invalid(format!("dim must be 1, 2 or 3, got {}", self.dim));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return invalid(format!("p must exceed 1, got {}", self.p));
        }
        if self.p >= energy_critical_exponent(self.dim) {
            return invalid(format!(
                "energy-supercritical p: p = {} must be below 1 + 4/(N-2) = {} for N = {}",
                self.p,
                energy_critical_exponent(self.dim),
                self.dim
            ));
        }
        if self.mu != 1 && self.mu != -1 {
            return invalid(format!("mu must be +1 or -1, got {}", self.mu));
        }
        if self.grid.points < 16 || !self.grid.points.is_power_of_two() {
            return invalid(format!(
                "grid.points must be a power of two >= 16, got {}",
                self.grid.points
            ));
        }
        if !(self.grid.half_length.is_finite() && self.grid.half_length > 0.0) {
            return invalid("grid.half_length must be positive".into());
        }
        let t = &self.time;
        if !(t.dt.is_finite() && t.dt > 0.0) {
            return invalid(format!("time.dt must be positive, got {}", t.dt));
        }
        if !(t.t_end.is_finite() && t.t_end > 0.0) {
            return invalid(format!("time.t_end must be positive, got {}", t.t_end));
        }
        steps_for(t.t_end, t.dt, "time.t_end")?;
        steps_for(self.cadence(), t.dt, "time.cadence")?;
        if !(t.blowup_threshold > 0.0) {
            return invalid("time.blowup_threshold must be positive".into());
        }
        match &self.initial {
            InitialDataSpec::Gaussian {
                amplitude,
                width,
                center,
                wave_vector,
                noise,
            } => {
                if !(amplitude.is_finite() && width.is_finite() && *width > 0.0) {
                    return invalid("gaussian needs finite amplitude and width > 0".into());
                }
                for (name, v) in [("center", center), ("wave_vector", wave_vector)] {
                    if !v.is_empty() && v.len() != self.dim {
                        return invalid(format!(
                            "gaussian {name} has {} entries for dim {}",
                            v.len(),
                            self.dim
                        ));
                    }
                }
                if !(noise.is_finite() && *noise >= 0.0) {
                    return invalid("gaussian noise must be >= 0".into());
                }
            }
            InitialDataSpec::Soliton { eta } => {
                if self.dim != 1 || self.p != 3.0 {
                    return invalid("soliton data requires dim = 1 and p = 3".into());
                }
                if !(eta.is_finite() && *eta > 0.0) {
                    return invalid("soliton eta must be positive".into());
                }
            }
            InitialDataSpec::ScaledProfile { scale, .. } => {
                if !scale.is_finite() {
                    return invalid("scaled_profile scale must be finite".into());
                }
            }
        }
        if let Some(s) = &self.scattering {
            if !(s.sample_every > 0.0 && s.burn_in >= 0.0 && s.epsilon_factor > 0.0) {
                return invalid("scattering settings must be positive".into());
            }
        }
        Ok(())
    }

    pub fn cadence(&self) -> f64 {
        self.time.cadence.unwrap_or(self.time.t_end / 100.0)
    }

    pub fn n_steps(&self) -> Result<usize> {
        steps_for(self.time.t_end, self.time.dt, "time.t_end")
    }

    pub fn cadence_steps(&self) -> Result<usize> {
        steps_for(self.cadence(), self.time.dt, "time.cadence")
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        Grid::shared(self.dim, self.grid.points, self.grid.half_length)
    }

    pub fn mu(&self) -> f64 {
        self.mu as f64
    }

    /// Samples the initial datum and checks that it has decayed before the boundary.
    pub fn initial_field(&self, grid: &Arc<Grid>) -> Result<Field> {
        let field = match &self.initial {
            InitialDataSpec::Gaussian {
                amplitude,
                width,
                center,
                wave_vector,
                noise,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                Field::from_fn(grid.clone(), |x| {
                    let mut r2 = 0.0;
                    let mut phase = 0.0;
                    for (i, xi) in x.iter().enumerate() {
                        let d = xi - center.get(i).copied().unwrap_or(0.0);
                        r2 += d * d;
                        phase += wave_vector.get(i).copied().unwrap_or(0.0) * xi;
                    }
                    let envelope = amplitude * (-r2 / (2.0 * width * width)).exp();
                    let jitter = if *noise > 0.0 {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * *noise
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    (Complex64::new(1.0, 0.0) + jitter) * Complex64::from_polar(envelope, phase)
                })
            }
            InitialDataSpec::Soliton { eta } => Field::from_fn(grid.clone(), |x| {
                Complex64::new(2f64.sqrt() * eta / (eta * x[0]).cosh(), 0.0)
            }),
            InitialDataSpec::ScaledProfile { path, scale } => {
                let stored = checkpoint::read(path)?;
                if *stored.grid != **grid {
                    return Err(Error::Validation(format!(
                        "profile {} is on {:?}, config expects {:?}",
                        path.display(),
                        stored.grid,
                        grid
                    )));
                }
                let mut f = stored.scaled(*scale);
                f.grid = grid.clone();
                f.time = 0.0;
                f
            }
        };
        field.check_finite()?;
        let shell = field.boundary_mass_fraction();
        if shell >= TRUNCATION_THRESHOLD {
            return Err(Error::Validation(format!(
                "initial data not localized: boundary-shell mass fraction {shell:e} >= {TRUNCATION_THRESHOLD:e}"
            )));
        }
        Ok(Field { time: 0.0, ..field })
    }
}

fn steps_for(span: f64, dt: f64, what: &str) -> Result<usize> {
    let ratio = span / dt;
    let n = ratio.round();
    if !(n >= 1.0) || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Validation(format!(
            "{what} = {span} is not a positive multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}
