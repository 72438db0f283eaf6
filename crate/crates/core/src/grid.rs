//! Periodic box `[-L, L)^N` with spectral transforms and the integral
//! functionals evaluated on it.
//!
//! Fourier convention: `forward_transform` returns Fourier-series coefficients
//! `c_k = n^{-N} Σ_j f_j e^{-2πi j·m/n}`, so that `f_j = Σ_k c_k e^{2πi j·m/n}`
//! and Parseval reads `Σ_j |f_j|² h^N = (2L)^N Σ_k |c_k|²`. The free flow
//! `e^{itΔ}` multiplies `c_k` by `e^{-i|k|²t}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Fraction of the half-length that marks the outer boundary shell.
pub const BOUNDARY_SHELL: f64 = 0.05;

/// Boundary-shell mass fraction above which moments are flagged as truncated.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

pub struct Grid {
    dim: usize,
    points: usize,
    half_length: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    coords: Vec<f64>,
    k_squared: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("points", &self.points)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.half_length == other.half_length
    }
}

impl Grid {
    pub fn new(dim: usize, points: usize, half_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("dimension {dim} not in 1..=3")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "points per axis must be a power of two >= 16, got {points}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Config(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        let spacing = 2.0 * half_length / points as f64;
        let wavenumbers: Vec<f64> = (0..points)
            .map(|j| {
                let m = if j < points / 2 {
                    j as f64
                } else {
                    j as f64 - points as f64
                };
                std::f64::consts::PI * m / half_length
            })
            .collect();
        let coords = (0..points)
            .map(|j| -half_length + j as f64 * spacing)
            .collect();
        let total = points.pow(dim as u32);
        let mut k_squared = vec![0.0; total];
        for (idx, k2) in k_squared.iter_mut().enumerate() {
            *k2 = axis_indices(idx, dim, points)
                .map(|j| wavenumbers[j] * wavenumbers[j])
                .sum();
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(points);
        let inv = planner.plan_fft_inverse(points);
        Ok(Grid {
            dim,
            points,
            half_length,
            spacing,
            wavenumbers,
            coords,
            k_squared,
            fwd,
            inv,
        })
    }

    pub fn shared(dim: usize, points: usize, half_length: f64) -> Result<Arc<Self>> {
        Self::new(dim, points, half_length).map(Arc::new)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Per-axis wavenumbers in FFT order; the Nyquist mode carries `-π n / (2L)`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Per-axis node coordinates `-L + j h`.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `|k|²` for every coefficient, row-major.
    pub fn k_squared(&self) -> &[f64] {
        &self.k_squared
    }

    pub fn len(&self) -> usize {
        self.k_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_squared.is_empty()
    }

    /// Volume element `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Box volume `(2L)^N`.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dim as i32)
    }

    pub fn axis_indices(&self, idx: usize) -> impl Iterator<Item = usize> {
        axis_indices(idx, self.dim, self.points)
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn position(&self, idx: usize, out: &mut [f64]) {
        for (slot, j) in out.iter_mut().zip(self.axis_indices(idx)) {
            *slot = self.coords[j];
        }
    }

    fn in_boundary_shell(&self, idx: usize) -> bool {
        let cut = (1.0 - BOUNDARY_SHELL) * self.half_length;
        self.axis_indices(idx).any(|j| self.coords[j].abs() >= cut)
    }

    fn transform_in_place(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.points;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (m, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + m * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (m, value) in line.iter().enumerate() {
                        data[base + m * stride] = *value;
                    }
                }
            }
        }
    }
}

fn axis_indices(idx: usize, dim: usize, points: usize) -> impl Iterator<Item = usize> {
    (0..dim).map(move |axis| {
        let stride = points.pow((dim - 1 - axis) as u32);
        (idx / stride) % points
    })
}

fn check_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Config(format!(
            "grid mismatch: {a:?} versus {b:?}"
        )));
    }
    Ok(())
}

/// Complex grid function in physical space.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub time: f64,
}

/// Fourier coefficients of a [`Field`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Arc<Grid>,
    pub coefficients: Vec<Complex64>,
    pub time: f64,
}

impl Field {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Field {
            grid,
            values,
            time: 0.0,
        }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        let field = Field { grid, values, time };
        field.check_finite()?;
        Ok(field)
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: Arc<Grid>, mut f: F) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|idx| {
                grid.position(idx, &mut x);
                f(&x)
            })
            .collect();
        Field {
            grid,
            values,
            time: 0.0,
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(pos) = self.values.iter().position(|z| !z.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite field value at index {pos} (t = {})",
                self.time
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z * factor).collect(),
            time: self.time,
        }
    }

    pub fn difference(&self, other: &Field) -> Result<Field> {
        check_grid(&self.grid, &other.grid)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            time: self.time,
        })
    }

    /// `Σ |f|² h^N`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `Σ |f|^q h^N` without the outer root.
    pub fn power_integral(&self, q: f64) -> f64 {
        let dv = self.grid.cell_volume();
        if q == 2.0 {
            return self.mass();
        }
        self.values.iter().map(|z| z.norm().powf(q)).sum::<f64>() * dv
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Mass in the outer shell divided by total mass; zero for the zero field.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let shell: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.grid.in_boundary_shell(*idx))
            .map(|(_, z)| z.norm_sqr())
            .sum();
        shell / total
    }
}

impl SpectralField {
    pub fn from_coefficients(
        grid: Arc<Grid>,
        coefficients: Vec<Complex64>,
        time: f64,
    ) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::Config(format!(
                "spectral field has {} coefficients, grid expects {}",
                coefficients.len(),
                grid.len()
            )));
        }
        Ok(SpectralField {
            grid,
            coefficients,
            time,
        })
    }

    /// Multiplies each coefficient by `m(|k|²)`.
    pub fn apply_multiplier<M: Fn(f64) -> Complex64>(&mut self, m: M) {
        for (c, &k2) in self.coefficients.iter_mut().zip(self.grid.k_squared()) {
            *c *= m(k2);
        }
    }

    /// `(2L)^N Σ |c|²`, equal to the mass of the physical field.
    pub fn mass(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.box_volume()
    }

    /// `(2L)^N Σ |k|² |c|²`.
    pub fn gradient_norm_sq(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(self.grid.k_squared())
            .map(|(c, k2)| k2 * c.norm_sqr())
            .sum::<f64>()
            * self.grid.box_volume()
    }
}

pub fn forward_transform(f: &Field) -> SpectralField {
    let mut coefficients = f.values.clone();
    f.grid.transform_in_place(&mut coefficients, false);
    let scale = 1.0 / f.grid.len() as f64;
    for c in coefficients.iter_mut() {
        *c *= scale;
    }
    SpectralField {
        grid: f.grid.clone(),
        coefficients,
        time: f.time,
    }
}

pub fn inverse_transform(spec: &SpectralField) -> Field {
    let mut values = spec.coefficients.clone();
    spec.grid.transform_in_place(&mut values, true);
    Field {
        grid: spec.grid.clone(),
        values,
        time: spec.time,
    }
}

/// In-place variants used by the time stepper to avoid reallocating.
pub(crate) fn forward_in_place(grid: &Grid, data: &mut [Complex64]) {
    grid.transform_in_place(data, false);
    let scale = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

pub(crate) fn inverse_in_place(grid: &Grid, data: &mut [Complex64]) {
    grid.transform_in_place(data, true);
}

/// `‖f‖_{L^q}` for `q ∈ [1, ∞]`.
pub fn norms(f: &Field, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Domain(format!("L^q norm needs q >= 1, got {q}")));
    }
    f.check_finite()?;
    if q.is_infinite() {
        return Ok(f.max_modulus());
    }
    Ok(f.power_integral(q).powf(1.0 / q))
}

/// `‖∇f‖²_{L²}` evaluated spectrally.
pub fn gradient_norm_sq(f: &Field) -> f64 {
    forward_transform(f).gradient_norm_sq()
}

/// `‖f‖²_{H¹} = ‖f‖² + ‖∇f‖²`.
pub fn h1_norm_sq(f: &Field) -> f64 {
    let spec = forward_transform(f);
    spec.mass() + spec.gradient_norm_sq()
}

pub fn h1_norm(f: &Field) -> f64 {
    h1_norm_sq(f).sqrt()
}

/// Spectral partial derivatives, one field per axis. The Nyquist mode of
/// each axis is dropped so that real fields have real derivatives.
pub fn gradient(f: &Field) -> Vec<Field> {
    let spec = forward_transform(f);
    let grid = &f.grid;
    let n = grid.points();
    (0..grid.dim())
        .map(|axis| {
            let mut coeffs = spec.coefficients.clone();
            for (idx, c) in coeffs.iter_mut().enumerate() {
                let j = grid.axis_indices(idx).nth(axis).unwrap_or(0);
                *c *= if j == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, grid.wavenumbers()[j])
                };
            }
            let d = SpectralField {
                grid: grid.clone(),
                coefficients: coeffs,
                time: f.time,
            };
            inverse_transform(&d)
        })
        .collect()
}

/// A moment of the field together with the truncation monitor that guards it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub boundary_mass_fraction: f64,
    pub truncated: bool,
}

impl Moment {
    fn new(value: f64, f: &Field) -> Self {
        let boundary_mass_fraction = f.boundary_mass_fraction();
        Moment {
            value,
            boundary_mass_fraction,
            truncated: boundary_mass_fraction >= TRUNCATION_THRESHOLD,
        }
    }
}

/// `K = Σ |x|² |f|² h^N`.
pub fn weighted_variance(f: &Field) -> Moment {
    let grid = &f.grid;
    let mut x = vec![0.0; grid.dim()];
    let sum: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            grid.position(idx, &mut x);
            x.iter().map(|c| c * c).sum::<f64>() * z.norm_sqr()
        })
        .sum();
    Moment::new(sum * grid.cell_volume(), f)
}

/// `V = Im Σ (x·∇f) f̄ h^N`.
pub fn v_functional(f: &Field) -> Moment {
    let grid = &f.grid;
    let grads = gradient(f);
    let mut x = vec![0.0; grid.dim()];
    let sum: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            grid.position(idx, &mut x);
            let xdotgrad: Complex64 = x
                .iter()
                .zip(&grads)
                .map(|(xi, g)| g.values[idx] * *xi)
                .sum();
            (xdotgrad * z.conj()).im
        })
        .sum();
    Moment::new(sum * grid.cell_volume(), f)
}

/// `‖f‖_{L^r} + ‖ |∇f| ‖_{L^r}`, the `W^{1,r}` norm.
pub fn sobolev_w1_norm(f: &Field, r: f64) -> Result<f64> {
    let grads = gradient(f);
    let modulus: Vec<Complex64> = (0..f.values.len())
        .map(|idx| {
            let s: f64 = grads.iter().map(|g| g.values[idx].norm_sqr()).sum();
            Complex64::new(s.sqrt(), 0.0)
        })
        .collect();
    let grad_field = Field {
        grid: f.grid.clone(),
        values: modulus,
        time: f.time,
    };
    Ok(norms(f, r)? + norms(&grad_field, r)?)
}

/// Relative `L²` distance `‖a - b‖ / ‖b‖`.
pub fn relative_l2(a: &Field, b: &Field) -> Result<f64> {
    let diff = a.difference(b)?;
    let denom = b.mass().sqrt();
    let num = diff.mass().sqrt();
    Ok(if denom == 0.0 { num } else { num / denom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_field(grid: Arc<Grid>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::from_values(grid, values, 0.0).unwrap()
    }

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(4, 32, 1.0).is_err());
        assert!(Grid::new(1, 8, 1.0).is_err());
        assert!(Grid::new(1, 48, 1.0).is_err());
        assert!(Grid::new(1, 32, 0.0).is_err());
    }

    #[test]
    fn wavenumbers_are_odd_symmetric_below_nyquist() {
        let g = Grid::new(1, 32, 5.0).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k.len(), 32);
        for j in 1..16 {
            assert!((k[j] + k[32 - j]).abs() < 1e-14);
        }
        assert!((k[1] - std::f64::consts::PI / 5.0).abs() < 1e-15);
        assert!((g.spacing() - 10.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = Grid::shared(2, 16, 3.0).unwrap();
        let spec = forward_transform(&Field::zeros(g));
        assert!(spec.coefficients.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn pure_mode_has_single_coefficient() {
        let g = Grid::shared(1, 64, 4.0).unwrap();
        let k1 = g.wavenumbers()[3];
        let f = Field::from_fn(g.clone(), |x| Complex64::from_polar(1.0, k1 * x[0]));
        let spec = forward_transform(&f);
        for (j, c) in spec.coefficients.iter().enumerate() {
            if j == 3 {
                assert!((c.norm() - 1.0).abs() < 1e-13);
            } else {
                assert!(c.norm() < 1e-13, "mode {j} = {c}");
            }
        }
        let expected = k1 * k1 * 8.0;
        assert!((gradient_norm_sq(&f) - expected).abs() < 1e-11 * expected);
    }

    #[test]
    fn round_trip_is_identity_in_every_dimension() {
        for dim in 1..=3 {
            let g = Grid::shared(dim, 16, 2.0).unwrap();
            let f = random_field(g, dim as u64);
            let back = inverse_transform(&forward_transform(&f));
            let scale = f.max_modulus();
            let err = f
                .values
                .iter()
                .zip(&back.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12 * scale, "dim {dim}: {err}");
        }
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        let g = Grid::shared(2, 32, 3.0).unwrap();
        let f = random_field(g, 7);
        let phys = f.mass();
        let spec = forward_transform(&f).mass();
        assert!((phys - spec).abs() < 1e-10 * phys);
    }

    #[test]
    fn constant_field_norms() {
        let g = Grid::shared(1, 32, 3.0).unwrap();
        let f = Field::from_fn(g, |_| c(1.0));
        assert!((norms(&f, 2.0).unwrap() - 6f64.sqrt()).abs() < 1e-13);
        assert!((norms(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!(gradient_norm_sq(&f).abs() < 1e-24);
        assert!(norms(&f, 0.5).is_err());
    }

    #[test]
    fn non_finite_field_is_numeric_error() {
        let g = Grid::shared(1, 16, 1.0).unwrap();
        let mut f = Field::zeros(g);
        f.values[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(norms(&f, 2.0), Err(Error::Numeric(_))));
    }

    // Reference values: ∫2sech² = 4, ∫4sech⁴ = 16/3, ∫2sech²tanh² = 4/3.
    #[test]
    fn sech_integrals() {
        let g = Grid::shared(1, 1024, 40.0).unwrap();
        let f = Field::from_fn(g, |x| c(2f64.sqrt() * sech(x[0])));
        assert!((norms(&f, 2.0).unwrap() - 2.0).abs() < 1e-8);
        let l4 = norms(&f, 4.0).unwrap();
        assert!((l4 - (16.0f64 / 3.0).powf(0.25)).abs() < 1e-8);
        assert!((gradient_norm_sq(&f) - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_second_moment() {
        let g = Grid::shared(1, 256, 16.0).unwrap();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp()));
        let m = weighted_variance(&f);
        assert!((m.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
        assert!(!m.truncated);
        assert_eq!(weighted_variance(&Field::zeros(f.grid.clone())).value, 0.0);
    }

    #[test]
    fn translated_moment_grows_by_shift_times_mass() {
        let g = Grid::shared(1, 512, 24.0).unwrap();
        let x0 = 1.5;
        let f = Field::from_fn(g.clone(), |x| c((-x[0] * x[0] / 2.0).exp()));
        let shifted = Field::from_fn(g, |x| c((-(x[0] - x0).powi(2) / 2.0).exp()));
        let expected = weighted_variance(&f).value + x0 * x0 * f.mass();
        assert!((weighted_variance(&shifted).value - expected).abs() < 1e-10);
    }

    #[test]
    fn truncation_flag_raised_near_boundary() {
        let g = Grid::shared(1, 128, 4.0).unwrap();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 8.0).exp()));
        assert!(weighted_variance(&f).truncated);
    }

    #[test]
    fn v_vanishes_for_real_and_symmetric_data() {
        let g = Grid::shared(1, 256, 16.0).unwrap();
        let real = Field::from_fn(g.clone(), |x| c(sech(x[0]) * (1.0 + 0.3 * x[0])));
        assert!(v_functional(&real).value.abs() < 1e-14);
        let boosted = Field::from_fn(g.clone(), |x| {
            Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), 1.3 * x[0])
        });
        assert!(v_functional(&boosted).value.abs() < 1e-12);
        assert_eq!(v_functional(&Field::zeros(g)).value, 0.0);
    }

    // Free Gaussian (1+2it)^{-1/2} exp(-x²/(2(1+2it))): K(t) = (√π/2)(1+4t²),
    // and dK/dt = 4V gives V(t) = √π t.
    #[test]
    fn v_of_spreading_gaussian_matches_closed_form() {
        let g = Grid::shared(1, 512, 24.0).unwrap();
        let t = 0.5;
        let f = Field::from_fn(g, |x| {
            let z = Complex64::new(1.0, 2.0 * t);
            (-(x[0] * x[0]) / (2.0 * z)).exp() / z.sqrt()
        });
        let v = v_functional(&f).value;
        assert!((v - std::f64::consts::PI.sqrt() * t).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gradient_norm_is_zero_only_for_constants() {
        let g = Grid::shared(2, 16, 2.0).unwrap();
        let f = Field::from_fn(g.clone(), |_| Complex64::new(0.3, -1.2));
        assert!(gradient_norm_sq(&f) < 1e-12);
        let bumped = Field::from_fn(g, |x| Complex64::new(0.3 + 1e-3 * x[1].sin(), -1.2));
        assert!(gradient_norm_sq(&bumped) > 1e-12);
    }

    #[test]
    fn w1_norm_of_sech() {
        let g = Grid::shared(1, 1024, 40.0).unwrap();
        let f = Field::from_fn(g, |x| c(sech(x[0])));
        // ‖sech‖₂ = √2, ‖sech tanh‖₂ = √(2/3)
        let w = sobolev_w1_norm(&f, 2.0).unwrap();
        assert!((w - (2f64.sqrt() + (2.0f64 / 3.0).sqrt())).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn norms_are_absolutely_homogeneous(alpha in -5.0f64..5.0, q in 1.0f64..6.0, seed in 0u64..1000) {
            let g = Grid::shared(1, 32, 2.0).unwrap();
            let f = random_field(g, seed);
            let base = norms(&f, q).unwrap();
            let scaled = norms(&f.scaled(alpha), q).unwrap();
            prop_assert!((scaled - alpha.abs() * base).abs() <= 1e-12 * (1.0 + alpha.abs() * base));
        }

        #[test]
        fn parseval_for_any_seed(seed in 0u64..10_000) {
            let g = Grid::shared(1, 64, 3.0).unwrap();
            let f = random_field(g, seed);
            let phys = f.mass();
            prop_assert!((phys - forward_transform(&f).mass()).abs() < 1e-10 * phys);
        }
    }
}
