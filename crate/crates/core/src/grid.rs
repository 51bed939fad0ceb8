//! Periodic grids, grid functions and their discrete Fourier transforms.
//!
//! The torus `[0, L)^n` is sampled at `N` points per axis with spacing
//! `h = L / N`. Lattice frequencies are `xi = 2 pi k / L` with integer
//! `k` in `(-N/2, N/2]`, stored in the usual FFT order (index `i` maps to
//! `k = i` for `i <= N/2` and `k = i - N` otherwise).
//!
//! The transform is the unitary DFT, `F[k] = N^{-n/2} sum_x f[x] e^{-2 pi i k.x / N}`,
//! so Parseval holds exactly and frequency multipliers act pointwise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a periodic sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points} must be a power of two >= 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length {length} must be positive"
            )));
        }
        let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(points));
        if total.is_none() {
            return Err(Error::InvalidGrid("sample count overflows".into()));
        }
        Ok(GridSpec {
            dim,
            points,
            length,
        })
    }

    /// Grid on the torus of period `2 pi`, so lattice frequencies are integers.
    pub fn standard(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Grid spacing `h = L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Volume `h^n` of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable frequency per axis, `pi N / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// Multi-index of a flat row-major index.
    pub fn unravel(&self, mut index: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = index % self.points;
            index /= self.points;
        }
        out
    }

    /// Flat row-major index of a multi-index (coordinates reduced modulo `N`).
    pub fn ravel(&self, multi: &[isize]) -> usize {
        let n = self.points as isize;
        multi[..self.dim].iter().fold(0usize, |acc, &i| {
            acc * self.points + i.rem_euclid(n) as usize
        })
    }

    /// Signed lattice index `k` in `(-N/2, N/2]` for an FFT-ordered position.
    pub fn signed_frequency(&self, i: usize) -> i64 {
        if i <= self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Physical position of grid point `i` along one axis, wrapped into `(-L/2, L/2]`.
    pub fn coordinate(&self, i: usize) -> f64 {
        self.signed_frequency(i) as f64 * self.spacing()
    }

    /// Euclidean norm `|xi|` of the lattice frequency at every flat index.
    pub fn frequency_norms(&self) -> Vec<f64> {
        let scale = 2.0 * PI / self.length;
        (0..self.len())
            .map(|idx| {
                let m = self.unravel(idx);
                let sq: f64 = m[..self.dim]
                    .iter()
                    .map(|&i| {
                        let k = self.signed_frequency(i) as f64 * scale;
                        k * k
                    })
                    .sum();
                sq.sqrt()
            })
            .collect()
    }
}

/// Complex samples of a function on a periodic grid (physical space).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        check_samples(&spec, &samples)?;
        Ok(GridFunction { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction {
            spec,
            samples: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// Real-valued samples.
    pub fn from_real(spec: GridSpec, values: &[f64]) -> Result<Self> {
        Self::new(
            spec,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples `f(x)` at every grid point, with coordinates wrapped into `(-L/2, L/2]`.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let mut x = [0.0; 3];
        let samples = (0..spec.len())
            .map(|idx| {
                let m = spec.unravel(idx);
                for axis in 0..spec.dim {
                    x[axis] = spec.coordinate(m[axis]);
                }
                f(&x[..spec.dim])
            })
            .collect();
        Self::new(spec, samples)
    }

    /// Indicator of the closed ball `|x| <= radius` about the origin.
    pub fn ball_indicator(spec: GridSpec, radius: f64) -> Self {
        Self::from_fn(spec, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(if r2 <= radius * radius { 1.0 } else { 0.0 }, 0.0)
        })
        .expect("indicator samples are finite")
    }

    /// Plane wave `amplitude * e^{i xi.x}` for the lattice frequency `k` (in units of `2 pi / L`).
    pub fn plane_wave(spec: GridSpec, k: &[i64], amplitude: Complex64) -> Result<Self> {
        if k.len() != spec.dim {
            return Err(Error::param("wave vector length must equal grid dimension"));
        }
        let n = spec.points as f64;
        let samples = (0..spec.len())
            .map(|idx| {
                let m = spec.unravel(idx);
                let phase: f64 = (0..spec.dim)
                    .map(|a| 2.0 * PI * (k[a] as f64) * (m[a] as f64) / n)
                    .sum();
                amplitude * Complex64::from_polar(1.0, phase)
            })
            .collect();
        Self::new(spec, samples)
    }

    pub(crate) fn from_parts_unchecked(spec: GridSpec, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), spec.len());
        GridFunction { spec, samples }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Pointwise moduli `|f(x)|`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        GridFunction {
            spec: self.spec,
            samples: self.samples.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &GridFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(GridFunction {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    /// Discrete `L^p` norm `(sum |f|^p h^n)^{1/p}`; `p = inf` gives the max modulus.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let sum: f64 = self.samples.iter().map(|z| z.norm().powf(p)).sum();
        (sum * self.spec.cell_volume()).powf(1.0 / p)
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest pointwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// DFT coefficients of a grid function, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        check_samples(&spec, &coeffs)?;
        Ok(SpectralFunction { spec, coeffs })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Multiplies by a real multiplier sampled on the lattice.
    pub fn multiplied(&self, multiplier: &[f64]) -> SpectralFunction {
        debug_assert_eq!(multiplier.len(), self.coeffs.len());
        SpectralFunction {
            spec: self.spec,
            coeffs: self
                .coeffs
                .iter()
                .zip(multiplier)
                .map(|(&c, &m)| c * m)
                .collect(),
        }
    }

    /// Largest `|xi|` carrying a coefficient of modulus above `tol * max |coeff|`.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.spec
            .frequency_norms()
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm() > tol * peak)
            .map(|(k, _)| k)
            .fold(0.0, f64::max)
    }

    /// Energy `sum |F|^2` at lattice points with `|xi| > radius`, relative to the total.
    pub fn energy_above(&self, radius: f64) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outside: f64 = self
            .spec
            .frequency_norms()
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(k, _)| *k > radius * (1.0 + 1e-12))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        outside / total
    }
}

fn check_samples(spec: &GridSpec, samples: &[Complex64]) -> Result<()> {
    if samples.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            got: samples.len(),
        });
    }
    if let Some(index) = samples
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// In-place unitary n-dimensional DFT over a row-major buffer.
pub(crate) fn transform_in_place(spec: &GridSpec, data: &mut [Complex64], forward: bool) {
    let n = spec.points;
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Last axis: contiguous rows.
    fft.process_with_scratch(data, &mut scratch);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..spec.dim.saturating_sub(1) {
        let stride = n.pow((spec.dim - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
    let norm = (spec.len() as f64).sqrt().recip();
    for v in data.iter_mut() {
        *v *= norm;
    }
}

/// Unitary forward DFT.
pub fn forward_transform(f: &GridFunction) -> Result<SpectralFunction> {
    check_samples(&f.spec, &f.samples)?;
    let mut coeffs = f.samples.clone();
    transform_in_place(&f.spec, &mut coeffs, true);
    Ok(SpectralFunction {
        spec: f.spec,
        coeffs,
    })
}

/// Unitary inverse DFT.
pub fn inverse_transform(spectrum: &SpectralFunction) -> Result<GridFunction> {
    check_samples(&spectrum.spec, &spectrum.coeffs)?;
    let mut samples = spectrum.coeffs.clone();
    transform_in_place(&spectrum.spec, &mut samples, false);
    Ok(GridFunction {
        spec: spectrum.spec,
        samples,
    })
}

/// Random trigonometric polynomial with spectrum inside `{|xi| <= 2^band}`.
///
/// Coefficients are independent standard complex normals drawn from
/// `ChaCha8Rng::seed_from_u64(seed)`, visiting the lattice vectors `k` with
/// `|2 pi k / L| <= 2^band` in lexicographic order of `k`. The draw order does
/// not depend on `N`, so one seed describes the same continuum function at
/// every resolution. With `real = true` the spectrum is symmetrized,
/// `c_{-k} = conj(c_k)`. Samples are scaled to unit root-mean-square.
pub fn random_bandlimited(
    spec: GridSpec,
    band: i32,
    seed: u64,
    real: bool,
) -> Result<GridFunction> {
    let radius = 2f64.powi(band);
    let nyquist = spec.nyquist();
    if 2.0 * radius >= nyquist {
        return Err(Error::BandExceedsNyquist { band, nyquist });
    }
    let unit = 2.0 * PI / spec.length;
    let kmax = (radius / unit + 1e-9).floor() as i64;
    let dim = spec.dim;
    let side = (2 * kmax + 1) as usize;
    let mut lattice: Vec<([i64; 3], Complex64)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for flat in 0..side.pow(dim as u32) {
        let mut k = [0i64; 3];
        let mut rest = flat;
        for axis in (0..dim).rev() {
            k[axis] = (rest % side) as i64 - kmax;
            rest /= side;
        }
        let norm2: f64 = k[..dim].iter().map(|&v| (v as f64 * unit).powi(2)).sum();
        if norm2.sqrt() > radius * (1.0 + 1e-12) {
            continue;
        }
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        lattice.push((k, Complex64::new(re, im)));
    }
    if real {
        let lookup: std::collections::HashMap<[i64; 3], Complex64> =
            lattice.iter().cloned().collect();
        for (k, c) in lattice.iter_mut() {
            let mut neg = [0i64; 3];
            for a in 0..dim {
                neg[a] = -k[a];
            }
            *c = 0.5 * (*c + lookup[&neg].conj());
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); spec.len()];
    let n = spec.points as isize;
    for (k, c) in &lattice {
        let multi: Vec<isize> = k[..dim]
            .iter()
            .map(|&v| (v as isize).rem_euclid(n))
            .collect();
        coeffs[spec.ravel(&multi)] += *c;
    }
    let mut samples = coeffs;
    transform_in_place(&spec, &mut samples, false);
    let rms = (samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / spec.len() as f64).sqrt();
    if rms > 0.0 {
        for z in samples.iter_mut() {
            *z /= rms;
        }
    }
    GridFunction::new(spec, samples)
}
