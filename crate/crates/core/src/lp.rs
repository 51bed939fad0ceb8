//! Smooth dyadic partitions of unity in frequency and the projections `phi_j(D)`.
//!
//! The radial profile is the mollifier step
//! `g(t) = eta(3 - t) / (eta(3 - t) + eta(t - 2))` with `eta(t) = exp(-c / t)`
//! for `t > 0` and `0` otherwise, so `g = 1` on `t <= 2` and `g = 0` on `t >= 3`.
//!
//! * plain flavor: `phi_0 = g(|xi|)`, `phi_j = g(2^-j |xi|) - g(2^{1-j} |xi|)`;
//! * square-root flavor: `phi_0 = sqrt(g(|xi|))`,
//!   `phi_j = sqrt(g(2^-j |xi|) - g(2^{1-j} |xi|))`, so that `sum phi_j^2 = 1`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, GridFunction, GridSpec, SpectralFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `sum_j phi_j = 1`.
    Plain,
    /// `sum_j phi_j^2 = 1`, with `phi_j >= 0`.
    SquareRoot,
}

/// Closed-form smooth step used to build the bump `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    sharpness: f64,
    flavor: Flavor,
}

fn eta(t: f64, c: f64) -> f64 {
    if t > 0.0 {
        (-c / t).exp()
    } else {
        0.0
    }
}

impl BumpProfile {
    pub fn new(flavor: Flavor) -> Self {
        BumpProfile {
            sharpness: 1.0,
            flavor,
        }
    }

    /// Profile with `eta(t) = exp(-c / t)`; every `c > 0` gives an admissible bump.
    pub fn with_sharpness(flavor: Flavor, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("profile sharpness must be positive"));
        }
        Ok(BumpProfile {
            sharpness: c,
            flavor,
        })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// The step `g(t)`: 1 on `[0, 2]`, 0 on `[3, inf)`, smooth and decreasing in between.
    pub fn step(&self, t: f64) -> f64 {
        if t <= 2.0 {
            return 1.0;
        }
        if t >= 3.0 {
            return 0.0;
        }
        let a = eta(3.0 - t, self.sharpness);
        let b = eta(t - 2.0, self.sharpness);
        a / (a + b)
    }

    /// `phi_0` evaluated at radius `t = |xi|`.
    pub fn bump(&self, t: f64) -> f64 {
        match self.flavor {
            Flavor::Plain => self.step(t),
            Flavor::SquareRoot => self.step(t).sqrt(),
        }
    }

    /// `phi_j` evaluated at radius `t = |xi|`.
    pub fn dyadic(&self, j: usize, t: f64) -> f64 {
        if j == 0 {
            return self.bump(t);
        }
        let scale = 2f64.powi(-(j as i32));
        let diff = self.step(t * scale) - self.step(2.0 * t * scale);
        match self.flavor {
            Flavor::Plain => diff,
            Flavor::SquareRoot => diff.max(0.0).sqrt(),
        }
    }
}

/// Multipliers `phi_0 .. phi_{J_max}` sampled on the frequency lattice of a grid.
#[derive(Debug, Clone)]
pub struct LpFamily {
    spec: GridSpec,
    profile: BumpProfile,
    multipliers: Vec<Vec<f64>>,
    altered: bool,
}

impl LpFamily {
    pub fn build(spec: GridSpec, j_max: usize, flavor: Flavor) -> Result<Self> {
        Self::with_profile(spec, j_max, BumpProfile::new(flavor))
    }

    pub fn with_profile(spec: GridSpec, j_max: usize, profile: BumpProfile) -> Result<Self> {
        if 2f64.powi(j_max as i32 + 1) > spec.nyquist() * (1.0 + 1e-12) {
            return Err(Error::BandExceedsNyquist {
                band: j_max as i32 + 1,
                nyquist: spec.nyquist(),
            });
        }
        let norms = spec.frequency_norms();
        let multipliers = (0..=j_max)
            .map(|j| norms.iter().map(|&t| profile.dyadic(j, t)).collect())
            .collect();
        Ok(LpFamily {
            spec,
            profile,
            multipliers,
            altered: false,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    pub fn flavor(&self) -> Flavor {
        self.profile.flavor
    }

    pub fn j_max(&self) -> usize {
        self.multipliers.len() - 1
    }

    /// Radius `2^{J_max + 1}` inside which the truncated partition is exact.
    pub fn covered_radius(&self) -> f64 {
        2f64.powi(self.j_max() as i32 + 1)
    }

    pub fn multiplier(&self, j: usize) -> Result<&[f64]> {
        self.multipliers
            .get(j)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: j,
                max: self.j_max(),
            })
    }

    /// Same family with multiplier `j` replaced by zero; used for fault injection.
    pub fn with_multiplier_zeroed(mut self, j: usize) -> Result<Self> {
        let max = self.j_max();
        let m = self
            .multipliers
            .get_mut(j)
            .ok_or(Error::IndexOutOfRange { index: j, max })?;
        m.iter_mut().for_each(|v| *v = 0.0);
        self.altered = true;
        Ok(self)
    }

    fn check_spec(&self, f: &GridFunction) -> Result<()> {
        if f.spec() != &self.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    /// `phi_j(D) f`.
    pub fn project(&self, j: usize, f: &GridFunction) -> Result<GridFunction> {
        self.check_spec(f)?;
        let m = self.multiplier(j)?;
        let spectrum = grid::forward_transform(f)?;
        grid::inverse_transform(&spectrum.multiplied(m))
    }

    /// All blocks `phi_0(D) f, ..., phi_{J_max}(D) f` from a single forward transform.
    pub fn decompose(&self, f: &GridFunction) -> Result<Vec<GridFunction>> {
        self.check_spec(f)?;
        let spectrum = grid::forward_transform(f)?;
        self.decompose_spectrum(&spectrum)
    }

    pub(crate) fn decompose_spectrum(
        &self,
        spectrum: &SpectralFunction,
    ) -> Result<Vec<GridFunction>> {
        self.multipliers
            .iter()
            .map(|m| grid::inverse_transform(&spectrum.multiplied(m)))
            .collect()
    }

    /// Sum over `j <= n_terms` of `phi_j` (plain) or `phi_j^2` (square-root flavor).
    ///
    /// Both telescope to `g(2^{-n} |xi|)`, which is exactly 1 inside the covered ball.
    pub(crate) fn partial_multiplier(&self, n_terms: usize) -> Vec<f64> {
        if !self.altered {
            let scale = 2f64.powi(-(n_terms as i32));
            return self
                .spec
                .frequency_norms()
                .iter()
                .map(|&t| self.profile.step(t * scale))
                .collect();
        }
        let mut acc = vec![0.0; self.spec.len()];
        for m in &self.multipliers[..=n_terms] {
            for (a, &v) in acc.iter_mut().zip(m) {
                *a += match self.flavor() {
                    Flavor::Plain => v,
                    Flavor::SquareRoot => v * v,
                };
            }
        }
        acc
    }

    /// Max over lattice points with `|xi| <= 2^{J_max+1}` of `|sum_j phi_j - 1|`
    /// (or `|sum_j phi_j^2 - 1|` for the square-root flavor).
    pub fn partition_residual(&self) -> f64 {
        let acc = self.partial_multiplier(self.j_max());
        let limit = self.covered_radius() * (1.0 + 1e-12);
        self.spec
            .frequency_norms()
            .iter()
            .zip(&acc)
            .filter(|(t, _)| **t <= limit)
            .map(|(_, s)| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Partial reconstruction `sum_{j <= n_terms} phi_j(D) f`; for the square-root
    /// flavor, `sum_{j <= n_terms} phi_j(D) phi_j(D) f`.
    pub fn reconstruct(&self, f: &GridFunction, n_terms: usize) -> Result<GridFunction> {
        self.check_spec(f)?;
        if n_terms > self.j_max() {
            return Err(Error::IndexOutOfRange {
                index: n_terms,
                max: self.j_max(),
            });
        }
        let spectrum = grid::forward_transform(f)?;
        grid::inverse_transform(&spectrum.multiplied(&self.partial_multiplier(n_terms)))
    }

    /// Applies `sum_j phi_j(D) h_j` for pointwise-defined inputs `h_j`, one per block.
    pub(crate) fn synthesize(&self, inputs: &[Vec<Complex64>]) -> GridFunction {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.spec.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.spec.len()];
        for (h, m) in inputs.iter().zip(&self.multipliers) {
            buf.copy_from_slice(h);
            grid::transform_in_place(&self.spec, &mut buf, true);
            for ((a, b), &w) in acc.iter_mut().zip(&buf).zip(m) {
                *a += b * w;
            }
        }
        grid::transform_in_place(&self.spec, &mut acc, false);
        GridFunction::from_parts_unchecked(self.spec, acc)
    }

    /// CSV dump of `(j, lattice index, multiplier value)` for debugging.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("j,index,value\n");
        for (j, m) in self.multipliers.iter().enumerate() {
            for (i, v) in m.iter().enumerate() {
                let _ = writeln!(out, "{j},{i},{v}");
            }
        }
        out
    }
}
