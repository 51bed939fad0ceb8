//! Morrey norms by supremum over a finite family of periodic windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
pub use crate::windows::WindowShape;
use crate::windows::{strided_centers, RowPrefix, Window};

/// Exponents `1 < q <= p < inf` of a Morrey space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LebesguePair {
    p: f64,
    q: f64,
}

impl LebesguePair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::param("p and q must be finite"));
        }
        if q <= 1.0 {
            return Err(Error::param(format!("q > 1 (got q = {q})")));
        }
        if q > p {
            return Err(Error::param(format!("q <= p (got q = {q}, p = {p})")));
        }
        Ok(LebesguePair { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The window-volume exponent `1/p - 1/q`.
    pub fn volume_exponent(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }
}

/// Finite set of window radii and centers standing in for all balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSampler {
    radii: Vec<f64>,
    center_stride: usize,
    shape: WindowShape,
}

impl BallSampler {
    pub fn new(radii: Vec<f64>, center_stride: usize, shape: WindowShape) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::EmptySampler);
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::param("window radii must be positive and finite"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("window radii must be strictly increasing"));
        }
        if center_stride == 0 {
            return Err(Error::param("center stride must be positive"));
        }
        Ok(BallSampler {
            radii,
            center_stride,
            shape,
        })
    }

    /// Radii `h * 2^m` for `m = 0 ..= log2(N/2)`, all centers.
    pub fn dyadic(spec: &GridSpec, shape: WindowShape) -> Self {
        let h = spec.spacing();
        let radii = std::iter::successors(Some(1usize), |m| Some(m * 2))
            .take_while(|&m| m <= spec.points() / 2)
            .map(|m| m as f64 * h)
            .collect();
        BallSampler {
            radii,
            center_stride: 1,
            shape,
        }
    }

    /// Radii `m * h` for `m = 1 ..= N/2`, all centers.
    pub fn linear(spec: &GridSpec, shape: WindowShape) -> Self {
        let h = spec.spacing();
        BallSampler {
            radii: (1..=spec.points() / 2).map(|m| m as f64 * h).collect(),
            center_stride: 1,
            shape,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::param("center stride must be positive"));
        }
        self.center_stride = stride;
        Ok(self)
    }

    /// Union of both radius sets; the stride is the finer of the two.
    pub fn merged(&self, other: &BallSampler) -> Result<Self> {
        let mut radii: Vec<f64> = self.radii.iter().chain(&other.radii).copied().collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        let stride = gcd(self.center_stride, other.center_stride);
        BallSampler::new(radii, stride, self.shape)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn center_stride(&self) -> usize {
        self.center_stride
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        let half = spec.length() / 2.0;
        if let Some(&r) = self.radii.last() {
            if r > half * (1.0 + 1e-12) {
                return Err(Error::param(format!(
                    "max window radius <= L/2 (got {r}, L/2 = {half})"
                )));
            }
        }
        if !spec.points().is_multiple_of(self.center_stride) {
            return Err(Error::param(format!(
                "center stride divides N (stride {}, N {})",
                self.center_stride,
                spec.points()
            )));
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The window attaining a sampled Morrey supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorreyWitness {
    pub value: f64,
    pub radius: f64,
    pub center: usize,
}

/// Morrey norm of `|f|`.
pub fn morrey_norm(f: &GridFunction, pq: LebesguePair, sampler: &BallSampler) -> Result<f64> {
    morrey_norm_of_magnitudes(f.spec(), &f.magnitudes(), pq, sampler)
}

/// Morrey norm of a nonnegative sample array.
pub fn morrey_norm_of_magnitudes(
    spec: &GridSpec,
    magnitudes: &[f64],
    pq: LebesguePair,
    sampler: &BallSampler,
) -> Result<f64> {
    Ok(morrey_scan(spec, magnitudes, pq, sampler)?.value)
}

/// Full scan returning the maximizing window.
pub fn morrey_scan(
    spec: &GridSpec,
    magnitudes: &[f64],
    pq: LebesguePair,
    sampler: &BallSampler,
) -> Result<MorreyWitness> {
    sampler.validate(spec)?;
    if magnitudes.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            got: magnitudes.len(),
        });
    }
    if let Some(index) = magnitudes.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let q = pq.q();
    let powered: Vec<f64> = magnitudes.iter().map(|v| v.abs().powf(q)).collect();
    let prefix = RowPrefix::new(spec, &powered);
    let centers = strided_centers(spec, sampler.center_stride());
    let cell = spec.cell_volume();
    let per_radius: Vec<MorreyWitness> = sampler
        .radii()
        .par_iter()
        .map(|&radius| {
            let window = Window::new(spec, sampler.shape(), radius);
            let scale = window.volume().powf(pq.volume_exponent());
            let sums = window.sums(spec, &prefix, &centers);
            let (best, sum) =
                sums.iter()
                    .enumerate()
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
                    );
            MorreyWitness {
                value: scale * (sum * cell).powf(1.0 / q),
                radius,
                center: centers[best],
            }
        })
        .collect();
    Ok(per_radius
        .into_iter()
        .fold(None::<MorreyWitness>, |acc, w| match acc {
            Some(a) if a.value >= w.value => Some(a),
            _ => Some(w),
        })
        .expect("sampler is nonempty"))
}

/// Pointwise `(sum_j |w_j f_j|^r)^(1/r)`, or the pointwise max when `r` is infinite.
#[derive(Debug, Clone)]
pub struct LrAccumulator {
    r: f64,
    acc: Vec<f64>,
}

impl LrAccumulator {
    pub fn new(len: usize, r: f64) -> Self {
        LrAccumulator {
            r,
            acc: vec![0.0; len],
        }
    }

    pub fn add(&mut self, magnitudes: &[f64], weight: f64) {
        let w = weight.abs();
        if self.r.is_infinite() {
            for (a, &m) in self.acc.iter_mut().zip(magnitudes) {
                *a = a.max(w * m);
            }
        } else {
            for (a, &m) in self.acc.iter_mut().zip(magnitudes) {
                *a += (w * m).powf(self.r);
            }
        }
    }

    /// Current aggregate without consuming the accumulator.
    pub fn value(&self) -> Vec<f64> {
        if self.r.is_infinite() {
            self.acc.clone()
        } else {
            let inv = 1.0 / self.r;
            self.acc.iter().map(|a| a.powf(inv)).collect()
        }
    }

    pub fn finish(self) -> Vec<f64> {
        self.value()
    }
}

/// Morrey norm of the pointwise weighted `l^r` aggregate of `fs`.
pub fn morrey_norm_vector(
    fs: &[GridFunction],
    weights: &[f64],
    r: f64,
    pq: LebesguePair,
    sampler: &BallSampler,
) -> Result<f64> {
    let first = fs.first().ok_or(Error::EmptySequence)?;
    if weights.len() != fs.len() {
        return Err(Error::LengthMismatch {
            expected: fs.len(),
            got: weights.len(),
        });
    }
    if !(r > 1.0) {
        return Err(Error::param(format!("r > 1 (got r = {r})")));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::param("weights must be finite"));
    }
    let spec = first.spec();
    let mut acc = LrAccumulator::new(spec.len(), r);
    for (f, &w) in fs.iter().zip(weights) {
        if f.spec() != spec {
            return Err(Error::SpecMismatch);
        }
        acc.add(&f.magnitudes(), w);
    }
    morrey_norm_of_magnitudes(spec, &acc.finish(), pq, sampler)
}
