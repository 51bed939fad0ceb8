//! Discrete Hardy-Littlewood maximal operator and the vector-valued
//! inequalities it controls.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::lp::LpFamily;
use crate::morrey::{
    morrey_norm_of_magnitudes, BallSampler, LebesguePair, LrAccumulator, WindowShape,
};
use crate::report::ratio;
use crate::smoothness::check_band_coverage;
use crate::windows::{RowMaxTable, RowPrefix, Window};

/// Window family of the maximal operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalConfig {
    shape: WindowShape,
    radii: Vec<f64>,
    /// Only windows centered at the evaluation point when set.
    centered: bool,
}

impl MaximalConfig {
    pub fn new(shape: WindowShape, radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::EmptySampler);
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::param("window radii must be positive and finite"));
        }
        Ok(MaximalConfig {
            shape,
            radii,
            centered: false,
        })
    }

    /// Same shape and radii as a Morrey sampler.
    pub fn from_sampler(sampler: &BallSampler) -> Self {
        MaximalConfig {
            shape: sampler.shape(),
            radii: sampler.radii().to_vec(),
            centered: false,
        }
    }

    pub fn centered(mut self, centered: bool) -> Self {
        self.centered = centered;
        self
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }
}

/// `Mf(x)`: the largest average of `|f|` over a sampled window containing `x`.
///
/// Averages divide by the number of covered grid points, so constants are
/// reproduced exactly. The single-cell window is always included.
pub fn hl_maximal(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    let m = hl_maximal_of_magnitudes(f.spec(), &f.magnitudes(), cfg)?;
    GridFunction::new(
        *f.spec(),
        m.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

pub fn hl_maximal_of_magnitudes(
    spec: &GridSpec,
    magnitudes: &[f64],
    cfg: &MaximalConfig,
) -> Result<Vec<f64>> {
    if magnitudes.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            got: magnitudes.len(),
        });
    }
    if let Some(index) = magnitudes.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if let Some(&r) = cfg
        .radii
        .iter()
        .find(|&&r| r > spec.length() / 2.0 * (1.0 + 1e-12))
    {
        return Err(Error::param(format!("max window radius <= L/2 (got {r})")));
    }
    let values: Vec<f64> = magnitudes.iter().map(|v| v.abs()).collect();
    let prefix = RowPrefix::new(spec, &values);
    let all: Vec<usize> = (0..spec.len()).collect();
    let n = spec.points();
    let per_radius: Vec<Vec<f64>> = cfg
        .radii
        .par_iter()
        .map(|&radius| {
            let window = Window::new(spec, cfg.shape, radius);
            let count = window.count() as f64;
            let averages: Vec<f64> = window
                .sums(spec, &prefix, &all)
                .into_iter()
                .map(|s| s / count)
                .collect();
            if cfg.centered {
                averages
            } else {
                // The offset sets are symmetric, so the windows containing x
                // are exactly those centered inside the window around x.
                window.maxima(spec, &RowMaxTable::new(&averages, n))
            }
        })
        .collect();
    let mut out = values;
    for m in per_radius {
        for (o, v) in out.iter_mut().zip(m) {
            *o = o.max(v);
        }
    }
    Ok(out)
}

/// Both sides of a vector-valued inequality and their quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioSample {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        RatioSample {
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
        }
    }
}

fn shared_spec(fs: &[GridFunction]) -> Result<GridSpec> {
    let first = fs.first().ok_or(Error::EmptySequence)?;
    if fs.iter().any(|f| f.spec() != first.spec()) {
        return Err(Error::SpecMismatch);
    }
    Ok(*first.spec())
}

fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r <= 1.0 {
        return Err(Error::param(format!("r > 1 (got r = {r})")));
    }
    Ok(())
}

/// `||(sum_j (M f_j)^r)^{1/r}||` against `||(sum_j |f_j|^r)^{1/r}||` in `M^p_q`.
pub fn vector_maximal_ratio(
    fs: &[GridFunction],
    r: f64,
    pq: LebesguePair,
    cfg: &MaximalConfig,
    sampler: &BallSampler,
) -> Result<RatioSample> {
    check_r(r)?;
    let spec = shared_spec(fs)?;
    let maximal: Vec<Vec<f64>> = fs
        .par_iter()
        .map(|f| hl_maximal_of_magnitudes(&spec, &f.magnitudes(), cfg))
        .collect::<Result<_>>()?;
    let mut left = LrAccumulator::new(spec.len(), r);
    let mut right = LrAccumulator::new(spec.len(), r);
    for (f, m) in fs.iter().zip(&maximal) {
        left.add(m, 1.0);
        right.add(&f.magnitudes(), 1.0);
    }
    let lhs = morrey_norm_of_magnitudes(&spec, &left.finish(), pq, sampler)?;
    let rhs = morrey_norm_of_magnitudes(&spec, &right.finish(), pq, sampler)?;
    Ok(RatioSample::new(lhs, rhs))
}

/// Projection stability with `gs[i]` playing the role of `g_{J+i}`:
/// `||(sum_{l>=1} |phi_l(D) sum_j phi_j(D) g_j|^r)^{1/r}||` against
/// `||(sum_j |g_j|^r)^{1/r}||` in `M^p_q`.
///
/// Requires `J + gs.len() <= J_max` so every block `l <= j + 1` is represented.
pub fn projection_stability_ratio(
    gs: &[GridFunction],
    family: &LpFamily,
    r: f64,
    pq: LebesguePair,
    sampler: &BallSampler,
    j_start: usize,
) -> Result<RatioSample> {
    check_r(r)?;
    let spec = shared_spec(gs)?;
    if &spec != family.spec() {
        return Err(Error::SpecMismatch);
    }
    if j_start < 1 {
        return Err(Error::param("J >= 1"));
    }
    if j_start + gs.len() > family.j_max() {
        return Err(Error::param(format!(
            "J + number of functions <= J_max (J = {j_start}, {} functions, J_max = {})",
            gs.len(),
            family.j_max()
        )));
    }
    let mut combined = GridFunction::zeros(spec);
    let mut right = LrAccumulator::new(spec.len(), r);
    for (i, g) in gs.iter().enumerate() {
        combined = combined.add(&family.project(j_start + i, g)?)?;
        right.add(&g.magnitudes(), 1.0);
    }
    check_band_coverage(&combined, family)?;
    let blocks = family.decompose(&combined)?;
    let mut left = LrAccumulator::new(spec.len(), r);
    for b in &blocks[1..] {
        left.add(&b.magnitudes(), 1.0);
    }
    let lhs = morrey_norm_of_magnitudes(&spec, &left.finish(), pq, sampler)?;
    let rhs = morrey_norm_of_magnitudes(&spec, &right.finish(), pq, sampler)?;
    Ok(RatioSample::new(lhs, rhs))
}

/// `max_x |phi_l(D) f|(x) / Mf(x)` over points where `Mf > 0`.
pub fn projection_maximal_ratio(
    f: &GridFunction,
    family: &LpFamily,
    l: usize,
    cfg: &MaximalConfig,
) -> Result<f64> {
    let block = family.project(l, f)?.magnitudes();
    let m = hl_maximal_of_magnitudes(f.spec(), &f.magnitudes(), cfg)?;
    Ok(block
        .iter()
        .zip(&m)
        .filter(|(_, &mv)| mv > 0.0)
        .map(|(b, mv)| b / mv)
        .fold(0.0, f64::max))
}
