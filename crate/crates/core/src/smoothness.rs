//! Square functions and Triebel-Lizorkin-Morrey norms built on a
//! Littlewood-Paley family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, GridFunction, GridSpec, SpectralFunction};
use crate::lp::LpFamily;
use crate::morrey::{morrey_norm_of_magnitudes, BallSampler, LebesguePair, LrAccumulator};

/// Relative spectral energy allowed beyond the covered radius of a family.
pub const COVERAGE_TOLERANCE: f64 = 1e-10;

/// Exponents `(p, q, r, s)` with `1 < q <= p < inf`, `1 < r <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pq: LebesguePair,
    r: f64,
    s: f64,
}

impl SpaceParams {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        let pq = LebesguePair::new(p, q)?;
        if r.is_nan() || r <= 1.0 {
            return Err(Error::param(format!("r > 1 (got r = {r})")));
        }
        if !s.is_finite() {
            return Err(Error::param("s must be finite"));
        }
        Ok(SpaceParams { pq, r, s })
    }

    pub fn pq(&self) -> LebesguePair {
        self.pq
    }

    pub fn p(&self) -> f64 {
        self.pq.p()
    }

    pub fn q(&self) -> f64 {
        self.pq.q()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Indicator window `[a, 1/a]` and tail start `J` of the truncated square function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareFnConfig {
    a: f64,
    j: usize,
}

impl SquareFnConfig {
    pub fn new(a: f64, j: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param(format!("0 < a < 1 (got a = {a})")));
        }
        Ok(SquareFnConfig { a, j })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

/// Coefficients below this fraction of the spectral l^2 norm are transform
/// round-off and are zeroed before splitting into blocks, so that blocks
/// outside the true support vanish exactly.
pub const SPECTRAL_FLOOR: f64 = 1e-13;

/// Fails unless the spectrum of `f` lies inside the radius where the family sums to one.
pub fn check_band_coverage(f: &GridFunction, family: &LpFamily) -> Result<()> {
    coverage_of(&forward_transform(f)?, family)
}

fn coverage_of(spectrum: &SpectralFunction, family: &LpFamily) -> Result<()> {
    if spectrum.spec() != family.spec() {
        return Err(Error::SpecMismatch);
    }
    let limit = family.covered_radius();
    let energy = spectrum.energy_above(limit);
    if energy > COVERAGE_TOLERANCE {
        return Err(Error::BandNotCovered { energy, limit });
    }
    Ok(())
}

fn floored(spectrum: SpectralFunction) -> Result<SpectralFunction> {
    let norm = spectrum
        .coeffs()
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let cut = SPECTRAL_FLOOR * norm;
    let coeffs = spectrum
        .coeffs()
        .iter()
        .map(|&c| {
            if c.norm() <= cut {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
        .collect();
    SpectralFunction::new(*spectrum.spec(), coeffs)
}

/// Blocks `phi_j(D) f` of a covered `f`, with transform round-off removed.
pub(crate) fn clean_blocks(f: &GridFunction, family: &LpFamily) -> Result<Vec<GridFunction>> {
    let spectrum = forward_transform(f)?;
    coverage_of(&spectrum, family)?;
    family.decompose_spectrum(&floored(spectrum)?)
}

/// Moduli `|phi_j(D) f|` for `j = 0 ..= J_max`, computed once and reused.
#[derive(Debug, Clone)]
pub struct Blocks {
    spec: GridSpec,
    magnitudes: Vec<Vec<f64>>,
}

impl Blocks {
    pub fn new(f: &GridFunction, family: &LpFamily) -> Result<Self> {
        Self::from_spectrum(forward_transform(f)?, family)
    }

    pub(crate) fn from_spectrum(spectrum: SpectralFunction, family: &LpFamily) -> Result<Self> {
        coverage_of(&spectrum, family)?;
        let magnitudes = family
            .decompose_spectrum(&floored(spectrum)?)?
            .iter()
            .map(GridFunction::magnitudes)
            .collect();
        Ok(Blocks {
            spec: *family.spec(),
            magnitudes,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn block(&self, j: usize) -> &[f64] {
        &self.magnitudes[j]
    }

    /// `(sum_{j in lo..=hi} |2^{js} phi_j(D) f|^r)^{1/r}`; empty ranges give 0.
    pub fn aggregate(&self, r: f64, s: f64, lo: usize, hi: usize) -> Vec<f64> {
        let mut acc = LrAccumulator::new(self.spec.len(), r);
        for j in lo..=hi.min(self.len() - 1) {
            acc.add(&self.magnitudes[j], 2f64.powf(j as f64 * s));
        }
        acc.finish()
    }

    /// The norm `||phi_0(D) f|| + ||(sum_{j>=1} 2^{jrs}|phi_j(D) f|^r)^{1/r}||` in `M^p_q`.
    pub fn tlm_norm(&self, params: SpaceParams, sampler: &BallSampler) -> Result<f64> {
        let low = morrey_norm_of_magnitudes(&self.spec, &self.magnitudes[0], params.pq(), sampler)?;
        if self.len() < 2 {
            return Ok(low);
        }
        let tail = self.aggregate(params.r(), params.s(), 1, self.len() - 1);
        Ok(low + morrey_norm_of_magnitudes(&self.spec, &tail, params.pq(), sampler)?)
    }
}

fn real_function(spec: &GridSpec, values: Vec<f64>) -> GridFunction {
    GridFunction::from_parts_unchecked(
        *spec,
        values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// `S(f; r, s) = (sum_j |2^{js} phi_j(D) f|^r)^{1/r}`, truncated at `J_max`.
pub fn square_function(
    f: &GridFunction,
    family: &LpFamily,
    r: f64,
    s: f64,
) -> Result<GridFunction> {
    check_exponent(r)?;
    let blocks = Blocks::new(f, family)?;
    Ok(real_function(
        f.spec(),
        blocks.aggregate(r, s, 0, family.j_max()),
    ))
}

/// `chi_{[a, 1/a]}(S(f; r, s)) * (sum_{j>=J} |2^{js} phi_j(D) f|^r)^{1/r}`.
pub fn truncated_square_function(
    f: &GridFunction,
    family: &LpFamily,
    r: f64,
    s: f64,
    cfg: SquareFnConfig,
) -> Result<GridFunction> {
    check_exponent(r)?;
    let blocks = Blocks::new(f, family)?;
    Ok(real_function(
        f.spec(),
        truncated_from_blocks(&blocks, r, s, cfg),
    ))
}

pub(crate) fn truncated_from_blocks(
    blocks: &Blocks,
    r: f64,
    s: f64,
    cfg: SquareFnConfig,
) -> Vec<f64> {
    let top = blocks.len() - 1;
    let full = blocks.aggregate(r, s, 0, top);
    if cfg.j() > top {
        return vec![0.0; full.len()];
    }
    let tail = blocks.aggregate(r, s, cfg.j(), top);
    let (lo, hi) = (cfg.a(), 1.0 / cfg.a());
    full.iter()
        .zip(tail)
        .map(|(&v, t)| if v >= lo && v <= hi { t } else { 0.0 })
        .collect()
}

/// `||f||` in the Triebel-Lizorkin-Morrey space with the given exponents.
pub fn tlm_norm(
    f: &GridFunction,
    family: &LpFamily,
    params: SpaceParams,
    sampler: &BallSampler,
) -> Result<f64> {
    Blocks::new(f, family)?.tlm_norm(params, sampler)
}

/// `V_nu(f) = (sum_{j=0}^{nu} |2^{js} phi_j(D) f|^r)^{1/r}`.
pub fn partial_square(
    f: &GridFunction,
    family: &LpFamily,
    r: f64,
    s: f64,
    nu: usize,
) -> Result<GridFunction> {
    check_exponent(r)?;
    if nu > family.j_max() {
        return Err(Error::IndexOutOfRange {
            index: nu,
            max: family.j_max(),
        });
    }
    let blocks = Blocks::new(f, family)?;
    Ok(real_function(f.spec(), blocks.aggregate(r, s, 0, nu)))
}

/// Norm of `f - sum_{j<=n} phi_j(D) f` (the family's own reconstruction rule).
///
/// The remainder is formed in frequency space, so it vanishes exactly when the
/// spectrum of `f` lies where the partial sum of the partition equals 1.
pub fn diamond_tail(
    f: &GridFunction,
    family: &LpFamily,
    params: SpaceParams,
    sampler: &BallSampler,
    n: usize,
) -> Result<f64> {
    Blocks::from_spectrum(remainder_spectrum(f, family, n)?, family)?.tlm_norm(params, sampler)
}

fn remainder_spectrum(f: &GridFunction, family: &LpFamily, n: usize) -> Result<SpectralFunction> {
    if n > family.j_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: family.j_max(),
        });
    }
    if f.spec() != family.spec() {
        return Err(Error::SpecMismatch);
    }
    let spectrum = forward_transform(f)?;
    coverage_of(&spectrum, family)?;
    let keep: Vec<f64> = family
        .partial_multiplier(n)
        .iter()
        .map(|m| 1.0 - m)
        .collect();
    Ok(floored(spectrum)?.multiplied(&keep))
}

/// `(sum_{j <= n} phi_j(D) f, remainder)`, both formed on the floored spectrum.
pub fn partial_split(
    f: &GridFunction,
    family: &LpFamily,
    n: usize,
) -> Result<(GridFunction, GridFunction)> {
    let high = remainder_spectrum(f, family, n)?;
    let low = floored(forward_transform(f)?)?.multiplied(&family.partial_multiplier(n));
    Ok((inverse_transform(&low)?, inverse_transform(&high)?))
}

/// `f - sum_{j <= n} phi_j(D) f` formed on the spectrum, so that no cancellation
/// noise appears outside the band of `f`.
pub fn partial_remainder(f: &GridFunction, family: &LpFamily, n: usize) -> Result<GridFunction> {
    inverse_transform(&remainder_spectrum(f, family, n)?)
}

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r <= 1.0 {
        return Err(Error::param(format!("r > 1 (got r = {r})")));
    }
    Ok(())
}

/// Tail norms `J -> ||S(f; a, J, r, s)||` for one indicator window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamondSequence {
    pub a: f64,
    pub j: Vec<usize>,
    pub norms: Vec<f64>,
}

/// Evidence about membership in the diamond subspace at the grid's resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiamondVerdict {
    /// Every tail sequence reaches zero (to tolerance) at the largest sampled `J`.
    ConsistentWithMembership,
    /// Some tail stays away from zero at the largest sampled `J`.
    NotDecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamondReport {
    pub params: SpaceParams,
    pub sequences: Vec<DiamondSequence>,
    /// Threshold applied to the last entry of each sequence.
    pub tolerance: f64,
    pub verdict: DiamondVerdict,
}

/// Relative threshold used by [`diamond_criterion`], scaled by the norm of `f`.
pub const DIAMOND_TOLERANCE: f64 = 1e-10;

pub fn diamond_criterion(
    f: &GridFunction,
    family: &LpFamily,
    params: SpaceParams,
    sampler: &BallSampler,
    a_list: &[f64],
    j_list: &[usize],
) -> Result<DiamondReport> {
    if a_list.is_empty() || j_list.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut js = j_list.to_vec();
    js.sort_unstable();
    js.dedup();
    let blocks = Blocks::new(f, family)?;
    let scale = blocks.tlm_norm(params, sampler)?;
    let tolerance = DIAMOND_TOLERANCE * scale;
    let mut sequences = Vec::with_capacity(a_list.len());
    let mut decided = true;
    for &a in a_list {
        let mut norms = Vec::with_capacity(js.len());
        for &j in &js {
            let cfg = SquareFnConfig::new(a, j)?;
            let values = truncated_from_blocks(&blocks, params.r(), params.s(), cfg);
            norms.push(morrey_norm_of_magnitudes(
                blocks.spec(),
                &values,
                params.pq(),
                sampler,
            )?);
        }
        if *norms.last().unwrap() > tolerance {
            decided = false;
        }
        sequences.push(DiamondSequence {
            a,
            j: js.clone(),
            norms,
        });
    }
    Ok(DiamondReport {
        params,
        sequences,
        tolerance,
        verdict: if decided {
            DiamondVerdict::ConsistentWithMembership
        } else {
            DiamondVerdict::NotDecided
        },
    })
}

/// Sum of unimodular-block plane waves, one per dyadic annulus `j = 1 ..= J_max`,
/// scaled so that `S(f; r, s) = 1` everywhere. Every block persists to the top
/// of the family, so tail norms never vanish within the grid.
pub fn persistent_block_profile(family: &LpFamily, r: f64, s: f64) -> Result<GridFunction> {
    check_exponent(r)?;
    let spec = *family.spec();
    let unit = 2.0 * std::f64::consts::PI / spec.length();
    let j_max = family.j_max();
    let weights: Vec<f64> = (1..=j_max).map(|j| 2f64.powf(j as f64 * s)).collect();
    let level = if r.is_infinite() {
        weights.iter().copied().fold(0.0, f64::max)
    } else {
        weights.iter().map(|w| w.powf(r)).sum::<f64>().powf(1.0 / r)
    };
    let mut total = GridFunction::zeros(spec);
    for j in 1..=j_max {
        // |xi| = 1.5 * 2^j sits where phi_j = 1 and its neighbours vanish.
        let xi = 1.5 * 2f64.powi(j as i32);
        let k = (xi / unit).round();
        if ((k * unit) - xi).abs() > 1e-9 * xi {
            return Err(Error::param(
                "grid length must place 1.5 * 2^j on the frequency lattice",
            ));
        }
        let mut wave = vec![0i64; spec.dim()];
        wave[0] = k as i64;
        total = total.add(&GridFunction::plane_wave(
            spec,
            &wave,
            Complex64::new(1.0 / level, 0.0),
        )?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_bandlimited;
    use crate::lp::Flavor;
    use crate::morrey::{morrey_norm, WindowShape};

    fn setup() -> (GridSpec, LpFamily, BallSampler) {
        let spec = GridSpec::standard(1, 128).unwrap();
        let fam = LpFamily::build(spec, 5, Flavor::Plain).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        (spec, fam, sampler)
    }

    #[test]
    fn params_validation() {
        assert!(SpaceParams::new(4.0, 2.0, 2.0, 0.5).is_ok());
        assert!(SpaceParams::new(4.0, 2.0, f64::INFINITY, 0.5).is_ok());
        assert!(SpaceParams::new(4.0, 2.0, 1.0, 0.0).is_err());
        assert!(SpaceParams::new(2.0, 4.0, 2.0, 0.0).is_err());
        assert!(SquareFnConfig::new(1.0, 0).is_err());
    }

    #[test]
    fn low_band_square_function_is_modulus() {
        let (spec, fam, sampler) = setup();
        let f = random_bandlimited(spec, 0, 3, false).unwrap();
        let sq = square_function(&f, &fam, 2.0, 1.0).unwrap();
        assert!(sq.max_abs_diff(&real_function(&spec, f.magnitudes())) < 1e-13);
        let params = SpaceParams::new(4.0, 2.0, 2.0, 1.0).unwrap();
        let m = morrey_norm(&f, params.pq(), &sampler).unwrap();
        let t = tlm_norm(&f, &fam, params, &sampler).unwrap();
        assert!((m - t).abs() <= 1e-12 * m);
        assert_eq!(
            square_function(&GridFunction::zeros(spec), &fam, 2.0, 0.0)
                .unwrap()
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn two_block_wave() {
        let spec = GridSpec::new(1, 128, 4.0 * std::f64::consts::PI).unwrap();
        let fam = LpFamily::build(spec, 4, Flavor::Plain).unwrap();
        let amp = Complex64::new(0.6, -0.8) * 1.5;
        let f = GridFunction::plane_wave(spec, &[5], amp).unwrap();
        let sq = square_function(&f, &fam, 2.0, 1.0).unwrap();
        let p0 = fam.profile().dyadic(0, 2.5);
        let p1 = fam.profile().dyadic(1, 2.5);
        let want = (p0 * p0 + 4.0 * p1 * p1).sqrt() * amp.norm();
        for z in sq.samples() {
            assert!((z.re - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn truncated_special_cases() {
        let (spec, fam, _) = setup();
        let f = random_bandlimited(spec, 2, 8, false).unwrap();
        let sq = square_function(&f, &fam, 2.0, 0.0).unwrap();
        let (lo, hi) = sq
            .samples()
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), z| (a.min(z.re), b.max(z.re)));
        assert!(lo > 0.0);
        let a = 0.99 * lo.min(1.0 / hi).min(0.5);
        let whole =
            truncated_square_function(&f, &fam, 2.0, 0.0, SquareFnConfig::new(a, 0).unwrap())
                .unwrap();
        assert_eq!(whole, sq);
        // Scaled so that min S = 10 > 1/a.
        let big = f.scaled(Complex64::new(10.0 / lo, 0.0));
        let zero =
            truncated_square_function(&big, &fam, 2.0, 0.0, SquareFnConfig::new(0.2, 0).unwrap())
                .unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let empty =
            truncated_square_function(&f, &fam, 2.0, 0.0, SquareFnConfig::new(0.01, 4).unwrap())
                .unwrap();
        assert_eq!(empty.max_abs(), 0.0);
    }

    #[test]
    fn partial_squares() {
        let (spec, fam, _) = setup();
        let f = random_bandlimited(spec, 4, 2, false).unwrap();
        let v0 = partial_square(&f, &fam, 2.0, 0.7, 0).unwrap();
        assert!(
            v0.max_abs_diff(&real_function(
                &spec,
                fam.project(0, &f).unwrap().magnitudes()
            )) < 1e-15
        );
        let v3 = partial_square(&f, &fam, 2.0, 0.7, 3).unwrap();
        let v5 = partial_square(&f, &fam, 2.0, 0.7, 5).unwrap();
        assert!(v3
            .samples()
            .iter()
            .zip(v5.samples())
            .all(|(a, b)| a.re <= b.re));
        let sq = square_function(&f, &fam, 2.0, 0.7).unwrap();
        assert_eq!(v5, sq);
        assert!(partial_square(&f, &fam, 2.0, 0.7, 6).is_err());
    }

    #[test]
    fn uncovered_band_is_flagged() {
        let spec = GridSpec::standard(1, 256).unwrap();
        let fam = LpFamily::build(spec, 3, Flavor::Plain).unwrap();
        let f = random_bandlimited(spec, 5, 1, false).unwrap();
        assert!(matches!(
            tlm_norm(
                &f,
                &fam,
                SpaceParams::new(4.0, 2.0, 2.0, 0.0).unwrap(),
                &BallSampler::dyadic(&spec, WindowShape::Cube)
            ),
            Err(Error::BandNotCovered { .. })
        ));
    }

    #[test]
    fn diamond_tail_vanishes_past_band() {
        let (spec, fam, sampler) = setup();
        let params = SpaceParams::new(4.0, 2.0, 2.0, 0.5).unwrap();
        let f = random_bandlimited(spec, 3, 6, false).unwrap();
        for n in 3..=5 {
            assert_eq!(diamond_tail(&f, &fam, params, &sampler, n).unwrap(), 0.0);
        }
        let t0 = diamond_tail(&f, &fam, params, &sampler, 0).unwrap();
        let t2 = diamond_tail(&f, &fam, params, &sampler, 2).unwrap();
        assert!(t2 <= t0 * (1.0 + 1e-12));
    }

    #[test]
    fn persistent_profile_is_not_decided() {
        let (spec, fam, sampler) = setup();
        let params = SpaceParams::new(4.0, 2.0, 2.0, 0.0).unwrap();
        let f = persistent_block_profile(&fam, 2.0, 0.0).unwrap();
        let sq = square_function(&f, &fam, 2.0, 0.0).unwrap();
        assert!(sq.samples().iter().all(|z| (z.re - 1.0).abs() < 1e-10));
        let rep = diamond_criterion(&f, &fam, params, &sampler, &[0.5], &[1, 3, 5]).unwrap();
        assert_eq!(rep.verdict, DiamondVerdict::NotDecided);
        let g = random_bandlimited(spec, 2, 1, false).unwrap();
        let rep =
            diamond_criterion(&g, &fam, params, &sampler, &[0.5, 0.1], &[1, 2, 3, 4]).unwrap();
        assert_eq!(rep.verdict, DiamondVerdict::ConsistentWithMembership);
        assert!(rep
            .sequences
            .iter()
            .all(|s| s.norms[2] == 0.0 && s.norms[3] == 0.0));
    }
}
