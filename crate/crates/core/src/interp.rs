//! Parameter setups for complex interpolation between two smoothness spaces,
//! the analytic families built from a fixed function, and checks of the
//! estimates those families satisfy.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lp::{Flavor, LpFamily};
use crate::morrey::BallSampler;
use crate::report::{CheckRecord, VerificationReport};
use crate::smoothness::{clean_blocks, partial_remainder, partial_split, tlm_norm, SpaceParams};

/// Default Gauss-Legendre nodes per panel.
pub const DEFAULT_NODES: usize = 32;
/// Longest panel of the composite rule along a contour segment.
pub const MAX_PANEL: f64 = 0.5;
/// Allowed disagreement between `n` and `2n` nodes, relative to `max(1, |G|)`.
pub const NODE_DOUBLING_TOLERANCE: f64 = 1e-9;
/// Relative slack of the Holder inequality check.
pub const HOLDER_SLACK: f64 = 1e-6;
/// Largest allowed spread of normalized Lipschitz ratios for one function.
pub const LIPSCHITZ_SPREAD: f64 = 3.0;

/// Two endpoint spaces, the interpolation parameter and the derived space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpSetup {
    theta: f64,
    end0: SpaceParams,
    end1: SpaceParams,
    derived: SpaceParams,
    q_exponent: f64,
}

fn check_endpoint(label: &str, e: &SpaceParams) -> Result<()> {
    if !e.p().is_finite() {
        return Err(Error::param(format!("p{label} < inf")));
    }
    if !e.r().is_finite() {
        return Err(Error::param(format!("1 < r{label} < inf")));
    }
    if !e.s().is_finite() {
        return Err(Error::param(format!("s{label} finite")));
    }
    Ok(())
}

fn mix(theta: f64, a: f64, b: f64) -> f64 {
    1.0 / ((1.0 - theta) / a + theta / b)
}

impl InterpSetup {
    pub fn new(theta: f64, end0: SpaceParams, end1: SpaceParams) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::param(format!("0 < theta < 1 (got {theta})")));
        }
        check_endpoint("0", &end0)?;
        check_endpoint("1", &end1)?;
        if !(end0.p() > end1.p()) {
            return Err(Error::param(format!(
                "p0 > p1 (got p0 = {}, p1 = {})",
                end0.p(),
                end1.p()
            )));
        }
        let (a, b) = (end0.p() / end0.q(), end1.p() / end1.q());
        if (a - b).abs() > 1e-12 * a.max(b) {
            return Err(Error::param(format!("p0/q0 = p1/q1 (got {a} and {b})")));
        }
        Self::derive(theta, end0, end1)
    }

    /// Setup from the nine scalars `theta, (p0, q0, r0, s0), (p1, q1, r1, s1)`.
    #[allow(clippy::too_many_arguments)]
    pub fn make(
        theta: f64,
        p0: f64,
        q0: f64,
        r0: f64,
        s0: f64,
        p1: f64,
        q1: f64,
        r1: f64,
        s1: f64,
    ) -> Result<Self> {
        let end0 = SpaceParams::new(p0, q0, r0, s0)?;
        let end1 = SpaceParams::new(p1, q1, r1, s1)?;
        Self::new(theta, end0, end1)
    }

    /// Degenerate setup with identical endpoints (so `Q = 0`); only for tests
    /// of limiting cases.
    pub fn with_equal_endpoints(theta: f64, params: SpaceParams) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::param(format!("0 < theta < 1 (got {theta})")));
        }
        check_endpoint("", &params)?;
        Self::derive(theta, params, params)
    }

    fn derive(theta: f64, end0: SpaceParams, end1: SpaceParams) -> Result<Self> {
        let p = mix(theta, end0.p(), end1.p());
        let q = mix(theta, end0.q(), end1.q());
        let r = mix(theta, end0.r(), end1.r());
        let s = (1.0 - theta) * end0.s() + theta * end1.s();
        let derived = SpaceParams::new(p, q, r, s)?;
        Ok(InterpSetup {
            theta,
            end0,
            end1,
            derived,
            q_exponent: p / end1.p() - p / end0.p(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn end0(&self) -> SpaceParams {
        self.end0
    }

    pub fn end1(&self) -> SpaceParams {
        self.end1
    }

    pub fn endpoint(&self, side: usize) -> Result<SpaceParams> {
        match side {
            0 => Ok(self.end0),
            1 => Ok(self.end1),
            _ => Err(Error::IndexOutOfRange {
                index: side,
                max: 1,
            }),
        }
    }

    pub fn derived(&self) -> SpaceParams {
        self.derived
    }

    /// `Q = p/p1 - p/p0`.
    pub fn q_exponent(&self) -> f64 {
        self.q_exponent
    }

    fn rho_at(&self, k: usize, side: SpaceParams) -> f64 {
        let d = self.derived;
        match k {
            1 => d.s() * d.r() / side.r() - side.s(),
            2 => d.p() / side.p() - d.r() / side.r(),
            3 => 1.0 - d.p() / side.p(),
            _ => d.r() / side.r(),
        }
    }

    /// Endpoint values `(rho_k(0), rho_k(1))`.
    pub fn rho_coefficients(&self, k: usize) -> Result<(f64, f64)> {
        if !(1..=4).contains(&k) {
            return Err(Error::IndexOutOfRange { index: k, max: 4 });
        }
        Ok((self.rho_at(k, self.end0), self.rho_at(k, self.end1)))
    }

    /// The affine function `rho_k` at `z`.
    pub fn rho(&self, k: usize, z: Complex64) -> Result<Complex64> {
        let (a, b) = self.rho_coefficients(k)?;
        Ok(a * (1.0 - z) + b * z)
    }
}

/// Which analytic family to build from the base function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `sum_nu phi_nu(D)[2^{nu rho_1} V_nu^{rho_2} sgn(phi_nu f) |phi_nu f|^{rho_4}]`
    /// for `f` scaled to unit norm.
    RhoWeighted,
    /// `sum_nu phi_nu(D)[V_nu^{p((1-z)/p0 + z/p1) - 1} phi_nu f]`; needs the
    /// square-root partition.
    PartialAggregate,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" | "rho-weighted" => Ok(FamilyKind::RhoWeighted),
            "aggregate" | "partial-aggregate" => Ok(FamilyKind::PartialAggregate),
            other => Err(Error::param(format!(
                "family kind is rho or aggregate (got {other})"
            ))),
        }
    }
}

/// Per block: `h_nu(w) = b_nu * exp(alpha + beta w)` pointwise, zero where `b_nu = 0`.
#[derive(Debug, Clone)]
struct BlockTerm {
    values: Vec<Complex64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl BlockTerm {
    fn at(&self, w: Complex64, out: &mut [Complex64], weight: Complex64) {
        for (((o, &b), &a), &c) in out
            .iter_mut()
            .zip(&self.values)
            .zip(&self.alpha)
            .zip(&self.beta)
        {
            if b.re != 0.0 || b.im != 0.0 {
                *o += weight * b * (a + c * w).exp();
            }
        }
    }
}

/// `F(z)` and its primitive `G(z) = int_theta^z F(w) dw` for one base function.
#[derive(Debug, Clone)]
pub struct AnalyticFamily {
    kind: FamilyKind,
    setup: InterpSetup,
    family: LpFamily,
    base: GridFunction,
    scale: f64,
    base_norm: f64,
    terms: Vec<BlockTerm>,
}

impl AnalyticFamily {
    pub fn new(
        kind: FamilyKind,
        setup: InterpSetup,
        f: &GridFunction,
        family: &LpFamily,
        sampler: &BallSampler,
    ) -> Result<Self> {
        if kind == FamilyKind::PartialAggregate && family.flavor() != Flavor::SquareRoot {
            return Err(Error::param(
                "the aggregate family needs the square-root partition",
            ));
        }
        let d = setup.derived();
        let raw_norm = tlm_norm(f, family, d, sampler)?;
        let scale = match kind {
            FamilyKind::RhoWeighted if raw_norm > 0.0 => 1.0 / raw_norm,
            _ => 1.0,
        };
        let base = f.scaled(Complex64::new(scale, 0.0));
        let base_norm = raw_norm * scale;
        let blocks = clean_blocks(&base, family)?;
        let (r, s) = (d.r(), d.s());
        let (rho1, rho2, rho4) = (
            setup.rho_coefficients(1)?,
            setup.rho_coefficients(2)?,
            setup.rho_coefficients(4)?,
        );
        let q = setup.q_exponent();
        let p_over_p0 = d.p() / setup.end0().p();
        let mut power_sum = vec![0.0f64; base.spec().len()];
        let mut terms = Vec::with_capacity(blocks.len());
        for (nu, block) in blocks.into_iter().enumerate() {
            let weight = 2f64.powf(nu as f64 * s);
            let values = block.into_samples();
            for (acc, b) in power_sum.iter_mut().zip(&values) {
                *acc += (weight * b.norm()).powf(r);
            }
            let n = values.len();
            let (mut alpha, mut beta) = (vec![0.0; n], vec![0.0; n]);
            for x in 0..n {
                let modulus = values[x].norm();
                if modulus == 0.0 {
                    continue;
                }
                let log_v = power_sum[x].ln() / r;
                match kind {
                    FamilyKind::PartialAggregate => {
                        alpha[x] = (p_over_p0 - 1.0) * log_v;
                        beta[x] = q * log_v;
                    }
                    FamilyKind::RhoWeighted => {
                        let log_b = modulus.ln();
                        let nl = nu as f64 * std::f64::consts::LN_2;
                        alpha[x] = nl * rho1.0 + rho2.0 * log_v + (rho4.0 - 1.0) * log_b;
                        beta[x] = nl * (rho1.1 - rho1.0)
                            + (rho2.1 - rho2.0) * log_v
                            + (rho4.1 - rho4.0) * log_b;
                    }
                }
            }
            terms.push(BlockTerm {
                values,
                alpha,
                beta,
            });
        }
        Ok(AnalyticFamily {
            kind,
            setup,
            family: family.clone(),
            base,
            scale,
            base_norm,
            terms,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn setup(&self) -> &InterpSetup {
        &self.setup
    }

    pub fn family(&self) -> &LpFamily {
        &self.family
    }

    /// The function the family is built from, after scaling.
    pub fn base(&self) -> &GridFunction {
        &self.base
    }

    /// Factor applied to the input function.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Norm of [`Self::base`] in the derived space.
    pub fn base_norm(&self) -> f64 {
        self.base_norm
    }

    fn check_strip(z: Complex64) -> Result<()> {
        if !(z.re >= -1e-12 && z.re <= 1.0 + 1e-12 && z.im.is_finite()) {
            return Err(Error::param(format!("0 <= Re z <= 1 (got {z})")));
        }
        Ok(())
    }

    fn zero_inputs(&self) -> Vec<Vec<Complex64>> {
        vec![vec![Complex64::new(0.0, 0.0); self.base.spec().len()]; self.terms.len()]
    }

    /// `F(z)`.
    pub fn family_f(&self, z: Complex64) -> Result<GridFunction> {
        Self::check_strip(z)?;
        let mut inputs = self.zero_inputs();
        inputs
            .par_iter_mut()
            .zip(&self.terms)
            .for_each(|(h, t)| t.at(z, h, Complex64::new(1.0, 0.0)));
        self.finish(inputs)
    }

    fn finish(&self, inputs: Vec<Vec<Complex64>>) -> Result<GridFunction> {
        let out = self.family.synthesize(&inputs);
        if let Some(index) = out
            .samples()
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(out)
    }

    /// Pointwise composite Gauss-Legendre integrals of each `h_nu` along `[from, to]`.
    fn segment_inputs(
        &self,
        from: Complex64,
        to: Complex64,
        nodes: usize,
    ) -> Result<Vec<Vec<Complex64>>> {
        let mut inputs = self.zero_inputs();
        let delta = to - from;
        if delta.norm() == 0.0 {
            return Ok(inputs);
        }
        let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::param("quadrature nodes >= 1"))?;
        let rule = GaussLegendre::new(n);
        let panels = (delta.norm() / MAX_PANEL).ceil().max(1.0) as usize;
        let step = delta / panels as f64;
        inputs.par_iter_mut().zip(&self.terms).for_each(|(h, t)| {
            for k in 0..panels {
                let mid = from + step * (k as f64 + 0.5);
                for &(x, w) in rule.as_node_weight_pairs() {
                    t.at(mid + step * (0.5 * x), h, step * (0.5 * w));
                }
            }
        });
        Ok(inputs)
    }

    /// `int_from^to F(w) dw` along the straight segment, checked against twice the nodes.
    pub fn family_g_segment(
        &self,
        from: Complex64,
        to: Complex64,
        nodes: usize,
    ) -> Result<GridFunction> {
        Self::check_strip(from)?;
        Self::check_strip(to)?;
        let coarse = self.segment_inputs(from, to, nodes)?;
        let fine = self.segment_inputs(from, to, 2 * nodes)?;
        let mut diff = 0.0f64;
        let mut size = 0.0f64;
        for (a, b) in coarse.iter().flatten().zip(fine.iter().flatten()) {
            diff = diff.max((a - b).norm());
            size = size.max(b.norm());
        }
        if !(diff <= NODE_DOUBLING_TOLERANCE * size.max(1.0)) {
            return Err(Error::QuadratureDiverged {
                error: diff,
                intervals: (2 * nodes) * (delta_panels(to - from)),
            });
        }
        self.finish(fine)
    }

    /// `G(z) = int_theta^z F(w) dw`; exactly zero at `z = theta`.
    pub fn family_g(&self, z: Complex64, nodes: usize) -> Result<GridFunction> {
        self.family_g_segment(Complex64::new(self.setup.theta, 0.0), z, nodes)
    }

    /// `max |F(theta) - f| / max |f|` (zero for `f = 0`).
    pub fn reconstruction_error(&self) -> Result<f64> {
        let f_theta = self.family_f(Complex64::new(self.setup.theta, 0.0))?;
        let scale = self.base.max_abs();
        if scale == 0.0 {
            return Ok(f_theta.max_abs());
        }
        Ok(f_theta.max_abs_diff(&self.base) / scale)
    }
}

fn delta_panels(delta: Complex64) -> usize {
    (delta.norm() / MAX_PANEL).ceil().max(1.0) as usize
}

/// Central differences of `G` at `theta` against `F(theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})` for consecutive steps.
    pub orders: Vec<f64>,
}

pub fn derivative_convergence(
    fam: &AnalyticFamily,
    steps: &[f64],
    nodes: usize,
) -> Result<DerivativeStudy> {
    let theta = fam.setup.theta;
    let target = fam.family_f(Complex64::new(theta, 0.0))?;
    let scale = target.max_abs().max(f64::MIN_POSITIVE);
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        if !(h > 0.0 && h <= theta.min(1.0 - theta)) {
            return Err(Error::param(format!(
                "0 < h <= min(theta, 1 - theta) (got {h})"
            )));
        }
        let plus = fam.family_g(Complex64::new(theta + h, 0.0), nodes)?;
        let minus = fam.family_g(Complex64::new(theta - h, 0.0), nodes)?;
        let quotient = plus.sub(&minus)?.scaled(Complex64::new(0.5 / h, 0.0));
        errors.push(quotient.max_abs_diff(&target) / scale);
    }
    let orders = steps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(DerivativeStudy {
        steps: steps.to_vec(),
        errors,
        orders,
    })
}

/// One pair of boundary points `side + i t1`, `side + i t2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzSample {
    pub t1: f64,
    pub t2: f64,
    pub difference_norm: f64,
    /// `difference_norm / |t1 - t2|`, zero when the difference vanishes.
    pub ratio: f64,
    /// `ratio / ||f||^{p / p_side}`.
    pub normalized: f64,
}

pub fn boundary_lipschitz(
    fam: &AnalyticFamily,
    side: usize,
    pairs: &[(f64, f64)],
    sampler: &BallSampler,
    nodes: usize,
) -> Result<Vec<LipschitzSample>> {
    let params = fam.setup.endpoint(side)?;
    let weight = fam.base_norm.powf(fam.setup.derived.p() / params.p());
    let x = side as f64;
    pairs
        .iter()
        .map(|&(t1, t2)| {
            let diff = fam.family_g_segment(Complex64::new(x, t2), Complex64::new(x, t1), nodes)?;
            let norm = tlm_norm(&diff, &fam.family, params, sampler)?;
            let ratio = if norm == 0.0 {
                0.0
            } else {
                norm / (t1 - t2).abs()
            };
            let normalized = if ratio == 0.0 { 0.0 } else { ratio / weight };
            Ok(LipschitzSample {
                t1,
                t2,
                difference_norm: norm,
                ratio,
                normalized,
            })
        })
        .collect()
}

/// `max / min` of the nonzero normalized ratios (1 when fewer than two).
pub fn lipschitz_spread(samples: &[LipschitzSample]) -> f64 {
    let live: Vec<f64> = samples
        .iter()
        .map(|s| s.normalized)
        .filter(|&v| v > 0.0)
        .collect();
    if live.len() < 2 {
        return 1.0;
    }
    let hi = live.iter().cloned().fold(f64::MIN, f64::max);
    let lo = live.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}

/// Per-pair records against a pilot constant, plus the spread of the ratios.
pub fn boundary_lipschitz_check(
    fam: &AnalyticFamily,
    side: usize,
    pairs: &[(f64, f64)],
    sampler: &BallSampler,
    baseline: Option<f64>,
    tolerance: f64,
) -> Result<VerificationReport> {
    let samples = boundary_lipschitz(fam, side, pairs, sampler, DEFAULT_NODES)?;
    let id = format!("interp.boundary_lipschitz[side={side}]");
    let mut checks: Vec<CheckRecord> = samples
        .iter()
        .map(|s| {
            CheckRecord::new(id.clone())
                .param("t1", s.t1)
                .param("t2", s.t2)
                .param("scale", fam.scale)
                .sides(s.difference_norm, (s.t1 - s.t2).abs())
                .constant(s.normalized)
                .passed_if(s.normalized.is_finite())
                .against_baseline(baseline, tolerance)
        })
        .collect();
    let spread = lipschitz_spread(&samples);
    checks.push(
        CheckRecord::new(format!("interp.lipschitz_spread[side={side}]"))
            .sides(spread, LIPSCHITZ_SPREAD)
            .param("pairs", pairs.len())
            .passed_if(spread <= LIPSCHITZ_SPREAD),
    );
    Ok(VerificationReport::new(
        "interp.boundary_lipschitz",
        serde_json::json!({"side": side}),
        checks,
    ))
}

/// Upper bound for a norm in the sum of the two endpoint spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumSplit {
    pub value: f64,
    /// Low part is `sum_{j <= split}` of the family's reconstruction; `None` puts everything high.
    pub split: Option<usize>,
    pub low_norm: f64,
    pub high_norm: f64,
}

/// `min_K ||g_{<=K}||_{X0} + ||g - g_{<=K}||_{X1}` over frequency splits `K`.
pub fn sum_space_proxy(
    g: &GridFunction,
    setup: &InterpSetup,
    family: &LpFamily,
    sampler: &BallSampler,
) -> Result<SumSplit> {
    let (x0, x1) = (setup.end0(), setup.end1());
    let all_high = tlm_norm(g, family, x1, sampler)?;
    let mut best = SumSplit {
        value: all_high,
        split: None,
        low_norm: 0.0,
        high_norm: all_high,
    };
    for k in 0..=family.j_max() {
        let (low, high) = partial_split(g, family, k)?;
        let (a, b) = (
            tlm_norm(&low, family, x0, sampler)?,
            tlm_norm(&high, family, x1, sampler)?,
        );
        if a + b < best.value {
            best = SumSplit {
                value: a + b,
                split: Some(k),
                low_norm: a,
                high_norm: b,
            };
        }
    }
    Ok(best)
}

fn endpoint_weight(fam: &AnalyticFamily) -> f64 {
    let p = fam.setup.derived.p();
    fam.base_norm.powf(p / fam.setup.end0.p()) + fam.base_norm.powf(p / fam.setup.end1.p())
}

fn normalized(value: f64, denominator: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        value / denominator
    }
}

/// `||G(z)||_{X0+X1} / ((1 + |z|)(||f||^{p/p0} + ||f||^{p/p1}))` at each sample, using the split proxy.
pub fn global_growth_check(
    fam: &AnalyticFamily,
    z_samples: &[Complex64],
    sampler: &BallSampler,
    baseline: Option<f64>,
    tolerance: f64,
) -> Result<VerificationReport> {
    let weight = endpoint_weight(fam);
    let checks = z_samples
        .iter()
        .map(|&z| {
            let g = fam.family_g(z, DEFAULT_NODES)?;
            let split = sum_space_proxy(&g, &fam.setup, &fam.family, sampler)?;
            let c = normalized(split.value, (1.0 + z.norm()) * weight);
            Ok(CheckRecord::new("interp.global_growth")
                .param("z", [z.re, z.im])
                .param("split", split.split)
                .param("norm", "split proxy (upper bound for the sum-space norm)")
                .sides(split.value, (1.0 + z.norm()) * weight)
                .constant(c)
                .passed_if(c.is_finite())
                .against_baseline(baseline, tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new(
        "interp.global_growth",
        serde_json::json!({"samples": z_samples.len()}),
        checks,
    ))
}

/// `||G(z1) - G(z2)||_{X0+X1} / (|z1 - z2|(||f||^{p/p0} + ||f||^{p/p1}))` over pairs.
pub fn continuity_check(
    fam: &AnalyticFamily,
    pairs: &[(Complex64, Complex64)],
    sampler: &BallSampler,
    baseline: Option<f64>,
    tolerance: f64,
) -> Result<VerificationReport> {
    let weight = endpoint_weight(fam);
    let checks = pairs
        .iter()
        .map(|&(z1, z2)| {
            let diff = fam.family_g_segment(z2, z1, DEFAULT_NODES)?;
            let split = sum_space_proxy(&diff, &fam.setup, &fam.family, sampler)?;
            let c = normalized(split.value, (z1 - z2).norm() * weight);
            Ok(CheckRecord::new("interp.continuity")
                .param("z1", [z1.re, z1.im])
                .param("z2", [z2.re, z2.im])
                .param("norm", "split proxy (upper bound for the sum-space norm)")
                .sides(split.value, (z1 - z2).norm() * weight)
                .constant(c)
                .passed_if(c.is_finite())
                .against_baseline(baseline, tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new(
        "interp.continuity",
        serde_json::json!({"pairs": pairs.len()}),
        checks,
    ))
}

/// Norms of `g` in the derived space and at both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderSample {
    pub derived: f64,
    pub end0: f64,
    pub end1: f64,
    /// `end0^{1-theta} end1^theta`.
    pub bound: f64,
}

pub fn holder_sample(
    g: &GridFunction,
    setup: &InterpSetup,
    family: &LpFamily,
    sampler: &BallSampler,
) -> Result<HolderSample> {
    let derived = tlm_norm(g, family, setup.derived(), sampler)?;
    let end0 = tlm_norm(g, family, setup.end0(), sampler)?;
    let end1 = tlm_norm(g, family, setup.end1(), sampler)?;
    let t = setup.theta();
    Ok(HolderSample {
        derived,
        end0,
        end1,
        bound: end0.powf(1.0 - t) * end1.powf(t),
    })
}

/// `||g|| <= (1 + slack) ||g||_0^{1-theta} ||g||_1^theta` for each `f` in the
/// corpus and, when `tail_from` is set, for `g = f - sum_{j <= tail_from} phi_j(D) f`.
pub fn holder_interpolation_check(
    setup: &InterpSetup,
    corpus: &[GridFunction],
    family: &LpFamily,
    sampler: &BallSampler,
    tail_from: Option<usize>,
) -> Result<VerificationReport> {
    let checks = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut out = Vec::with_capacity(2);
            let mut targets = vec![("raw", f.clone())];
            if let Some(n) = tail_from {
                targets.push(("tail", partial_remainder(f, family, n)?));
            }
            for (label, g) in targets {
                let h = holder_sample(&g, setup, family, sampler)?;
                out.push(
                    CheckRecord::new(format!("interp.holder[{label}]"))
                        .param("index", i)
                        .param("theta", setup.theta())
                        .param("end0_norm", h.end0)
                        .param("end1_norm", h.end1)
                        .param("slack", HOLDER_SLACK)
                        .sides(h.derived, h.bound)
                        .passed_if(h.derived <= h.bound * (1.0 + HOLDER_SLACK)),
                );
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(VerificationReport::new(
        "interp.holder",
        serde_json::to_value(setup).unwrap_or_default(),
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_bandlimited, GridSpec};
    use crate::morrey::WindowShape;
    use crate::report::relative_gap;

    fn setup1() -> InterpSetup {
        InterpSetup::make(0.5, 8.0, 4.0, 2.0, 0.0, 4.0, 2.0, 2.0, 0.0).unwrap()
    }

    #[test]
    fn derived_parameters() {
        let s = setup1();
        let d = s.derived();
        assert!((d.p() - 16.0 / 3.0).abs() < 1e-14);
        assert!((d.q() - 8.0 / 3.0).abs() < 1e-14);
        assert!((d.r() - 2.0).abs() < 1e-14 && d.s() == 0.0);
        assert!((d.p() / d.q() - 2.0).abs() < 1e-14);
        assert!(s.q_exponent() > 0.0);
    }

    #[test]
    fn constraints_are_named() {
        let e = InterpSetup::make(0.5, 8.0, 4.0, 2.0, 0.0, 4.0, 3.0, 2.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("p0/q0 = p1/q1"), "{e}");
        let e = InterpSetup::make(0.5, 4.0, 2.0, 2.0, 0.0, 8.0, 4.0, 2.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("p0 > p1"), "{e}");
        let e = InterpSetup::make(1.0, 8.0, 4.0, 2.0, 0.0, 4.0, 2.0, 2.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("theta"), "{e}");
        let e =
            InterpSetup::make(0.5, 8.0, 4.0, f64::INFINITY, 0.0, 4.0, 2.0, 2.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("r0"), "{e}");
    }

    #[test]
    fn small_theta_tends_to_endpoint() {
        let s = InterpSetup::make(1e-6, 6.0, 3.0, 3.0, 0.5, 4.0, 2.0, 1.5, -0.5).unwrap();
        let (d, e) = (s.derived(), s.end0());
        for (a, b) in [
            (d.p(), e.p()),
            (d.q(), e.q()),
            (d.r(), e.r()),
            (d.s(), e.s()),
        ] {
            assert!((a - b).abs() < 1e-5 * b.abs().max(1.0));
        }
    }

    #[test]
    fn rho_values() {
        let s = InterpSetup::make(0.3, 6.0, 3.0, 3.0, 0.5, 4.0, 2.0, 1.5, -0.5).unwrap();
        let th = Complex64::new(0.3, 0.0);
        for k in 1..=3 {
            assert!(s.rho(k, th).unwrap().norm() < 1e-14, "rho_{k}");
        }
        assert!((s.rho(4, th).unwrap() - 1.0).norm() < 1e-14);
        let (z1, z2) = (Complex64::new(0.2, 3.0), Complex64::new(0.9, -1.5));
        for k in 1..=4 {
            let mid = s.rho(k, (z1 + z2) / 2.0).unwrap();
            let avg = (s.rho(k, z1).unwrap() + s.rho(k, z2).unwrap()) / 2.0;
            assert!((mid - avg).norm() < 1e-14);
        }
        assert!(s.rho(5, th).is_err());
        let eq = setup1();
        assert!((eq.rho(4, z1).unwrap() - 1.0).norm() < 1e-15);
    }

    fn fixture(kind: FamilyKind, flavor: Flavor, seed: u64) -> (AnalyticFamily, BallSampler) {
        let spec = GridSpec::standard(1, 128).unwrap();
        let fam = LpFamily::build(spec, 5, flavor).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        let f = random_bandlimited(spec, 4, seed, true).unwrap();
        (
            AnalyticFamily::new(kind, setup1(), &f, &fam, &sampler).unwrap(),
            sampler,
        )
    }

    #[test]
    fn aggregate_family_reconstructs_at_theta() {
        let (a, _) = fixture(FamilyKind::PartialAggregate, Flavor::SquareRoot, 3);
        assert!(a.reconstruction_error().unwrap() < 1e-10);
        assert_eq!(a.scale(), 1.0);
        let g = a.family_g(Complex64::new(0.5, 0.0), DEFAULT_NODES).unwrap();
        assert!(g.samples().iter().all(|z| z.re == 0.0 && z.im == 0.0));
    }

    #[test]
    fn aggregate_needs_square_root_partition() {
        let spec = GridSpec::standard(1, 64).unwrap();
        let fam = LpFamily::build(spec, 4, Flavor::Plain).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        let f = random_bandlimited(spec, 3, 1, true).unwrap();
        assert!(
            AnalyticFamily::new(FamilyKind::PartialAggregate, setup1(), &f, &fam, &sampler)
                .is_err()
        );
    }

    #[test]
    fn zero_function_gives_zero_family() {
        let spec = GridSpec::standard(1, 64).unwrap();
        let fam = LpFamily::build(spec, 4, Flavor::SquareRoot).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        let zero = GridFunction::zeros(spec);
        for kind in [FamilyKind::RhoWeighted, FamilyKind::PartialAggregate] {
            let a = AnalyticFamily::new(kind, setup1(), &zero, &fam, &sampler).unwrap();
            assert_eq!(a.family_f(Complex64::new(0.2, 4.0)).unwrap().max_abs(), 0.0);
            assert_eq!(
                a.family_g(Complex64::new(1.0, -3.0), 32).unwrap().max_abs(),
                0.0
            );
            let l = boundary_lipschitz(&a, 0, &[(0.0, 1.0), (2.0, 2.0)], &sampler, 32).unwrap();
            assert!(l.iter().all(|s| s.ratio == 0.0));
        }
    }

    #[test]
    fn rho_family_collapses_to_aggregate_family() {
        let (rho, sampler) = fixture(FamilyKind::RhoWeighted, Flavor::SquareRoot, 8);
        let unit = rho.base().clone();
        let agg = AnalyticFamily::new(
            FamilyKind::PartialAggregate,
            setup1(),
            &unit,
            rho.family(),
            &sampler,
        )
        .unwrap();
        for z in [
            Complex64::new(0.1, 0.7),
            Complex64::new(0.8, -2.0),
            Complex64::new(1.0, 5.0),
        ] {
            let a = rho.family_f(z).unwrap();
            let b = agg.family_f(z).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-12 * b.max_abs().max(1.0));
        }
        assert!((rho.base_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plain_partition_defect_is_visible() {
        let (rho, _) = fixture(FamilyKind::RhoWeighted, Flavor::Plain, 2);
        assert!(rho.reconstruction_error().unwrap() > 1e-3);
    }

    #[test]
    fn primitive_of_constant_family_is_linear() {
        let spec = GridSpec::standard(1, 64).unwrap();
        let fam = LpFamily::build(spec, 4, Flavor::SquareRoot).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        let f = random_bandlimited(spec, 3, 4, false).unwrap();
        let s =
            InterpSetup::with_equal_endpoints(0.4, SpaceParams::new(4.0, 2.0, 2.0, 0.0).unwrap())
                .unwrap();
        let a = AnalyticFamily::new(FamilyKind::PartialAggregate, s, &f, &fam, &sampler).unwrap();
        let z = Complex64::new(0.9, 2.5);
        let g = a.family_g(z, 32).unwrap();
        let want = f.scaled(z - 0.4);
        assert!(g.max_abs_diff(&want) < 1e-12 * want.max_abs());
    }

    #[test]
    fn central_differences_converge_quadratically() {
        let (a, _) = fixture(FamilyKind::PartialAggregate, Flavor::SquareRoot, 5);
        let study = derivative_convergence(&a, &[1e-3, 1e-4], DEFAULT_NODES).unwrap();
        assert!(study.orders[0] >= 1.9, "{study:?}");
    }

    #[test]
    fn strip_is_enforced() {
        let (a, _) = fixture(FamilyKind::PartialAggregate, Flavor::SquareRoot, 6);
        assert!(a.family_f(Complex64::new(1.5, 0.0)).is_err());
        assert!(a.family_g(Complex64::new(-0.2, 1.0), 32).is_err());
    }

    #[test]
    fn holder_with_zero_and_small_theta() {
        let spec = GridSpec::standard(1, 64).unwrap();
        let fam = LpFamily::build(spec, 4, Flavor::Plain).unwrap();
        let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
        let s = InterpSetup::make(1e-6, 6.0, 3.0, 3.0, 0.5, 4.0, 2.0, 1.5, -0.5).unwrap();
        let f = random_bandlimited(spec, 3, 9, true).unwrap();
        let h = holder_sample(&f, &s, &fam, &sampler).unwrap();
        assert!(relative_gap(h.derived, h.end0) < 1e-4);
        assert!(relative_gap(h.bound, h.end0) < 1e-4);
        let rep = holder_interpolation_check(
            &s,
            &[GridFunction::zeros(spec), f],
            &fam,
            &sampler,
            Some(1),
        )
        .unwrap();
        assert!(rep.all_passed());
    }
}
