//! Scalar functions with logarithmic damping and checks of the inequalities
//! they satisfy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Quadrature, Tolerance};
use crate::report::{relative_gap, CheckRecord};

/// Default accuracy of [`psi_kappa`].
pub const PSI_TOLERANCE: Tolerance = Tolerance::new(1e-10, 1e-12);
/// Purely relative accuracy for comparisons against explicit bounds at tiny arguments.
pub const PSI_RELATIVE_TOLERANCE: Tolerance = Tolerance::new(0.0, 1e-11);

/// Allowed relative change of an empirical constant when the sampling density doubles.
pub const DENSITY_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiPsiParams {
    kappa: f64,
    r: f64,
}

impl PhiPsiParams {
    pub fn new(kappa: f64, r: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::param(format!("kappa > 0 (got {kappa})")));
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::param(format!("1 <= r < inf (got {r})")));
        }
        Ok(PhiPsiParams { kappa, r })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `log(e^y + e^{-y})` without overflow or cancellation.
fn log_cosh2(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `log(t + 1/t)` for `t > 0`.
pub fn log_sum(t: f64) -> f64 {
    log_cosh2(t.ln())
}

/// `Phi_kappa(t) = t^{kappa - 1} / log(t + 1/t)`.
pub fn phi_kappa(t: f64, params: PhiPsiParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            function: "phi_kappa",
            value: t,
        });
    }
    Ok(t.powf(params.kappa - 1.0) / log_sum(t))
}

/// `Psi_kappa(t) = int_0^t s^{kappa-1} log(s^{1/r} + s^{-1/r})^{-r} ds` with the default tolerance.
pub fn psi_kappa(t: f64, params: PhiPsiParams) -> Result<f64> {
    Ok(psi_kappa_with(t, params, PSI_TOLERANCE)?.value)
}

/// [`psi_kappa`] with an explicit tolerance, returning the error estimate too.
///
/// The substitution `s = u^m` with `m = max(2, 1/kappa)` turns the factor
/// `s^{kappa-1}` into the bounded `m u^{m kappa - 1}`.
pub fn psi_kappa_with(t: f64, params: PhiPsiParams, tol: Tolerance) -> Result<Quadrature> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            function: "psi_kappa",
            value: t,
        });
    }
    let (kappa, r) = (params.kappa, params.r);
    let m = (1.0 / kappa).max(2.0);
    let power = m * kappa - 1.0;
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let y = m / r * u.ln();
        m * u.powf(power) * log_cosh2(y).powf(-r)
    };
    let upper = t.powf(1.0 / m);
    // Split at u = 1, where the logarithmic factor has its minimum.
    if upper > 1.0 {
        let a = integrate(integrand, 0.0, 1.0, tol)?;
        let b = integrate(integrand, 1.0, upper, tol)?;
        Ok(Quadrature {
            value: a.value + b.value,
            error: a.error + b.error,
            intervals: a.intervals + b.intervals,
        })
    } else {
        integrate(integrand, 0.0, upper, tol)
    }
}

/// `e^w - 1` for complex `w` without cancellation.
pub fn expm1(w: Complex64) -> Complex64 {
    let em1 = w.re.exp_m1();
    let half = (0.5 * w.im).sin();
    Complex64::new(
        em1 * w.im.cos() - 2.0 * half * half,
        w.re.exp() * w.im.sin(),
    )
}

/// `(e^w - 1) / w`, equal to 1 at `w = 0`.
pub fn exprel(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // 1 + w/2 + w^2/6 + w^3/24 + w^4/120
        Complex64::new(1.0, 0.0) + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0)))
    } else {
        expm1(w) / w
    }
}

/// `(e^w - 1) / w - 1`, accurate for small `w`.
pub fn exprel_minus_one(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // sum_{k>=1} w^k / (k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 1..40 {
            term *= w / (k as f64 + 1.0);
            total += term;
            if term.norm() < 1e-18 * total.norm() {
                break;
            }
        }
        total
    } else {
        exprel(w) - 1.0
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Both sides of `sum_j a_j (sum_{k<=j} a_k)^{kappa-1} <= (sum_j a_j)^kappa / min(kappa, 1)`.
pub fn sequence_power_sides(a: &[f64], kappa: f64) -> Result<(f64, f64)> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::param(format!("kappa > 0 (got {kappa})")));
    }
    if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::param(
            "sequence entries must be finite and nonnegative",
        ));
    }
    if a.iter().all(|&v| v == 0.0) {
        return Err(Error::param("some a_j is nonzero"));
    }
    let mut partial = 0.0f64;
    let mut carry = 0.0f64;
    let mut terms = Vec::with_capacity(a.len());
    for &v in a {
        let t = partial + v;
        carry += if partial.abs() >= v {
            (partial - t) + v
        } else {
            (v - t) + partial
        };
        partial = t;
        if v > 0.0 {
            terms.push(v * (partial + carry).powf(kappa - 1.0));
        }
    }
    let lhs = compensated_sum(terms);
    let rhs = compensated_sum(a.iter().copied()).powf(kappa) / kappa.min(1.0);
    Ok((lhs, rhs))
}

pub fn sequence_power_check(a: &[f64], kappa: f64, slack: f64) -> Result<CheckRecord> {
    let (lhs, rhs) = sequence_power_sides(a, kappa)?;
    Ok(
        CheckRecord::new(format!("scalar.sequence_power[kappa={kappa}]"))
            .param("kappa", kappa)
            .param("length", a.len())
            .param("slack", slack)
            .sides(lhs, rhs)
            .passed_if(lhs <= rhs * (1.0 + slack)),
    )
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) || s == 1.0 {
        return Err(Error::Domain {
            function: "log damping ratio",
            value: s,
        });
    }
    Ok(())
}

/// `|(s^{+-z} - 1) / log(s^r)| * log(s + 1/s)`, with `s^z` for `s < 1` and `s^{-z}` for `s > 1`.
pub fn log_damping_complex_ratio(z: Complex64, r: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    if z.re < 0.0 {
        return Err(Error::param("Re z >= 0"));
    }
    let l = s.ln();
    let w = if s < 1.0 { z } else { -z };
    // (s^w - 1) / (r log s) = w * exprel(w log s) / r
    Ok((w * exprel(w * l)).norm() / r * log_sum(s))
}

/// `|(s^{it} - 1) / log(s^r)| * log(s + 1/s)`.
pub fn log_damping_imag_ratio(t: f64, r: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    let w = Complex64::new(0.0, t);
    Ok((w * exprel(w * s.ln())).norm() / r * log_sum(s))
}

/// Points `s = e^{+-u}` with `u` log-spaced over `[u_min, u_max]`,
/// `per_decade` points per factor of ten. Doubling the density keeps every old point.
pub fn log_spaced_grid(u_min: f64, u_max: f64, per_decade: usize, both_sides: bool) -> Vec<f64> {
    let decades = (u_max / u_min).log10();
    let steps = (decades * per_decade as f64).ceil() as usize;
    let mut out = Vec::with_capacity(2 * (steps + 1));
    for k in 0..=steps {
        let u = (u_min * 10f64.powf(k as f64 / per_decade as f64)).min(u_max);
        out.push((-u).exp());
        if both_sides {
            out.push(u.exp());
        }
    }
    out
}

/// Supremum of a sampled function and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupSample {
    pub sup: f64,
    pub at: f64,
}

fn sup_over(points: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<SupSample> {
    let mut best = SupSample {
        sup: 0.0,
        at: f64::NAN,
    };
    for &x in points {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        if v > best.sup || best.at.is_nan() {
            best = SupSample { sup: v, at: x };
        }
    }
    if best.at.is_nan() {
        return Err(Error::EmptySequence);
    }
    Ok(best)
}

/// Default range of `|log s|`: from `1e-6` out to `40 log 2` (`s` down to `2^{-40}`).
pub const LOG_DAMPING_RANGE: (f64, f64) = (1e-6, 40.0 * std::f64::consts::LN_2);

pub fn sup_log_damping_complex(z: Complex64, r: f64, s_grid: &[f64]) -> Result<SupSample> {
    sup_over(s_grid, |s| log_damping_complex_ratio(z, r, s))
}

pub fn sup_log_damping_imag(t: f64, r: f64, s_grid: &[f64]) -> Result<SupSample> {
    sup_over(s_grid, |s| log_damping_imag_ratio(t, r, s))
}

fn density_record(id: String, coarse: f64, fine: f64) -> CheckRecord {
    let gap = relative_gap(coarse, fine);
    CheckRecord::new(id)
        .sides(fine, coarse)
        .constant(fine)
        .param("coarse_sup", coarse)
        .param("fine_sup", fine)
        .param("density_gap", gap)
        .passed_if(fine.is_finite() && gap <= DENSITY_TOLERANCE)
}

fn complex_label(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Sup of the complex log-damping ratio at `per_decade` and `2 per_decade`.
pub fn log_damping_complex_check(z: Complex64, r: f64, per_decade: usize) -> Result<CheckRecord> {
    let (lo, hi) = LOG_DAMPING_RANGE;
    let coarse = sup_log_damping_complex(z, r, &log_spaced_grid(lo, hi, per_decade, true))?;
    let fine = sup_log_damping_complex(z, r, &log_spaced_grid(lo, hi, 2 * per_decade, true))?;
    Ok(density_record(
        format!("scalar.log_damping_complex[z={},r={r}]", complex_label(z)),
        coarse.sup,
        fine.sup,
    )
    .param("z", [z.re, z.im])
    .param("r", r)
    .param("argmax_s", fine.at)
    .param("points_per_decade", per_decade))
}

pub fn log_damping_imag_check(t: f64, r: f64, per_decade: usize) -> Result<CheckRecord> {
    let (lo, hi) = LOG_DAMPING_RANGE;
    let coarse = sup_log_damping_imag(t, r, &log_spaced_grid(lo, hi, per_decade, true))?;
    let fine = sup_log_damping_imag(t, r, &log_spaced_grid(lo, hi, 2 * per_decade, true))?;
    Ok(density_record(
        format!("scalar.log_damping_imag[t={t},r={r}]"),
        coarse.sup,
        fine.sup,
    )
    .param("t", t)
    .param("r", r)
    .param("argmax_s", fine.at)
    .param("points_per_decade", per_decade))
}

/// Both sides of `sum_j [a_j Phi_kappa((sum_{k<=j} a_k^r)^{1/r})]^r` vs `Psi_kappa(sum_j a_j^r)`.
pub fn summation_bound_sides(a: &[f64], params: PhiPsiParams) -> Result<(f64, f64)> {
    if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::param(
            "sequence entries must be finite and nonnegative",
        ));
    }
    let r = params.r();
    let mut partial = 0.0;
    let mut terms = Vec::with_capacity(a.len());
    for &v in a {
        let p = v.powf(r);
        partial += p;
        if v > 0.0 {
            terms.push((v * phi_kappa(partial.powf(1.0 / r), params)?).powf(r));
        }
    }
    let lhs = compensated_sum(terms);
    let total = compensated_sum(a.iter().map(|v| v.powf(r)));
    let rhs = if total > 0.0 {
        psi_kappa(total, params)?
    } else {
        0.0
    };
    Ok((lhs, rhs))
}

/// Max ratio of [`summation_bound_sides`] over a corpus of sequences.
pub fn summation_bound_sweep(corpus: &[Vec<f64>], params: PhiPsiParams) -> Result<SupSample> {
    let mut best = SupSample { sup: 0.0, at: 0.0 };
    for (i, a) in corpus.iter().enumerate() {
        let (lhs, rhs) = summation_bound_sides(a, params)?;
        let q = crate::report::ratio(lhs, rhs);
        if q > best.sup {
            best = SupSample {
                sup: q,
                at: i as f64,
            };
        }
    }
    Ok(best)
}

/// Max ratio over the first half of the corpus against the whole corpus.
pub fn summation_bound_check(corpus: &[Vec<f64>], params: PhiPsiParams) -> Result<CheckRecord> {
    if corpus.len() < 2 {
        return Err(Error::EmptySequence);
    }
    let coarse = summation_bound_sweep(&corpus[..corpus.len() / 2], params)?;
    let fine = summation_bound_sweep(corpus, params)?;
    Ok(density_record(
        format!(
            "scalar.summation_bound[kappa={},r={}]",
            params.kappa(),
            params.r()
        ),
        coarse.sup,
        fine.sup,
    )
    .param("kappa", params.kappa())
    .param("r", params.r())
    .param("sequences", corpus.len())
    .param("argmax_index", fine.at))
}

/// Both sides of `Psi_kappa(t^r) <= (a^{(r-1)kappa} + log(a^{1/r} + a^{-1/r})^{-r}) t^{r kappa} / (kappa log(2)^r)`.
pub fn psi_tail_bound_sides(t: f64, a: f64, params: PhiPsiParams) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param(format!("0 < a < 1 (got a = {a})")));
    }
    if !(t > 0.0 && t.is_finite()) || (t >= a && t <= 1.0 / a) {
        return Err(Error::Domain {
            function: "psi tail bound (t in (0, a) or (1/a, inf))",
            value: t,
        });
    }
    let (kappa, r) = (params.kappa(), params.r());
    let lhs = psi_kappa_with(t.powf(r), params, PSI_RELATIVE_TOLERANCE)?.value;
    let root = a.powf(1.0 / r);
    let bracket = a.powf((r - 1.0) * kappa) + log_cosh2(root.ln()).powf(-r);
    let rhs = bracket * t.powf(r * kappa) / (kappa * std::f64::consts::LN_2.powf(r));
    Ok((lhs, rhs))
}

pub fn psi_tail_bound_check(
    t: f64,
    a: f64,
    params: PhiPsiParams,
    slack: f64,
) -> Result<CheckRecord> {
    let (lhs, rhs) = psi_tail_bound_sides(t, a, params)?;
    Ok(CheckRecord::new(format!(
        "scalar.psi_tail_bound[kappa={},r={},a={a},t={t}]",
        params.kappa(),
        params.r()
    ))
    .param("kappa", params.kappa())
    .param("r", params.r())
    .param("a", a)
    .param("t", t)
    .sides(lhs, rhs)
    .passed_if(lhs <= rhs * (1.0 + slack)))
}

/// `t^{+-eps} |(exp(h log t) - 1)/(h log t) - 1|`, continuous at `t = 1`.
pub fn exp_log_deviation(h: Complex64, eps: f64, t: f64) -> f64 {
    let l = t.ln();
    let weight = if t <= 1.0 { t.powf(eps) } else { t.powf(-eps) };
    weight * exprel_minus_one(h * l).norm()
}

/// The two suprema (over `0 < t <= 1` and over `t > 1`) divided by `|h|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpLogSups {
    pub inner: f64,
    pub outer: f64,
}

pub fn exp_log_sups(h: Complex64, eps: f64, per_decade: usize) -> Result<ExpLogSups> {
    if !(h.norm() > 0.0) || !(eps > 2.0 * h.norm()) {
        return Err(Error::param(format!(
            "eps > 2|h| > 0 (got eps = {eps}, |h| = {})",
            h.norm()
        )));
    }
    // Past u_max the weight has crushed the deviation well below any sampled peak.
    let u_max = 80.0 / (eps - h.norm());
    let grid = log_spaced_grid(1e-8, u_max, per_decade, false);
    let norm = h.norm();
    let inner = grid
        .iter()
        .map(|&t| exp_log_deviation(h, eps, t))
        .fold(0.0, f64::max)
        / norm;
    let outer = grid
        .iter()
        .map(|&t| exp_log_deviation(h, eps, 1.0 / t))
        .fold(0.0, f64::max)
        / norm;
    if !(inner.is_finite() && outer.is_finite()) {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(ExpLogSups { inner, outer })
}

/// Both suprema at `per_decade` and `2 per_decade`; the constant is the larger fine sup.
pub fn exp_log_bound_check(h: Complex64, eps: f64, per_decade: usize) -> Result<CheckRecord> {
    let coarse = exp_log_sups(h, eps, per_decade)?;
    let fine = exp_log_sups(h, eps, 2 * per_decade)?;
    let gap = relative_gap(coarse.inner, fine.inner).max(relative_gap(coarse.outer, fine.outer));
    let c = fine.inner.max(fine.outer);
    Ok(CheckRecord::new(format!(
        "scalar.exp_log_bound[h={},eps={eps}]",
        complex_label(h)
    ))
    .sides(c, coarse.inner.max(coarse.outer))
    .constant(c)
    .param("h", [h.re, h.im])
    .param("eps", eps)
    .param("inner_sup_over_h", fine.inner)
    .param("outer_sup_over_h", fine.outer)
    .param("density_gap", gap)
    .param("points_per_decade", per_decade)
    .passed_if(c.is_finite() && gap <= DENSITY_TOLERANCE))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn pp(k: f64, r: f64) -> PhiPsiParams {
        PhiPsiParams::new(k, r).unwrap()
    }

    #[test]
    fn phi_special_values() {
        for k in [0.3, 1.0, 2.5] {
            let v = phi_kappa(1.0, pp(k, 1.0)).unwrap();
            assert!((v - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
        }
        for t in [0.01, 0.7, 3.0, 1e4] {
            let v = phi_kappa(t, pp(1.0, 2.0)).unwrap();
            assert!((v - 1.0 / (t + 1.0 / t).ln()).abs() < 1e-14 * v);
        }
        // e / log(e + 1/e) to 30 digits, computed independently with mpmath.
        let e = std::f64::consts::E;
        let v = phi_kappa(e, pp(2.0, 1.0)).unwrap();
        assert!((v - 2.412_116_658_581_655_009_396_632_270_16).abs() < 4e-16 * v);
        assert!(phi_kappa(0.0, pp(1.0, 1.0)).is_err());
        assert!(PhiPsiParams::new(0.0, 1.0).is_err());
        assert!(PhiPsiParams::new(1.0, 0.5).is_err());
    }

    #[test]
    fn psi_against_independent_values() {
        // Reference integrals from tanh-sinh quadrature at 30 digits.
        let cases = [
            (1.0, 1.0, 1.0, 1.005_844_718_177_177_846_7),
            (1.0, 1.0, 2.0, 2.292_878_082_098_603_722_7),
            (0.3, 2.0, 5.0, 6.154_458_749_044_371_145_9),
            (2.0, 2.0, 100.0, 1_233.803_505_407_229_954_2),
        ];
        for (k, r, t, want) in cases {
            let got = psi_kappa(t, pp(k, r)).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want,
                "{k} {r} {t}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn psi_riemann_refinement_oracle() {
        // Geometric panels toward s = 0, midpoint rule with Richardson extrapolation.
        let f = |s: f64| 1.0 / (s + 1.0 / s).ln();
        let midpoint = |m: usize| {
            let mut total = 0.0;
            for k in 0..60 {
                let (lo, hi) = (0.5f64.powi(k + 1), 0.5f64.powi(k));
                let h = (hi - lo) / m as f64;
                total += (0..m).map(|i| f(lo + (i as f64 + 0.5) * h)).sum::<f64>() * h;
            }
            total
        };
        let (a, b) = (midpoint(2000), midpoint(4000));
        let oracle = b + (b - a) / 3.0;
        let got = psi_kappa(1.0, pp(1.0, 1.0)).unwrap();
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn psi_is_increasing_from_zero() {
        let p = pp(1.0, 1.0);
        assert!(psi_kappa(1e-12, p).unwrap() < 1e-12);
        assert!(psi_kappa(2.0, p).unwrap() > psi_kappa(1.0, p).unwrap());
        let mut last = 0.0;
        for i in 1..40 {
            let v = psi_kappa(i as f64 * 0.25, pp(0.5, 2.0)).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn phi_doubling_for_large_kappa() {
        for k in [1.5, 2.0, 3.0] {
            for i in -40..40 {
                let t = 2f64.powf(i as f64 / 4.0);
                let p = pp(k, 1.0);
                let lhs = phi_kappa(2.0 * t, p).unwrap();
                let rhs = 2f64.powf(k) * phi_kappa(t, p).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn exprel_branches_agree() {
        for w in [
            Complex64::new(1e-3, 2e-4),
            Complex64::new(-3e-4, 9e-4),
            Complex64::new(0.4, -0.2),
        ] {
            let direct = (w.exp() - 1.0) / w;
            assert!((exprel(w) - direct).norm() < 1e-12);
            assert!((exprel_minus_one(w) - (direct - 1.0)).norm() < 1e-12);
        }
        assert_eq!(exprel(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        let tiny = Complex64::new(1e-9, 0.0);
        assert!((exprel_minus_one(tiny).re - (5e-10 + 1e-18 / 6.0)).abs() < 1e-25);
    }

    #[test]
    fn sequence_power_examples() {
        let (l, r) = sequence_power_sides(&[0.3, 0.0, 1.2, 0.5], 1.0).unwrap();
        assert!((l - 2.0).abs() < 1e-15 && (r - 2.0).abs() < 1e-15);
        let (l, r) = sequence_power_sides(&[1.0, 0.0, 0.0], 2.0).unwrap();
        assert_eq!((l, r), (1.0, 1.0));
        assert!(sequence_power_sides(&[0.0, 0.0], 2.0).is_err());
        assert!(
            sequence_power_check(&[0.0, 0.5, 0.25], 0.3, 1e-12)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn log_damping_values() {
        let z0 = Complex64::new(0.0, 0.0);
        assert_eq!(log_damping_complex_ratio(z0, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(log_damping_imag_ratio(0.0, 2.0, 4.0).unwrap(), 0.0);
        assert!(log_damping_complex_ratio(z0, 1.0, 1.0).is_err());
        let e = std::f64::consts::E;
        let want = 2.0 * 0.5f64.sin() * (e + 1.0 / e).ln();
        assert!((log_damping_imag_ratio(1.0, 1.0, e).unwrap() - want).abs() < 1e-15);
        assert!((want - 1.080_556_137_324_880_631).abs() < 1e-15);
        // Near s = 1 the ratio tends to |t| log(2) / r.
        for s in [1.0 - 1e-6, 1.0 + 1e-6] {
            let v = log_damping_imag_ratio(3.0, 2.0, s).unwrap();
            assert!((v - 1.5 * std::f64::consts::LN_2).abs() < 1e-5);
        }
        let one = Complex64::new(1.0, 0.0);
        let far = log_damping_complex_ratio(one, 1.0, 2f64.powi(-40)).unwrap();
        assert!(far.is_finite() && far <= 1.0 + 1e-9);
    }

    #[test]
    fn log_damping_checks_are_stable() {
        let rec = log_damping_complex_check(Complex64::new(0.0, 1.0), 2.0, 20).unwrap();
        assert!(rec.pass, "{rec:?}");
        let rec = log_damping_imag_check(1.0, 1.0, 20).unwrap();
        assert!(rec.pass, "{rec:?}");
    }

    #[test]
    fn summation_examples() {
        let p = pp(1.0, 1.0);
        let (l, r) = summation_bound_sides(&[1.0, 0.0, 0.0], p).unwrap();
        assert!((l - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
        assert!((r - 1.005_844_718_177_177_8).abs() < 1e-10);
        assert_eq!(summation_bound_sides(&[0.0, 0.0], p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn tail_bound_examples() {
        let p = pp(1.0, 1.0);
        assert!(psi_tail_bound_check(4.0, 0.5, p, 1e-8).unwrap().pass);
        assert!(
            psi_tail_bound_check(1e-6, 0.5, pp(0.5, 2.0), 1e-8)
                .unwrap()
                .pass
        );
        assert!(psi_tail_bound_sides(0.5, 0.5, p).is_err());
        assert!(psi_tail_bound_sides(1.5, 0.5, p).is_err());
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(exp_log_deviation(Complex64::new(0.3, 0.1), 1.0, 1.0), 0.0);
        for h in [1e-3, 1e-4] {
            let s = exp_log_sups(Complex64::new(h, 0.0), 0.5, 20).unwrap();
            // sup_u u e^{-u/2} / 2 = 1/e as h -> 0.
            assert!((s.inner - 1.0 / std::f64::consts::E).abs() < 0.01);
        }
        let rec = exp_log_bound_check(Complex64::new(0.1, 0.0), 0.5, 20).unwrap();
        assert!(rec.pass, "{rec:?}");
        assert!(exp_log_sups(Complex64::new(0.3, 0.0), 0.5, 20).is_err());
    }
}
