use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tlm_core::interp::{AnalyticFamily, FamilyKind, InterpSetup, DEFAULT_NODES};
use tlm_core::suites::standard_setups;
use tlm_core::{
    random_bandlimited, BallSampler, Flavor, GridFunction, GridSpec, LpFamily, WindowShape,
};

fn setting() -> (GridSpec, LpFamily, BallSampler) {
    let spec = GridSpec::standard(1, 128).unwrap();
    let family = LpFamily::build(spec, 5, Flavor::SquareRoot).unwrap();
    let sampler = BallSampler::dyadic(&spec, WindowShape::Cube);
    (spec, family, sampler)
}

/// `G(z)` written out block by block from the closed-form primitive of each exponential.
fn closed_form_g(
    f: &GridFunction,
    family: &LpFamily,
    setup: &InterpSetup,
    z: Complex64,
) -> GridFunction {
    let d = setup.derived();
    let (r, s, theta) = (d.r(), d.s(), setup.theta());
    let q = d.p() * (1.0 / setup.end1().p() - 1.0 / setup.end0().p());
    let low = d.p() / setup.end0().p() - 1.0;
    let blocks = family.decompose(f).unwrap();
    let mut power_sum = vec![0.0f64; f.spec().len()];
    let mut total = GridFunction::zeros(*f.spec());
    for (nu, block) in blocks.iter().enumerate() {
        let weight = 2f64.powf(nu as f64 * s);
        for (acc, b) in power_sum.iter_mut().zip(block.samples()) {
            *acc += (weight * b.norm()).powf(r);
        }
        let h: Vec<Complex64> = block
            .samples()
            .iter()
            .zip(&power_sum)
            .map(|(&b, &sum)| {
                if b.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let lv = sum.ln() / r;
                let beta = q * lv;
                let primitive = if beta.abs() < 1e-12 {
                    z - theta
                } else {
                    ((z * beta).exp() - (theta * beta).exp()) / beta
                };
                b * (low * lv).exp() * primitive
            })
            .collect();
        let h = GridFunction::new(*f.spec(), h).unwrap();
        total = total.add(&family.project(nu, &h).unwrap()).unwrap();
    }
    total
}

#[test]
fn primitive_matches_closed_form() {
    let (spec, family, sampler) = setting();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for (k, setup) in standard_setups().into_iter().enumerate() {
        let f = random_bandlimited(spec, 4, 100 + k as u64, k % 2 == 0).unwrap();
        let fam = AnalyticFamily::new(FamilyKind::PartialAggregate, setup, &f, &family, &sampler)
            .unwrap();
        for _ in 0..4 {
            let z = Complex64::new(rng.random_range(0.0..1.0), rng.random_range(-2.0..2.0));
            let got = fam.family_g(z, DEFAULT_NODES).unwrap();
            let want = closed_form_g(&f, &family, &setup, z);
            let gap = got.max_abs_diff(&want) / want.max_abs().max(1e-300);
            assert!(gap <= 1e-9, "setup {k} z {z}: relative gap {gap:.2e}");
        }
    }
}

#[test]
fn primitive_satisfies_cauchy_riemann() {
    let (spec, family, sampler) = setting();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = 1e-3;
    let setup = standard_setups()[0];
    let f = random_bandlimited(spec, 4, 3, true).unwrap();
    for kind in [FamilyKind::PartialAggregate, FamilyKind::RhoWeighted] {
        let fam = AnalyticFamily::new(kind, setup, &f, &family, &sampler).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let w: Vec<Complex64> = (0..spec.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let z = Complex64::new(rng.random_range(0.1..0.9), rng.random_range(-1.0..1.0));
            let pair = |z: Complex64| -> Complex64 {
                let g = fam.family_g(z, DEFAULT_NODES).unwrap();
                g.samples().iter().zip(&w).map(|(a, b)| a * b).sum()
            };
            let (dx, dy) = (Complex64::new(step, 0.0), Complex64::new(0.0, step));
            let ddx = (pair(z + dx) - pair(z - dx)) / (2.0 * step);
            let ddy = (pair(z + dy) - pair(z - dy)) / (2.0 * step);
            // d/dz-bar = (d/dx + i d/dy) / 2 vanishes for holomorphic maps.
            let residual = (ddx + Complex64::i() * ddy).norm() / 2.0;
            worst = worst.max(residual / ddx.norm().max(1.0));
        }
        assert!(
            worst <= 1e-6,
            "{kind:?}: Cauchy-Riemann residual {worst:.2e}"
        );
    }
}
