use num_complex::Complex64;
use proptest::prelude::*;
use tlm_core::{
    forward_transform, inverse_transform, random_bandlimited, Flavor, GridFunction, GridSpec,
    LpFamily,
};

fn grid(dim: usize) -> GridSpec {
    GridSpec::standard(dim, [64, 16, 8][dim - 1]).unwrap()
}

fn l2(values: &[Complex64]) -> f64 {
    values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn arbitrary(spec: GridSpec) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), spec.len()).prop_map(move |v| {
        GridFunction::new(
            spec,
            v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
        )
        .unwrap()
    })
}

fn dim_and_function() -> impl Strategy<Value = GridFunction> {
    (1usize..=3).prop_flat_map(|d| arbitrary(grid(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip_and_parseval(f in dim_and_function()) {
        let spectrum = forward_transform(&f).unwrap();
        let back = inverse_transform(&spectrum).unwrap();
        let size = f.max_abs().max(1e-300);
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * size);
        let (a, b) = (l2(f.samples()), l2(spectrum.coeffs()));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn projection_is_linear(
        a in any::<u64>(), b in any::<u64>(),
        c0 in (-2.0..2.0f64, -2.0..2.0f64), c1 in (-2.0..2.0f64, -2.0..2.0f64),
        j in 0usize..=5, square_root in any::<bool>(),
    ) {
        let spec = GridSpec::standard(1, 128).unwrap();
        let flavor = if square_root { Flavor::SquareRoot } else { Flavor::Plain };
        let family = LpFamily::build(spec, 5, flavor).unwrap();
        let (f, g) = (random_bandlimited(spec, 4, a, false).unwrap(), random_bandlimited(spec, 4, b, true).unwrap());
        let (x, y) = (Complex64::new(c0.0, c0.1), Complex64::new(c1.0, c1.1));
        let combined = family.project(j, &f.scaled(x).add(&g.scaled(y)).unwrap()).unwrap();
        let separate = family.project(j, &f).unwrap().scaled(x)
            .add(&family.project(j, &g).unwrap().scaled(y)).unwrap();
        let size = f.max_abs() * x.norm() + g.max_abs() * y.norm();
        prop_assert!(combined.max_abs_diff(&separate) <= 1e-12 * size.max(1e-300));
    }

    #[test]
    fn blocks_sum_back_to_the_function(seed in any::<u64>(), dim in 1usize..=2) {
        let spec = GridSpec::standard(dim, [128, 32][dim - 1]).unwrap();
        let j_max = [5, 3][dim - 1];
        let family = LpFamily::build(spec, j_max, Flavor::Plain).unwrap();
        let f = random_bandlimited(spec, j_max as i32 - 1, seed, false).unwrap();
        let mut total = GridFunction::zeros(spec);
        for block in family.decompose(&f).unwrap() {
            total = total.add(&block).unwrap();
        }
        prop_assert!(total.max_abs_diff(&f) <= 1e-12 * f.max_abs().max(1e-300));
    }
}
