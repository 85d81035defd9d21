use num_complex::Complex64 as C64;
use proptest::prelude::*;

use quartic_helmholtz::analysis::region::{in_estimate_region, Q};
use quartic_helmholtz::kernels::{
    helmholtz_green, quartic_green, split_roots, symbol_partial_fractions, ProblemParams,
};
use quartic_helmholtz::resolvent::{Geometry, QuarticResolvent};
use quartic_helmholtz::spectral::{forward_ft, inverse_ft, lp_norm, power_map, Field, SpectralGrid};

/// (α, β) drawn from the three admissible families.
fn admissible() -> impl Strategy<Value = (f64, f64)> {
    prop_oneof![
        (-5.0..-0.1f64, -4.0..4.0f64),
        (0.1..5.0f64, 0.2..3.0f64).prop_map(|(a, gap)| (a, -2.0 * a.sqrt() - gap)),
        (-5.0..-0.2f64).prop_map(|b| (0.0, b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn roots_reproduce_the_coefficients((alpha, beta) in admissible()) {
        let (a1, a2, _) = split_roots(alpha, beta).unwrap();
        prop_assert!(a1 > a2);
        prop_assert!((a1 + a2 + beta).abs() <= 1e-12 * (1.0 + beta.abs()));
        prop_assert!((a1 * a2 - alpha).abs() <= 1e-12 * (1.0 + a1.abs() * a2.abs()));
    }

    #[test]
    fn partial_fractions_invert_the_symbol((alpha, beta) in admissible(), s in 0.0..40.0f64) {
        let p = ProblemParams::linear(alpha, beta, 3).unwrap();
        let sym = s * s + beta * s + alpha;
        prop_assume!((s - p.a1).abs() > 1e-3 && (s - p.a2).abs() > 1e-3);
        let pf = symbol_partial_fractions(&p, s);
        prop_assert!((pf * sym - 1.0).abs() < 1e-9, "{pf} {sym}");
    }

    #[test]
    fn helmholtz_kernel_scales(a in 0.05..20.0f64, r in 0.01..50.0f64, dim in 2usize..=4) {
        let lhs = helmholtz_green(a, r, dim).unwrap();
        let rhs = helmholtz_green(1.0, a.sqrt() * r, dim).unwrap() * a.powf((dim as f64 - 2.0) / 2.0);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "{lhs} {rhs}");
    }

    #[test]
    fn quartic_kernel_is_the_scaled_difference((alpha, beta) in admissible(), r in 0.05..40.0f64) {
        let p = ProblemParams::linear(alpha, beta, 3).unwrap();
        let g = quartic_green(&p, r).unwrap();
        let want = (helmholtz_green(p.a1, r, 3).unwrap() - helmholtz_green(p.a2, r, 3).unwrap()) / p.disc();
        prop_assert!((g - want).norm() <= 1e-9 * want.norm().max(1e-300), "{g} {want}");
    }

    #[test]
    fn region_is_symmetric_under_duality(dim in 2u32..=9, np in 0i64..=60, nq in 0i64..=60, den in 1i64..=60) {
        prop_assume!(np <= den && nq <= den);
        let (ip, iq) = (Q::new(np, den), Q::new(nq, den));
        let one = Q::new(1, 1);
        prop_assert_eq!(in_estimate_region(dim, ip, iq), in_estimate_region(dim, one - iq, one - ip));
    }

    #[test]
    fn power_map_is_odd_and_homogeneous(x in -10.0..10.0f64, lambda in 0.01..10.0f64, s in 1.05..4.0f64) {
        let base = power_map(&[x, -x], s);
        prop_assert!((base[0] + base[1]).abs() <= 1e-15 * base[0].abs().max(1.0));
        let scaled = power_map(&[lambda * x], s)[0];
        prop_assert!((scaled - lambda.powf(s - 1.0) * base[0]).abs() <= 1e-12 * scaled.abs().max(1e-300));
    }
}

fn random_field(grid: SpectralGrid, seed: &[f64]) -> Field {
    Field::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        let env = (-0.5 * r2).exp();
        C64::new(env * (seed[0] * x[0] + seed[1]).cos(), env * seed[2] * x[1])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_round_trip_and_keep_l2(seed in prop::collection::vec(-2.0..2.0f64, 3)) {
        let grid = SpectralGrid::new(2, 64, 10.0).unwrap();
        let f = random_field(grid, &seed);
        let back = inverse_ft(&forward_ft(&f).unwrap()).unwrap();
        let dev = f.values.iter().zip(&back.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-12);
        let fh = forward_ft(&f).unwrap();
        let l2 = (fh.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.freq_cell_volume()).sqrt();
        let n = lp_norm(&f, 2.0).unwrap();
        prop_assert!((l2 - n).abs() <= 1e-12 * n);
    }

    #[test]
    fn resolvent_is_linear(seed in prop::collection::vec(-2.0..2.0f64, 3), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let p = ProblemParams::linear(4.0, -5.0, 2).unwrap();
        let grid = SpectralGrid::new(2, 32, 8.0).unwrap();
        let res = QuarticResolvent::with_default_schedule(&p, &grid, Geometry::cube(&grid, 0.25, 3.0).unwrap()).unwrap();
        let f = random_field(grid, &seed).real_part();
        let g = random_field(grid, &[seed[2], seed[0], seed[1]]).real_part();
        let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let (rf, rg, rh) = (res.apply_real(&f), res.apply_real(&g), res.apply_real(&h));
        let scale = rh.iter().chain(&rf).chain(&rg).map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..h.len() {
            prop_assert!((rh[i] - a * rf[i] - b * rg[i]).abs() <= 1e-12 * scale.max(1e-300));
        }
    }
}
