use levyheat::kernels::{LevyKernel, NearProfile, TailProfile};
use levyheat::symbol::{build_symbol_table, log_grid, symbol_quadrature};
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

fn near_strategy() -> impl Strategy<Value = NearProfile> {
    prop_oneof![
        (0.05f64..1.95).prop_map(|beta| NearProfile::FractionalPower { beta }),
        Just(NearProfile::Borderline),
        (0.05f64..=1.0).prop_map(|p| NearProfile::LogPerturbed { p }),
        (0.1f64..5.0).prop_map(|c0| NearProfile::Bounded { c0 }),
        (0.2f64..1.8).prop_map(|alpha_osc| NearProfile::Oscillating { alpha_osc }),
    ]
}

fn tail_strategy() -> impl Strategy<Value = TailProfile> {
    prop_oneof![
        (0.1f64..2.0).prop_map(|alpha| TailProfile::PowerTail { alpha }),
        Just(TailProfile::CompactSupport),
        (0.2f64..5.0).prop_map(|lambda| TailProfile::ExponentialTail { lambda }),
    ]
}

fn radii() -> Vec<f64> {
    log_grid(1e-6, 1.0 - 1e-6, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn catalog_kernels_have_finite_positive_moment(near in near_strategy(), tail in tail_strategy(), dim in 1usize..=2) {
        let k = LevyKernel::new(dim, near, tail).unwrap();
        let m = k.levy_moment().unwrap();
        prop_assert!(m.is_finite() && m > 0.0);
    }

    #[test]
    fn psi1_nonincreasing_and_psi2_nonnegative(near in near_strategy(), dim in 1usize..=2) {
        let k = LevyKernel::new(dim, near, TailProfile::CompactSupport).unwrap();
        let mut prev = f64::INFINITY;
        for r in radii() {
            let p1 = k.psi1(r).unwrap();
            prop_assert!(p1 <= prev * (1.0 + 1e-12), "psi1 rose at r = {}", r);
            prev = p1;
            prop_assert!(k.psi2(r).unwrap() >= 0.0);
        }
    }

    #[test]
    fn fractional_psi_ratio_is_bounded_near_origin(beta in 0.05f64..1.95) {
        let k = LevyKernel::new(1, NearProfile::FractionalPower { beta }, TailProfile::CompactSupport).unwrap();
        let ratio = |j: i32| {
            let r = 2f64.powi(-j);
            k.psi2(r).unwrap() / k.psi1(r).unwrap()
        };
        let first = ratio(1);
        for j in 1..=20 {
            prop_assert!(ratio(j) <= 10.0 * first);
        }
    }

    #[test]
    fn pure_power_symbol_matches_gamma_formula(alpha in 0.2f64..1.9, dim in 1usize..=2) {
        let k = LevyKernel::pure_power(dim, alpha).unwrap();
        let n = dim as f64;
        // ∫(1 - cos(z·e))|z|^{-N-α} dz = π^{N/2} Γ(1-α/2) / (2^α (α/2) Γ((N+α)/2))
        let c = PI.powf(n / 2.0) * gamma(1.0 - alpha / 2.0) / (2f64.powf(alpha) * (alpha / 2.0) * gamma((n + alpha) / 2.0));
        let m = symbol_quadrature(&k, 1.0).unwrap();
        prop_assert!((m - c).abs() <= 1e-7 * c, "m = {}, c = {}", m, c);
    }

    #[test]
    fn pure_power_homogeneity(alpha in 0.2f64..1.9, rho in 1e-2f64..1e2) {
        let k = LevyKernel::pure_power(1, alpha).unwrap();
        let m = symbol_quadrature(&k, rho).unwrap();
        for lambda in [2.0f64, 4.0] {
            let ml = symbol_quadrature(&k, lambda * rho).unwrap();
            prop_assert!((ml - lambda.powf(alpha) * m).abs() <= 1e-6 * ml);
        }
    }
}

#[test]
fn borderline_psi1_is_exact_logarithm() {
    let k = LevyKernel::new(1, NearProfile::Borderline, TailProfile::CompactSupport).unwrap();
    for r in radii() {
        assert!((k.psi1(r).unwrap() - (1.0 / r).ln()).abs() < 1e-12);
    }
}

#[test]
fn zero_frequency_is_zero() {
    let k = LevyKernel::new(2, NearProfile::Borderline, TailProfile::PowerTail { alpha: 0.5 }).unwrap();
    assert_eq!(symbol_quadrature(&k, 0.0).unwrap(), 0.0);
}

#[test]
fn larger_kernel_has_larger_symbol() {
    for tail in [TailProfile::CompactSupport, TailProfile::PowerTail { alpha: 1.0 }, TailProfile::ExponentialTail { lambda: 1.0 }] {
        let small = LevyKernel::new(1, NearProfile::Bounded { c0: 1.0 }, tail).unwrap();
        let large = LevyKernel::new(1, NearProfile::Bounded { c0: 2.0 }, tail).unwrap();
        for r in [0.5, 1.5, 3.0] {
            assert!(large.eval_kernel(r).unwrap() >= small.eval_kernel(r).unwrap());
        }
        let grid = log_grid(1e-2, 1e3, 8);
        let a = build_symbol_table(&small, &grid).unwrap();
        let b = build_symbol_table(&large, &grid).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!(*y >= x - 1e-8);
        }
    }
}

#[test]
fn integrable_symbol_at_most_twice_kernel_mass() {
    for tail in [TailProfile::CompactSupport, TailProfile::PowerTail { alpha: 1.0 }, TailProfile::ExponentialTail { lambda: 2.0 }] {
        for dim in [1, 2] {
            let k = LevyKernel::new(dim, NearProfile::Bounded { c0: 1.0 }, tail).unwrap();
            let mass = k.l1_norm().unwrap();
            let tab = build_symbol_table(&k, &log_grid(1e-2, 1e4, 8)).unwrap();
            for m in &tab.values {
                assert!(*m <= 2.0 * mass * (1.0 + 1e-8), "{m} > 2 * {mass} for {k}");
            }
        }
    }
}

#[test]
fn borderline_symbol_grows_logarithmically() {
    let k = LevyKernel::new(1, NearProfile::Borderline, TailProfile::CompactSupport).unwrap();
    let tab = build_symbol_table(&k, &log_grid(10.0, 1e4, 16)).unwrap();
    let ratios: Vec<f64> = tab.radial_grid.iter().zip(&tab.values).map(|(r, m)| m / r.ln()).collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.5 && hi < 4.0, "{lo} {hi}");
}

#[test]
fn oscillating_symbol_is_logarithmically_bounded() {
    let k = LevyKernel::new(1, NearProfile::Oscillating { alpha_osc: 1.0 }, TailProfile::CompactSupport).unwrap();
    let tab = build_symbol_table(&k, &log_grid(4.0, 2f64.powi(20), 8)).unwrap();
    let c = tab
        .radial_grid
        .iter()
        .zip(&tab.values)
        .map(|(r, m)| m / r.ln())
        .fold(0.0, f64::max);
    assert!(c.is_finite() && c < 20.0, "{c}");
}
