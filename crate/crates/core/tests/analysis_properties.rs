use levyheat::analysis::{
    bilinear_form, converse_nash_check, fit_decay_exponent, interpolation_check, nash_ratio, theta_exponents,
    DecayCertificate, FitWindow,
};
use levyheat::datum::{box_field, dilated_smooth_box, random_band_limited};
use levyheat::evolve::{propagate_linear, propagate_series, LinearPropagator};
use levyheat::kernels::LevyKernel;
use levyheat::spectral::{lp_norm, PeriodicGrid};
use proptest::prelude::*;

fn alpha1(grid: PeriodicGrid) -> LinearPropagator {
    LinearPropagator::from_kernel(&LevyKernel::pure_power(1, 1.0).unwrap(), grid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bilinear_form_symmetry(a in any::<u64>(), b in any::<u64>()) {
        let g = PeriodicGrid::new(1, 8.0, 256).unwrap();
        let p = alpha1(g);
        let f = random_band_limited(&g, 30, a).unwrap();
        let h = random_band_limited(&g, 30, b).unwrap();
        let x = bilinear_form(&p, &f, &h).unwrap();
        let y = bilinear_form(&p, &h, &f).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn nash_ratio_ignores_amplitude(seed in any::<u64>(), c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let g = PeriodicGrid::new(1, 8.0, 256).unwrap();
        let p = alpha1(g);
        let f = random_band_limited(&g, 10, seed).unwrap();
        let a = nash_ratio(&p, &f, 1.0 / 3.0, 1.5).unwrap();
        let b = nash_ratio(&p, &f.scaled(c), 1.0 / 3.0, 1.5).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio);
        prop_assert_eq!(a.branch, b.branch);
    }

    #[test]
    fn theta_one_exceeds_theta_two(r in 1.0001f64..1.999, frac in 0.001f64..1.0, gamma in 1e-3f64..2.0, n in 1usize..=2) {
        let s = r + frac * (2.0 - r);
        let (t1, t2) = theta_exponents(r, s, gamma, n).unwrap();
        prop_assert!(t1 > t2);
        prop_assert!((0.0..1.0).contains(&t2) && t1 < 1.0 + 1e-12);
    }

    #[test]
    fn decay_fit_recovers_synthetic_exponents(e in 0.1f64..3.0, c in 0.01f64..100.0) {
        let series: Vec<(f64, f64)> = (0..25).map(|i| 1.3f64.powi(i)).map(|t| (t, c * t.powf(-e))).collect();
        let fit = fit_decay_exponent(&series, FitWindow::Auto).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-10);
    }
}

#[test]
fn poisson_sup_series_has_unit_exponent() {
    let series: Vec<(f64, f64)> = (0..40)
        .map(|i| 100f64.powf(i as f64 / 39.0))
        .map(|t| (t, 1.0 / (std::f64::consts::PI * t)))
        .collect();
    let fit = fit_decay_exponent(&series, FitWindow::Range { t_lo: 1.0, t_hi: 100.0 }).unwrap();
    assert!((fit.exponent - 1.0).abs() < 1e-6);
}

#[test]
fn energy_decay_exponent_dominates_nash_dimension() {
    // ψ(t) = ‖u(t)‖₂² for a box under the α = 1 flow; d = N(2-r)/(rα) with r = 1.
    let g = PeriodicGrid::new(1, 4096.0, 1 << 16).unwrap();
    let p = alpha1(g);
    let u0 = box_field(&g, 1.0).unwrap();
    let times: Vec<f64> = (0..30).map(|i| 200f64.powf(i as f64 / 29.0)).collect();
    let fields = propagate_series(&p, &u0, &times).unwrap();
    let series: Vec<(f64, f64)> = times
        .iter()
        .zip(&fields)
        .map(|(t, f)| (*t, lp_norm(f, 2.0).unwrap().powi(2)))
        .collect();
    let fit = fit_decay_exponent(&series, FitWindow::Auto).unwrap();
    let d = 1.0;
    assert!(fit.exponent >= d * 0.9, "{fit:?}");
}

#[test]
fn converse_nash_on_evolved_box() {
    let g = PeriodicGrid::new(1, 512.0, 1 << 14).unwrap();
    let p = alpha1(g);
    let v = propagate_linear(&p, &box_field(&g, 1.0).unwrap(), 1.0).unwrap();
    let times: Vec<f64> = (0..12).map(|i| 2f64 * 1.4f64.powi(i)).collect();
    let cert = DecayCertificate::measure(&p, &v, 1.0, 64.0, 1.0, &times).unwrap();
    assert!(cert.nu > 0.5, "{cert:?}");
    let rep = converse_nash_check(&p, &v, Some(&cert)).unwrap();
    assert!(rep.pass && rep.ratio > 0.0);
    // a different field cannot reuse the certificate
    let other = v.scaled(2.0);
    assert!(converse_nash_check(&p, &other, Some(&cert)).is_err());
}

#[test]
fn interpolation_constant_bounded_over_dilations() {
    let g = PeriodicGrid::new(1, 128.0, 1 << 16).unwrap();
    let p = alpha1(g);
    let mut constants = Vec::new();
    for j in -6..=6 {
        let z = dilated_smooth_box(&g, 1.0, 0.25, 2f64.powi(j)).unwrap();
        constants.push(interpolation_check(&p, &z, 1.5, 2.0, 1.0).unwrap().constant);
    }
    let max = constants.iter().cloned().fold(0.0, f64::max);
    let min = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max.is_finite() && min > 0.0, "{constants:?}");
}
