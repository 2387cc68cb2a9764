//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series up to |x| = 12, Hankel asymptotic expansion beyond. Both
//! branches are accurate to about 1e-12 absolute at the switch point.

use std::f64::consts::PI;

pub const SERIES_LIMIT: f64 = 12.0;

fn series_j0_tail(x: f64) -> f64 {
    // Σ_{k≥1} (-1)^k (x²/4)^k / (k!)², i.e. J0(x) - 1
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn series_j1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel P and Q series for order `nu`, truncated at the smallest term.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if last < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        1.0 + series_j0_tail(x)
    } else {
        hankel(0.0, x)
    }
}

/// 1 - J0(x) without cancellation for small x.
pub fn one_minus_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        -series_j0_tail(x)
    } else {
        1.0 - hankel(0.0, x)
    }
}

pub fn j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x <= SERIES_LIMIT {
        series_j1(x)
    } else {
        hankel(1.0, x)
    }
}

/// k-th positive zero of J0 (k ≥ 1): McMahon's expansion polished by Newton.
pub fn j0_zero(k: usize) -> f64 {
    assert!(k >= 1);
    let b = (k as f64 - 0.25) * PI;
    let b8 = 8.0 * b;
    let mut x = b + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3)) + 120_928.0 / (15.0 * b8.powi(5));
    for _ in 0..8 {
        let step = j0(x) / j1(x);
        x += step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // J_n(x) = (1/π) ∫_0^π cos(nθ - x sin θ) dθ; the trapezoid rule on a
    // periodic analytic integrand converges geometrically.
    fn oracle(n: i32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let th = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * (n as f64 * th - x * th.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn j0_matches_integral_representation() {
        for &x in &[0.0, 0.3, 1.0, 2.404825557695773, 5.0, 11.9, 12.0, 12.1, 20.0, 55.5, 300.0] {
            let e = oracle(0, x);
            assert!((j0(x) - e).abs() < 1e-11, "x={x}: {} vs {e}", j0(x));
        }
    }

    #[test]
    fn j1_matches_integral_representation() {
        for &x in &[0.1, 1.0, 3.8317, 7.0, 11.99, 12.01, 33.0, 150.0] {
            let e = oracle(1, x);
            assert!((j1(x) - e).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn one_minus_j0_small_argument_is_accurate() {
        let x: f64 = 1e-5;
        let expected = x * x / 4.0 - x.powi(4) / 64.0;
        assert!((one_minus_j0(x) - expected).abs() < 1e-25);
    }

    #[test]
    fn zeros_are_zeros() {
        assert!((j0_zero(1) - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((j0_zero(2) - 5.520_078_110_286_311).abs() < 1e-12);
        for k in [3, 10, 100, 1000] {
            assert!(j0(j0_zero(k)).abs() < 1e-12);
        }
    }
}
