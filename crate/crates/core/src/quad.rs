//! Adaptive Gauss-Kronrod quadrature, Wynn epsilon acceleration, and dyadic
//! shell marching for improper radial integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{DivergentEnd, Error, Result};

// 21-point Kronrod abscissae on [0, 1]; the odd entries are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_926_339_015_177,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute floor; keeps refinement from chasing zero-valued pieces near r = 0.
pub const ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            abs_tol: ABS_FLOOR,
            max_intervals: 2000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::rel(1e-10)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// Relative error actually achieved (absolute when the value is zero).
    pub fn achieved(&self) -> f64 {
        if self.value != 0.0 {
            self.error / self.value.abs()
        } else {
            self.error
        }
    }

    pub fn into_result(self, what: &str) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::Numerical {
                what: what.to_string(),
                achieved: self.achieved(),
            })
        }
    }

    fn add(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod evaluation on [a, b] with the QUADPACK error heuristic.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Globally adaptive bisection on [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            converged: true,
            ..Default::default()
        };
    }
    let (value, error) = gk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 21;
    let mut roundoff = false;
    while total_err > opts.target(total) && heap.len() < opts.max_intervals {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot bisect further in floating point.
            heap.push(worst);
            roundoff = true;
            break;
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running totals.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    QuadResult {
        value,
        error,
        evaluations,
        converged: !roundoff && error <= opts.target(value),
    }
}

/// Integrates over consecutive panels `breaks[i]..breaks[i+1]`, each adaptively.
///
/// Every panel receives the full relative tolerance against its own value, so
/// for sign-definite integrands the sum meets the tolerance as well.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], opts: &QuadOptions) -> QuadResult {
    let mut acc = QuadResult {
        converged: true,
        ..Default::default()
    };
    for w in breaks.windows(2) {
        acc.add(integrate(f, w[0], w[1], opts));
    }
    acc
}

/// Merges sorted breakpoints with extra points lying strictly inside (a, b).
pub fn merge_breaks(a: f64, b: f64, interior: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(interior.len() + 2);
    out.push(a);
    for &x in interior {
        if x > a && x < b {
            out.push(x);
        }
    }
    out.push(b);
    out.sort_by(|x, y| x.total_cmp(y));
    out.dedup();
    out
}

/// Wynn's epsilon algorithm over a sequence of partial sums. Returns the
/// highest-order even-column estimate.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return sums.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut best = sums[n - 1];
    let mut order = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || !d.is_finite() {
                // Column has converged exactly.
                return if order % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        order += 1;
        prev = cur;
        cur = next;
        if order % 2 == 0 {
            let v = cur[cur.len() - 1];
            if v.is_finite() {
                best = v;
            }
        }
    }
    best
}

/// Sums a slowly converging alternating series of panel integrals with Wynn
/// acceleration. `panel(k)` returns the k-th panel integral. Stops when two
/// consecutive extrapolations agree within `tol`.
pub fn accelerated_series<P: FnMut(usize) -> QuadResult>(
    mut panel: P,
    tol: f64,
    max_terms: usize,
) -> QuadResult {
    const WINDOW: usize = 40;
    let mut sums: Vec<f64> = Vec::new();
    let mut running = 0.0;
    let mut evaluations = 0;
    let mut quad_err = 0.0;
    let mut last_est = f64::NAN;
    let mut agreements = 0;
    for k in 0..max_terms {
        let p = panel(k);
        evaluations += p.evaluations;
        quad_err += p.error;
        running += p.value;
        sums.push(running);
        let start = sums.len().saturating_sub(WINDOW);
        let est = wynn_epsilon(&sums[start..]);
        if k >= 6 {
            let diff = (est - last_est).abs();
            if diff <= tol {
                agreements += 1;
                if agreements >= 2 {
                    return QuadResult {
                        value: est,
                        error: diff + quad_err,
                        evaluations,
                        converged: true,
                    };
                }
            } else {
                agreements = 0;
            }
        }
        if p.value.abs() <= 1e-3 * tol && k >= 2 {
            // Terms decay fast enough (exponential tails) that plain summation has converged.
            return QuadResult {
                value: running,
                error: quad_err,
                evaluations,
                converged: true,
            };
        }
        last_est = est;
    }
    QuadResult {
        value: last_est,
        error: f64::INFINITY,
        evaluations,
        converged: false,
    }
}

/// Direction of a dyadic shell march.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum March {
    /// Shells [r/2^{j+1}, r/2^j] toward the origin.
    ToOrigin,
    /// Shells [2^j r, 2^{j+1} r] toward infinity.
    ToInfinity,
}

/// Partial-integral magnitude beyond which a march is declared divergent.
pub const DIVERGENCE_CEILING: f64 = 1e12;

/// Improper integral of a nonnegative integrand over (0, start] or [start, ∞)
/// by marching dyadic shells. Shell increments of power-law integrands are
/// geometric, which is exploited to close the tail exactly once the ratio
/// stabilises; nondecaying increments certify divergence.
pub fn march_shells<F, B>(f: &F, start: f64, dir: March, breaks: B, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    B: Fn(f64, f64) -> Vec<f64>,
{
    const MAX_SHELLS: usize = 1000;
    let end = match dir {
        March::ToOrigin => DivergentEnd::Origin,
        March::ToInfinity => DivergentEnd::Infinity,
    };
    let mut acc = QuadResult {
        converged: true,
        ..Default::default()
    };
    let mut prev_inc = f64::NAN;
    let mut prev_q = f64::NAN;
    let mut nondecay = 0;
    let mut edge = start;
    for j in 0..MAX_SHELLS {
        let (a, b) = match dir {
            March::ToOrigin => (0.5 * edge, edge),
            March::ToInfinity => (edge, 2.0 * edge),
        };
        edge = match dir {
            March::ToOrigin => a,
            March::ToInfinity => b,
        };
        let pts = merge_breaks(a, b, &breaks(a, b));
        let shell = integrate_panels(f, &pts, opts);
        acc.add(shell);
        let inc = shell.value;
        if !acc.value.is_finite() || acc.value.abs() > DIVERGENCE_CEILING {
            return Err(Error::Admissibility(end));
        }
        if inc == 0.0 && j >= 2 {
            // Compactly supported beyond this point.
            return Ok(acc);
        }
        if j >= 1 && prev_inc > 0.0 {
            let q = inc / prev_inc;
            if q >= 1.0 - 1e-9 {
                nondecay += 1;
                if nondecay >= 5 {
                    return Err(Error::Admissibility(end));
                }
            } else {
                nondecay = 0;
                let tail = inc * q / (1.0 - q);
                let stable = (q - prev_q).abs() <= 1e-10 * (1.0 - q);
                if tail.abs() <= opts.rel_tol * acc.value.abs() || (stable && j >= 4) {
                    acc.value += tail;
                    acc.error += (tail * (q - prev_q).abs() / (1.0 - q)).abs();
                    return Ok(acc);
                }
            }
            prev_q = q;
        }
        prev_inc = inc;
        if a <= f64::MIN_POSITIVE * 1e6 || b >= f64::MAX / 4.0 {
            break;
        }
    }
    Err(Error::Numerical {
        what: "shell march did not settle".into(),
        achieved: acc.achieved(),
    })
}

/// Panel breakpoints on [a, b]: geometric doubling from `a` until the panel
/// width reaches `width`, then uniform panels of that width.
pub fn graded_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    debug_assert!(a > 0.0 && b > a && width > 0.0);
    let mut out = vec![a];
    let mut x = a;
    while x < b {
        let step = x.min(width);
        x = (x + step).min(b);
        if b - x < 1e-12 * b {
            x = b;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_exact_through_degree_31() {
        for deg in 0..=31u32 {
            let (v, _) = gk21(&|x: f64| x.powi(deg as i32), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn gauss_part_exact_through_degree_19() {
        // Reconstruct the 10-point Gauss rule from the shared nodes.
        let gauss = |deg: i32| -> f64 {
            (0..5)
                .map(|j| {
                    let x = XGK[2 * j + 1];
                    WG[j] * (x.powi(deg) + (-x).powi(deg))
                })
                .sum::<f64>()
        };
        for deg in 0..=19 {
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((gauss(deg) - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, &QuadOptions::rel(1e-10));
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let est = wynn_epsilon(&sums);
        assert!((est - std::f64::consts::LN_2).abs() < 1e-10, "{est}");
    }

    #[test]
    fn march_detects_divergence_and_convergence() {
        let none = |_: f64, _: f64| Vec::new();
        let opts = QuadOptions::rel(1e-10);
        // ∫_0^1 s^{-0.99} ds = 100 converges slowly but geometrically.
        let r = march_shells(&|s: f64| s.powf(-0.99), 1.0, March::ToOrigin, none, &opts).unwrap();
        assert!((r.value - 100.0).abs() < 1e-6, "{}", r.value);
        let e = march_shells(&|s: f64| 1.0 / s, 1.0, March::ToOrigin, none, &opts);
        assert!(matches!(e, Err(Error::Admissibility(DivergentEnd::Origin))));
        let e = march_shells(&|s: f64| 1.0 / s, 1.0, March::ToInfinity, none, &opts);
        assert!(matches!(e, Err(Error::Admissibility(DivergentEnd::Infinity))));
        let r = march_shells(&|s: f64| s.powi(-2), 1.0, March::ToInfinity, none, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn graded_breaks_cover_interval() {
        let b = graded_breaks(1e-4, 1.0, 0.1);
        assert_eq!(b[0], 1e-4);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15));
    }
}
