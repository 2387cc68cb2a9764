//! Catalog of radial Lévy kernels J, the radial profile ℓ(r) = r^N J(r), and
//! the ψ₁/ψ₂ integrals of ℓ that control the multiplier at large frequency.
//!
//! Every kernel is split at |z| = 1 into a near-origin profile and a tail
//! profile. The tail is scaled by `matching_constant`, which equals the value
//! of the near profile at r = 1, so J is continuous there. Exact formulas:
//!
//! | near profile         | J(r), 0 < r ≤ 1                         |
//! |----------------------|-----------------------------------------|
//! | `FractionalPower(β)` | r^{-N-β}                                |
//! | `Borderline`         | r^{-N}                                  |
//! | `LogPerturbed(p)`    | r^{-N} (1 + log(1/r))^{-p}              |
//! | `Bounded(c₀)`        | c₀                                      |
//! | `Oscillating(a)`     | r^{-N} ℓ(r), ℓ piecewise, b_k = 2^{a k} |
//!
//! | tail profile         | J(r), r > 1                             |
//! |----------------------|-----------------------------------------|
//! | `PowerTail(α)`       | c r^{-N-α}                              |
//! | `CompactSupport`     | 0                                       |
//! | `ExponentialTail(λ)` | c e^{-λ (r - 1)}                        |
//!
//! The oscillating profile takes the value b_k on (a_{2k+1}, a_{2k}] and 1 on
//! (a_{2k+2}, a_{2k+1}], where a_{2k} = 2^{-k} and a_{2k+1} = 2^{-k}(1 - 1/b_k).
//! Bands below 2^{-40} are replaced by ℓ = 1.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{self, March, QuadOptions};

/// Deepest dyadic band of the oscillating profile that is kept.
pub const OSCILLATING_K_MAX: u32 = 40;

/// Relative tolerance of the ψ quadratures.
pub const PSI_TOL: f64 = 1e-10;

/// Relative tolerance of the Lévy moment quadrature.
pub const MOMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NearProfile {
    #[serde(rename = "fractional")]
    FractionalPower { beta: f64 },
    Borderline,
    #[serde(rename = "log")]
    LogPerturbed { p: f64 },
    Bounded { c0: f64 },
    Oscillating { alpha_osc: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TailProfile {
    #[serde(rename = "power")]
    PowerTail { alpha: f64 },
    #[serde(rename = "compact")]
    CompactSupport,
    #[serde(rename = "exponential")]
    ExponentialTail { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyKernel {
    dimension: usize,
    near: NearProfile,
    tail: TailProfile,
    matching_constant: f64,
}

fn finite_positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite and positive, got {x}")))
    }
}

/// Dyadic shell index k with r ∈ (2^{-(k+1)}, 2^{-k}], for 0 < r ≤ 1.
fn dyadic_shell(r: f64) -> u32 {
    let mut k = (-r.log2()).floor().max(0.0) as i64;
    while k > 0 && 2f64.powi(-(k as i32)) < r {
        k -= 1;
    }
    while 2f64.powi(-(k as i32 + 1)) >= r {
        k += 1;
    }
    k as u32
}

fn oscillating_ell(alpha_osc: f64, r: f64) -> f64 {
    let k = dyadic_shell(r);
    if k > OSCILLATING_K_MAX {
        return 1.0;
    }
    let b = 2f64.powf(alpha_osc * k as f64);
    let lower = 2f64.powi(-(k as i32)) * (1.0 - 1.0 / b);
    if r > lower {
        b
    } else {
        1.0
    }
}

impl LevyKernel {
    pub fn new(dimension: usize, near: NearProfile, tail: TailProfile) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(domain(format!("dimension must be 1 or 2, got {dimension}")));
        }
        match near {
            NearProfile::FractionalPower { beta } => finite_positive(beta, "beta")?,
            NearProfile::Borderline => {}
            NearProfile::LogPerturbed { p } => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(domain(format!("log exponent p must lie in (0, 1], got {p}")));
                }
            }
            NearProfile::Bounded { c0 } => finite_positive(c0, "c0")?,
            NearProfile::Oscillating { alpha_osc } => {
                if !(alpha_osc.is_finite() && alpha_osc >= 0.0) {
                    return Err(domain(format!("alpha_osc must be >= 0, got {alpha_osc}")));
                }
            }
        }
        match tail {
            TailProfile::PowerTail { alpha } => {
                if !(alpha.is_finite() && alpha >= 0.0) {
                    return Err(domain(format!("tail alpha must be >= 0, got {alpha}")));
                }
            }
            TailProfile::CompactSupport => {}
            TailProfile::ExponentialTail { lambda } => finite_positive(lambda, "lambda")?,
        }
        let mut k = LevyKernel {
            dimension,
            near,
            tail,
            matching_constant: 1.0,
        };
        k.matching_constant = k.near_ell(1.0);
        Ok(k)
    }

    /// Builds the kernel and certifies it through [`LevyKernel::levy_moment`].
    pub fn admissible(dimension: usize, near: NearProfile, tail: TailProfile) -> Result<Self> {
        let k = Self::new(dimension, near, tail)?;
        k.levy_moment()?;
        Ok(k)
    }

    /// J(z) = |z|^{-N-α} on all of ℝ^N.
    pub fn pure_power(dimension: usize, alpha: f64) -> Result<Self> {
        Self::new(
            dimension,
            NearProfile::FractionalPower { beta: alpha },
            TailProfile::PowerTail { alpha },
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn near(&self) -> NearProfile {
        self.near
    }

    pub fn tail(&self) -> TailProfile {
        self.tail
    }

    pub fn matching_constant(&self) -> f64 {
        self.matching_constant
    }

    /// Surface measure of the unit sphere in ℝ^N.
    pub fn surface_measure(&self) -> f64 {
        match self.dimension {
            1 => 2.0,
            _ => 2.0 * PI,
        }
    }

    /// Exponent α when near and tail are the same pure power, so J = |z|^{-N-α}.
    pub fn pure_power_exponent(&self) -> Option<f64> {
        match (self.near, self.tail) {
            (NearProfile::FractionalPower { beta }, TailProfile::PowerTail { alpha }) if beta == alpha => {
                Some(alpha)
            }
            _ => None,
        }
    }

    pub fn is_integrable(&self) -> bool {
        matches!(self.near, NearProfile::Bounded { .. })
            && !matches!(self.tail, TailProfile::PowerTail { alpha } if alpha <= 0.0)
    }

    fn near_ell(&self, r: f64) -> f64 {
        let n = self.dimension as i32;
        match self.near {
            NearProfile::FractionalPower { beta } => r.powf(-beta),
            NearProfile::Borderline => 1.0,
            NearProfile::LogPerturbed { p } => (1.0 + (1.0 / r).ln()).powf(-p),
            NearProfile::Bounded { c0 } => c0 * r.powi(n),
            NearProfile::Oscillating { alpha_osc } => oscillating_ell(alpha_osc, r),
        }
    }

    fn tail_shape(&self, r: f64) -> f64 {
        let n = self.dimension as f64;
        match self.tail {
            TailProfile::PowerTail { alpha } => r.powf(-n - alpha),
            TailProfile::CompactSupport => 0.0,
            TailProfile::ExponentialTail { lambda } => (-lambda * (r - 1.0)).exp(),
        }
    }

    /// ℓ(r) = r^N J(r), no argument checks.
    pub(crate) fn ell_unchecked(&self, r: f64) -> f64 {
        if r <= 1.0 {
            self.near_ell(r)
        } else {
            r.powi(self.dimension as i32) * self.matching_constant * self.tail_shape(r)
        }
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        if r <= 1.0 {
            self.near_ell(r) / r.powi(self.dimension as i32)
        } else {
            self.matching_constant * self.tail_shape(r)
        }
    }

    /// J at radius r.
    pub fn eval_kernel(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("kernel radius must be positive, got {r}")));
        }
        Ok(self.eval_unchecked(r))
    }

    /// ℓ(r) = r^N J(r).
    pub fn ell(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("profile radius must be positive, got {r}")));
        }
        Ok(self.ell_unchecked(r))
    }

    /// (c, e) with ℓ(r)/r = c r^e on the smooth piece of (0, 1] containing r,
    /// when the near profile is piecewise a power.
    pub(crate) fn near_power_piece(&self, r: f64) -> Option<(f64, f64)> {
        let n = self.dimension as f64;
        match self.near {
            NearProfile::FractionalPower { beta } => Some((1.0, -beta - 1.0)),
            NearProfile::Borderline => Some((1.0, -1.0)),
            NearProfile::Bounded { c0 } => Some((c0, n - 1.0)),
            NearProfile::Oscillating { alpha_osc } => Some((oscillating_ell(alpha_osc, r), -1.0)),
            NearProfile::LogPerturbed { .. } => None,
        }
    }

    /// Points in (a, b) where ℓ is discontinuous or changes formula.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![1.0];
        if let NearProfile::Oscillating { alpha_osc } = self.near {
            for k in 0..=OSCILLATING_K_MAX + 1 {
                pts.push(2f64.powi(-(k as i32)));
                if k >= 1 && k <= OSCILLATING_K_MAX {
                    let bk = 2f64.powf(alpha_osc * k as f64);
                    pts.push(2f64.powi(-(k as i32)) * (1.0 - 1.0 / bk));
                }
            }
        }
        pts.retain(|&x| x > a && x < b);
        pts.sort_by(|x, y| x.total_cmp(y));
        pts.dedup();
        pts
    }

    fn check_unit_interval(r: f64) -> Result<()> {
        if r > 0.0 && r < 1.0 {
            Ok(())
        } else {
            Err(domain(format!("psi argument must lie in (0, 1), got {r}")))
        }
    }

    /// ψ₁(r) = ∫_r^1 ℓ(s)/s ds.
    pub fn psi1(&self, r: f64) -> Result<f64> {
        Self::check_unit_interval(r)?;
        let n = self.dimension as f64;
        match self.near {
            NearProfile::FractionalPower { beta } => Ok((r.powf(-beta) - 1.0) / beta),
            NearProfile::Borderline => Ok(-r.ln()),
            NearProfile::Bounded { c0 } => Ok(c0 * (1.0 - r.powf(n)) / n),
            NearProfile::LogPerturbed { .. } | NearProfile::Oscillating { .. } => {
                let f = |s: f64| self.near_ell(s) / s;
                let mut breaks = dyadic_points(r, 1.0);
                breaks.extend(self.breakpoints(r, 1.0));
                let pts = quad::merge_breaks(r, 1.0, &breaks);
                quad::integrate_panels(&f, &pts, &QuadOptions::rel(PSI_TOL)).into_result("psi1 quadrature")
            }
        }
    }

    /// ψ₂(r) = r^{-2} ∫_0^r s ℓ(s) ds.
    pub fn psi2(&self, r: f64) -> Result<f64> {
        Self::check_unit_interval(r)?;
        let n = self.dimension as f64;
        match self.near {
            NearProfile::FractionalPower { beta } => {
                if beta >= 2.0 {
                    Err(Error::Admissibility(crate::error::DivergentEnd::Origin))
                } else {
                    Ok(r.powf(-beta) / (2.0 - beta))
                }
            }
            NearProfile::Borderline => Ok(0.5),
            NearProfile::Bounded { c0 } => Ok(c0 * r.powf(n) / (n + 2.0)),
            NearProfile::LogPerturbed { .. } | NearProfile::Oscillating { .. } => {
                let f = |s: f64| s * self.near_ell(s);
                let res = quad::march_shells(
                    &f,
                    r,
                    March::ToOrigin,
                    |a, b| self.breakpoints(a, b),
                    &QuadOptions::rel(PSI_TOL),
                )?;
                Ok(res.into_result("psi2 quadrature")? / (r * r))
            }
        }
    }

    /// ∫ J(z) (|z|² ∧ 1) dz by radial reduction. Divergence at either end is an
    /// admissibility error naming that end.
    pub fn levy_moment(&self) -> Result<f64> {
        let opts = QuadOptions::rel(MOMENT_TOL * 1e-2);
        let inner = quad::march_shells(
            &|s: f64| s * self.ell_unchecked(s),
            1.0,
            March::ToOrigin,
            |a, b| self.breakpoints(a, b),
            &opts,
        )?;
        let outer = quad::march_shells(
            &|s: f64| self.ell_unchecked(s) / s,
            1.0,
            March::ToInfinity,
            |_, _| Vec::new(),
            &opts,
        )?;
        let v = self.surface_measure() * (inner.value + outer.value);
        if !(v.is_finite()) {
            return Err(Error::Numerical {
                what: "levy moment".into(),
                achieved: f64::INFINITY,
            });
        }
        Ok(v)
    }

    /// ‖J‖₁, finite only for kernels bounded near the origin.
    pub fn l1_norm(&self) -> Result<f64> {
        let opts = QuadOptions::rel(1e-12);
        let inner = quad::march_shells(
            &|s: f64| self.ell_unchecked(s) / s,
            1.0,
            March::ToOrigin,
            |a, b| self.breakpoints(a, b),
            &opts,
        )?;
        let outer = quad::march_shells(
            &|s: f64| self.ell_unchecked(s) / s,
            1.0,
            March::ToInfinity,
            |_, _| Vec::new(),
            &opts,
        )?;
        Ok(self.surface_measure() * (inner.value + outer.value))
    }

    /// min{α, 2} for power tails; 2 for tails decaying faster than any power.
    pub fn tail_exponent(&self) -> f64 {
        match self.tail {
            TailProfile::PowerTail { alpha } => alpha.min(2.0),
            TailProfile::CompactSupport | TailProfile::ExponentialTail { .. } => 2.0,
        }
    }

    /// ∫_R^∞ ℓ(s)/s ds for R ≥ 1 in closed form.
    pub(crate) fn tail_mass_beyond(&self, big_r: f64) -> f64 {
        let c = self.matching_constant;
        match self.tail {
            TailProfile::PowerTail { alpha } => {
                if alpha > 0.0 {
                    c * big_r.powf(-alpha) / alpha
                } else {
                    f64::INFINITY
                }
            }
            TailProfile::CompactSupport => 0.0,
            TailProfile::ExponentialTail { lambda } => {
                let e = (-lambda * (big_r - 1.0)).exp();
                match self.dimension {
                    1 => c * e / lambda,
                    _ => c * e * (big_r / lambda + 1.0 / (lambda * lambda)),
                }
            }
        }
    }

    /// Short human-readable identifier.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LevyKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} near=", self.dimension)?;
        match self.near {
            NearProfile::FractionalPower { beta } => write!(f, "fractional(beta={beta})")?,
            NearProfile::Borderline => write!(f, "borderline")?,
            NearProfile::LogPerturbed { p } => write!(f, "log(p={p})")?,
            NearProfile::Bounded { c0 } => write!(f, "bounded(c0={c0})")?,
            NearProfile::Oscillating { alpha_osc } => write!(f, "oscillating(alpha_osc={alpha_osc})")?,
        }
        write!(f, " tail=")?;
        match self.tail {
            TailProfile::PowerTail { alpha } => write!(f, "power(alpha={alpha})"),
            TailProfile::CompactSupport => write!(f, "compact"),
            TailProfile::ExponentialTail { lambda } => write!(f, "exponential(lambda={lambda})"),
        }
    }
}

/// Powers of two strictly inside (a, b].
fn dyadic_points(a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let mut x = 1.0;
    while x > b {
        x *= 0.5;
    }
    while x > a {
        pts.push(x);
        x *= 0.5;
    }
    pts
}

/// A radial profile r ↦ β(r), used as a certified lower bound for ℓ.
#[derive(Clone)]
pub struct ProfileFn {
    name: String,
    rule: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ProfileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProfileFn({})", self.name)
    }
}

impl ProfileFn {
    pub fn new(name: impl Into<String>, rule: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ProfileFn {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    /// The profile ℓ of a catalog kernel.
    pub fn of_kernel(k: &LevyKernel) -> Self {
        let k = k.clone();
        ProfileFn::new(format!("ell[{k}]"), move |r| k.ell_unchecked(r))
    }

    /// β(r) = r^{rho}.
    pub fn power(rho: f64) -> Self {
        ProfileFn::new(format!("r^{rho}"), move |r: f64| r.powf(rho))
    }

    pub fn constant(c: f64) -> Self {
        ProfileFn::new(format!("{c}"), move |_| c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.rule)(r)
    }

    /// ψ₁ of this profile by adaptive quadrature.
    pub fn psi1(&self, r: f64) -> Result<f64> {
        LevyKernel::check_unit_interval(r)?;
        let f = |s: f64| self.eval(s) / s;
        let pts = quad::merge_breaks(r, 1.0, &dyadic_points(r, 1.0));
        quad::integrate_panels(&f, &pts, &QuadOptions::rel(PSI_TOL)).into_result("profile psi1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize, near: NearProfile, tail: TailProfile) -> LevyKernel {
        LevyKernel::new(n, near, tail).unwrap()
    }

    #[test]
    fn eval_examples() {
        let a = k(1, NearProfile::FractionalPower { beta: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert_eq!(a.eval_kernel(2.0).unwrap(), 0.25);
        let b = k(1, NearProfile::Bounded { c0: 1.0 }, TailProfile::CompactSupport);
        assert_eq!(b.eval_kernel(2.0).unwrap(), 0.0);
        let c = k(2, NearProfile::Borderline, TailProfile::PowerTail { alpha: 0.5 });
        assert_eq!(c.eval_kernel(0.5).unwrap(), 4.0);
        assert!(c.eval_kernel(0.0).is_err());
        assert!(c.eval_kernel(-1.0).is_err());
    }

    #[test]
    fn continuity_at_unit_radius() {
        let b = k(2, NearProfile::Bounded { c0: 3.0 }, TailProfile::ExponentialTail { lambda: 2.0 });
        let lo = b.eval_kernel(1.0).unwrap();
        let hi = b.eval_kernel(1.0 + 1e-12).unwrap();
        assert!((lo - hi).abs() < 1e-10);
        assert_eq!(b.matching_constant(), 3.0);
    }

    #[test]
    fn ell_examples() {
        let bl = k(1, NearProfile::Borderline, TailProfile::CompactSupport);
        for r in [0.01, 0.3, 0.99] {
            assert_eq!(bl.ell(r).unwrap(), 1.0);
        }
        let fp = k(2, NearProfile::FractionalPower { beta: 0.7 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!((fp.ell(0.2).unwrap() - 0.2f64.powf(-0.7)).abs() < 1e-12);
        let osc = k(1, NearProfile::Oscillating { alpha_osc: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert_eq!(osc.ell(0.21875).unwrap(), 4.0);
    }

    #[test]
    fn oscillating_band_edges() {
        let osc = k(1, NearProfile::Oscillating { alpha_osc: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        for kk in 2..=20 {
            let a_even = 2f64.powi(-kk);
            let b = 2f64.powi(kk);
            let a_odd = a_even * (1.0 - 1.0 / b);
            let below = |x: f64| x * (1.0 - 1e-12);
            assert_eq!(osc.ell(below(a_even)).unwrap(), b, "k={kk}");
            assert_eq!(osc.ell(below(a_odd)).unwrap(), 1.0, "k={kk}");
            assert_eq!(osc.ell(a_even).unwrap(), b);
        }
        // beyond the truncation depth the profile is flat
        assert_eq!(osc.ell(2f64.powi(-45)).unwrap(), 1.0);
    }

    #[test]
    fn psi_closed_forms() {
        let bl = k(1, NearProfile::Borderline, TailProfile::CompactSupport);
        assert!((bl.psi1(0.1).unwrap() - 10f64.ln()).abs() < 1e-15);
        assert_eq!(bl.psi2(0.3).unwrap(), 0.5);
        let fp = k(1, NearProfile::FractionalPower { beta: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!((fp.psi1(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((fp.psi2(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(fp.psi1(1.0).is_err());
        assert!(fp.psi2(0.0).is_err());
    }

    #[test]
    fn log_perturbed_quadrature_matches_substitution() {
        // With u = 1 + log(1/s): ψ₁(r) = ((1+L)^{1-p} - 1)/(1-p), L = log(1/r).
        for &p in &[0.3, 0.5, 1.0] {
            let lp = k(1, NearProfile::LogPerturbed { p }, TailProfile::PowerTail { alpha: 1.0 });
            for &r in &[0.5, 1e-3, 1e-8] {
                let l = (1.0f64 / r).ln();
                let exact = if p == 1.0 {
                    (1.0 + l).ln()
                } else {
                    ((1.0 + l).powf(1.0 - p) - 1.0) / (1.0 - p)
                };
                let got = lp.psi1(r).unwrap();
                assert!(((got - exact) / exact).abs() < 1e-10, "p={p} r={r}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn oscillating_psi_bounds() {
        let osc = k(1, NearProfile::Oscillating { alpha_osc: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        let ratios: Vec<f64> = (1..=20).map(|kk| osc.psi1(2f64.powi(-kk)).unwrap() / kk as f64).collect();
        let c = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(c < 3.0, "psi1/k grows: {ratios:?}");
        let psi2: Vec<f64> = (1..=20).map(|kk| osc.psi2(2f64.powi(-kk)).unwrap()).collect();
        let hi = psi2.iter().cloned().fold(0.0, f64::max);
        assert!(hi < 2.0, "{psi2:?}");
    }

    #[test]
    fn levy_moment_examples() {
        let a = k(1, NearProfile::FractionalPower { beta: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!((a.levy_moment().unwrap() - 4.0).abs() < 4e-8);
        let div = k(1, NearProfile::FractionalPower { beta: 2.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!(matches!(
            div.levy_moment(),
            Err(Error::Admissibility(crate::error::DivergentEnd::Origin))
        ));
        let div3 = k(1, NearProfile::FractionalPower { beta: 2.5 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!(div3.levy_moment().is_err());
        let b = k(2, NearProfile::Bounded { c0: 1.0 / PI }, TailProfile::CompactSupport);
        assert!((b.levy_moment().unwrap() - 0.5).abs() < 1e-8);
        let inf = k(1, NearProfile::Bounded { c0: 1.0 }, TailProfile::PowerTail { alpha: 0.0 });
        assert!(matches!(
            inf.levy_moment(),
            Err(Error::Admissibility(crate::error::DivergentEnd::Infinity))
        ));
    }

    #[test]
    fn tail_exponents() {
        let t = |tail| k(1, NearProfile::Borderline, tail).tail_exponent();
        assert_eq!(t(TailProfile::PowerTail { alpha: 0.5 }), 0.5);
        assert_eq!(t(TailProfile::PowerTail { alpha: 3.0 }), 2.0);
        assert_eq!(t(TailProfile::CompactSupport), 2.0);
        assert_eq!(t(TailProfile::ExponentialTail { lambda: 1.0 }), 2.0);
    }

    #[test]
    fn l1_norm_of_bounded_kernel() {
        let b = k(1, NearProfile::Bounded { c0: 1.0 }, TailProfile::PowerTail { alpha: 1.0 });
        assert!((b.l1_norm().unwrap() - 4.0).abs() < 1e-10);
        let e = k(2, NearProfile::Bounded { c0: 2.0 }, TailProfile::ExponentialTail { lambda: 1.0 });
        // 2π [∫_0^1 2 r dr + 2 ∫_1^∞ r e^{-(r-1)} dr] = 2π (1 + 4)
        assert!((e.l1_norm().unwrap() - 10.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LevyKernel::new(3, NearProfile::Borderline, TailProfile::CompactSupport).is_err());
        assert!(LevyKernel::new(1, NearProfile::LogPerturbed { p: 1.5 }, TailProfile::CompactSupport).is_err());
        assert!(LevyKernel::new(1, NearProfile::Bounded { c0: 0.0 }, TailProfile::CompactSupport).is_err());
    }
}
