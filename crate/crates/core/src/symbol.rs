//! The Fourier multiplier m(ξ) of L_J and empirical checks of its bounds.
//!
//! After radial reduction, with S_N the sphere measure and w(s) = 1 - cos s
//! (N = 1) or 1 - J0(s) (N = 2),
//!
//! ```text
//! m(ρ) = S_N ∫_0^∞ w(rρ) ℓ(r) / r dr.
//! ```
//!
//! The integral is split into three pieces:
//! * (0, ε]: Taylor form w(s) ≈ s²/(2N), giving S_N ρ² ε² ψ₂(ε) / (2N);
//! * [ε, R]: adaptive Gauss-Kronrod on panels no wider than half a period of w;
//!   in 1-D, once rρ > 400 on a piecewise-power profile, the panels stop and
//!   the oscillating factor is integrated through its endpoint asymptotics;
//! * [R, ∞): the non-oscillating part ∫ ℓ/r in closed form, minus the
//!   oscillating part summed zero to zero with Wynn acceleration.

use std::f64::consts::PI;

use crate::bessel;
use crate::error::{domain, Error, Result};
use crate::exec;
use crate::kernels::{LevyKernel, ProfileFn, TailProfile};
use crate::quad::{self, QuadOptions, QuadResult};
use crate::spectral::Complex64;

/// Relative tolerance of [`symbol_quadrature`].
pub const SYMBOL_TOL: f64 = 1e-8;

/// Tolerance used inside the panel and tail quadratures.
const INNER_TOL: f64 = 1e-11;

/// s·ρ at which the Taylor piece is cut off; its relative error is about (s)²/12.
const TAYLOR_ARG: f64 = 1e-4;

const TAIL_PERIODS: f64 = 20.0;

/// rρ beyond which the 1-D oscillating factor is integrated by its endpoint
/// asymptotic series on power pieces of ℓ(r)/r.
const ASYMPTOTIC_ARG: f64 = 400.0;

fn weight(dimension: usize, s: f64) -> f64 {
    if dimension == 1 {
        let h = (0.5 * s).sin();
        2.0 * h * h
    } else {
        bessel::one_minus_j0(s)
    }
}

fn oscillator(dimension: usize, s: f64) -> f64 {
    if dimension == 1 {
        s.cos()
    } else {
        bessel::j0(s)
    }
}

/// Integral of m through the three pieces, with error bookkeeping.
fn symbol_parts(k: &LevyKernel, rho: f64) -> Result<QuadResult> {
    let n = k.dimension();
    let eps = (TAYLOR_ARG / rho).min(0.5);
    let near = rho * rho * eps * eps * k.psi2(eps)? / (2.0 * n as f64);

    let compact = matches!(k.tail(), TailProfile::CompactSupport);
    let period = 2.0 * PI / rho;
    let big_r = if compact { 1.0 } else { (TAIL_PERIODS * period).max(1.0) };

    let f = |r: f64| weight(n, r * rho) * k.ell_unchecked(r) / r;
    let r0 = ASYMPTOTIC_ARG / rho;
    let asymptotic = n == 1 && r0 < 0.5 && r0 > eps && k.near_power_piece(0.5).is_some();
    let panel_end = if asymptotic { r0 } else { big_r };
    let mut pts = quad::graded_breaks(eps, panel_end, 0.5 * period);
    pts.extend(k.breakpoints(eps, panel_end));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let main = quad::integrate_panels(&f, &pts, &QuadOptions::rel(INNER_TOL));
    if !main.converged {
        return Err(Error::Numerical {
            what: format!("symbol panels at rho = {rho}"),
            achieved: main.achieved(),
        });
    }

    let far = if asymptotic { power_pieces(k, rho, r0) } else { 0.0 };
    let mut total = QuadResult {
        value: near + main.value + far,
        error: main.error + near * (eps * rho).powi(2) / 12.0,
        evaluations: main.evaluations,
        converged: true,
    };
    if !compact {
        let mass = k.tail_mass_beyond(big_r);
        let osc = oscillating_tail(k, rho, big_r, INNER_TOL * total.value.max(mass))?;
        total.value += mass - osc.value;
        total.error += osc.error;
        total.evaluations += osc.evaluations;
    }
    Ok(total)
}

/// ∫_{r0}^1 (1 - cos rρ) c r^e dr summed over the power pieces of ℓ(r)/r.
/// The oscillating part uses the antiderivative Re[e^{iρr} Σ_k (-1)^k g^{(k)}(r) (iρ)^{-k-1}],
/// whose terms shrink like k/(rρ).
fn power_pieces(k: &LevyKernel, rho: f64, r0: f64) -> f64 {
    let edges = quad::merge_breaks(r0, 1.0, &k.breakpoints(r0, 1.0));
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (c, e) = k.near_power_piece(0.5 * (a + b)).expect("power profile");
        let plain = if (e + 1.0).abs() < 1e-300 {
            c * (b / a).ln()
        } else {
            c * (b.powf(e + 1.0) - a.powf(e + 1.0)) / (e + 1.0)
        };
        let anti = |r: f64| {
            let mut term = Complex64::new(0.0, -c * r.powf(e) / rho);
            let mut sum = term;
            let mut last = term.norm();
            for j in 0..60 {
                term *= Complex64::new(0.0, (e - j as f64) / (r * rho));
                let size = term.norm();
                if size <= 1e-18 * sum.norm() || size >= last {
                    break;
                }
                sum += term;
                last = size;
            }
            (Complex64::from_polar(1.0, rho * r) * sum).re
        };
        total += plain - (anti(b) - anti(a));
    }
    total
}

/// ∫_R^∞ c(rρ) ℓ(r)/r dr with c = cos or J0, summed between consecutive zeros.
fn oscillating_tail(k: &LevyKernel, rho: f64, big_r: f64, tol: f64) -> Result<QuadResult> {
    let n = k.dimension();
    let f = |r: f64| oscillator(n, r * rho) * k.ell_unchecked(r) / r;
    let x0 = big_r * rho;
    let zero: Box<dyn Fn(usize) -> f64> = if n == 1 {
        let k0 = (x0 / PI - 0.5).floor().max(0.0) as usize + 1;
        Box::new(move |j| (k0 as f64 + j as f64 + 0.5) * PI / rho)
    } else {
        let mut k0 = ((x0 / PI + 0.25).floor() as usize).max(1);
        while k0 > 1 && bessel::j0_zero(k0 - 1) > x0 {
            k0 -= 1;
        }
        while bessel::j0_zero(k0) <= x0 {
            k0 += 1;
        }
        Box::new(move |j| bessel::j0_zero(k0 + j) / rho)
    };
    let opts = QuadOptions {
        rel_tol: INNER_TOL,
        abs_tol: 1e-3 * tol,
        max_intervals: 2000,
    };
    let res = quad::accelerated_series(
        |j| {
            let a = if j == 0 { big_r } else { zero(j - 1) };
            quad::integrate(&f, a, zero(j), &opts)
        },
        tol,
        4000,
    );
    if !res.converged {
        return Err(Error::Numerical {
            what: format!("oscillating tail at rho = {rho}"),
            achieved: res.achieved(),
        });
    }
    Ok(res)
}

/// m(|ξ|) by direct quadrature of the Lévy-Khintchine integral.
pub fn symbol_quadrature(k: &LevyKernel, xi_abs: f64) -> Result<f64> {
    symbol_with_error(k, xi_abs).map(|(v, _)| v)
}

/// m(|ξ|) together with its estimated relative error.
pub fn symbol_with_error(k: &LevyKernel, xi_abs: f64) -> Result<(f64, f64)> {
    if !(xi_abs >= 0.0) || !xi_abs.is_finite() {
        return Err(domain(format!("frequency must be finite and >= 0, got {xi_abs}")));
    }
    if xi_abs == 0.0 {
        return Ok((0.0, 0.0));
    }
    let parts = symbol_parts(k, xi_abs)?;
    let value = k.surface_measure() * parts.value;
    let rel = parts.error / parts.value.abs().max(f64::MIN_POSITIVE);
    if !(rel <= SYMBOL_TOL) || !value.is_finite() {
        return Err(Error::Numerical {
            what: format!("symbol quadrature at |xi| = {xi_abs}"),
            achieved: rel,
        });
    }
    Ok((value.max(0.0), rel))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// m(ξ) = c |ξ|^α.
    PurePower { alpha: f64, c: f64 },
}

impl ClosedForm {
    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::PurePower { alpha, c } => {
                if rho == 0.0 {
                    0.0
                } else {
                    c * rho.powf(alpha)
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            ClosedForm::PurePower { alpha, c } => format!("PurePower({alpha};{c:.16e})"),
        }
    }
}

/// The multiplier sampled on a radial frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    pub kernel_id: String,
    pub dimension: usize,
    pub radial_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub closed_form: Option<ClosedForm>,
    pub quad_tol: f64,
}

/// `per_decade` log-spaced points per decade on [lo, hi], both ends included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade > 0);
    let decades = (hi / lo).log10();
    let m = (decades * per_decade as f64).ceil().max(1.0) as usize;
    (0..=m)
        .map(|i| if i == m { hi } else { lo * 10f64.powf(decades * i as f64 / m as f64) })
        .collect()
}

/// 64 points per decade on [1e-3, 1e4].
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 1e4, 64)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    for (i, &x) in grid.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) {
            return Err(domain(format!("grid frequency {i} not positive: {x}")));
        }
        if i > 0 && grid[i - 1] >= x {
            return Err(domain(format!("grid not strictly increasing at index {i}")));
        }
    }
    Ok(())
}

pub fn build_symbol_table(k: &LevyKernel, grid: &[f64]) -> Result<SymbolTable> {
    validate_grid(grid)?;
    let (values, closed_form, quad_tol) = if let Some(alpha) = k.pure_power_exponent() {
        let (c, tol) = symbol_with_error(k, 1.0)?;
        let cf = ClosedForm::PurePower { alpha, c };
        (grid.iter().map(|&r| cf.eval(r)).collect(), Some(cf), tol)
    } else {
        let results = exec::map(grid, |&r| symbol_with_error(k, r));
        let mut values = Vec::with_capacity(grid.len());
        let mut tol: f64 = 0.0;
        for r in results {
            let (v, e) = r?;
            values.push(v);
            tol = tol.max(e);
        }
        (values, None, tol)
    };
    Ok(SymbolTable {
        kernel_id: k.id(),
        dimension: k.dimension(),
        radial_grid: grid.to_vec(),
        values,
        closed_form,
        quad_tol,
    })
}

impl SymbolTable {
    /// A table given by an exact closed form.
    pub fn from_closed_form(kernel_id: impl Into<String>, dimension: usize, cf: ClosedForm, grid: &[f64]) -> Result<Self> {
        validate_grid(grid)?;
        Ok(SymbolTable {
            kernel_id: kernel_id.into(),
            dimension,
            radial_grid: grid.to_vec(),
            values: grid.iter().map(|&r| cf.eval(r)).collect(),
            closed_form: Some(cf),
            quad_tol: 0.0,
        })
    }

    /// A table from raw samples, without a closed form.
    pub fn from_samples(kernel_id: impl Into<String>, dimension: usize, grid: &[f64], values: &[f64]) -> Result<Self> {
        validate_grid(grid)?;
        if grid.len() != values.len() {
            return Err(Error::Contract("grid and values differ in length".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("symbol samples must be finite and nonnegative"));
        }
        Ok(SymbolTable {
            kernel_id: kernel_id.into(),
            dimension,
            radial_grid: grid.to_vec(),
            values: values.to_vec(),
            closed_form: None,
            quad_tol: 0.0,
        })
    }

    /// The same table divided by `factor` (e.g. the pure-power constant).
    pub fn scaled(&self, factor: f64) -> SymbolTable {
        let mut t = self.clone();
        t.values.iter_mut().for_each(|v| *v /= factor);
        t.closed_form = t.closed_form.map(|ClosedForm::PurePower { alpha, c }| ClosedForm::PurePower {
            alpha,
            c: c / factor,
        });
        t.kernel_id = format!("{} / {factor}", self.kernel_id);
        t
    }

    /// Pure-power table normalized to m(ξ) = |ξ|^α.
    pub fn normalized(&self) -> Result<SymbolTable> {
        match self.closed_form {
            Some(ClosedForm::PurePower { c, .. }) => Ok(self.scaled(c)),
            None => Err(Error::Contract("only pure-power tables can be normalized".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.radial_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radial_grid.is_empty()
    }

    /// m at radius ρ: exact for closed forms, else log-log linear inside the
    /// grid and power-law extrapolation from the end segments outside it.
    pub fn eval(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if let Some(cf) = self.closed_form {
            return cf.eval(rho);
        }
        let g = &self.radial_grid;
        let v = &self.values;
        match g.len() {
            0 => return f64::NAN,
            1 => return v[0],
            _ => {}
        }
        let i = match g.partition_point(|&x| x <= rho) {
            0 => 0,
            j if j >= g.len() => g.len() - 2,
            j => j - 1,
        };
        let (x0, x1, y0, y1) = (g[i], g[i + 1], v[i], v[i + 1]);
        if y0 > 0.0 && y1 > 0.0 {
            let slope = (y1 / y0).ln() / (x1 / x0).ln();
            y0 * (rho / x0).powf(slope)
        } else {
            let t = (rho - x0) / (x1 - x0);
            (y0 + t * (y1 - y0)).max(0.0)
        }
    }

    /// Largest sampled multiplier.
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalBounds {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

/// Empirical C₁ ≤ m/min{1,ρ²} and m/max{1,ρ²} ≤ C₂ over the table.
pub fn check_global_bounds(tab: &SymbolTable) -> Result<GlobalBounds> {
    if tab.is_empty() {
        return Err(Error::Precondition("symbol table is empty".into()));
    }
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    for (&r, &m) in tab.radial_grid.iter().zip(&tab.values) {
        c1 = c1.min(m / (r * r).min(1.0));
        c2 = c2.max(m / (r * r).max(1.0));
    }
    Ok(GlobalBounds {
        c1,
        c2,
        pass: c1 > 0.0 && c1 <= c2 && c2.is_finite(),
    })
}

/// A ratio landscape over grid frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    /// (ρ, ratio) samples.
    pub samples: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// False when a caller-certified hypothesis is visibly violated.
    pub verified: bool,
    pub pass: bool,
}

impl RatioReport {
    fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        let mut r: Vec<f64> = samples.iter().map(|s| s.1).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        let min = r.first().copied().unwrap_or(f64::NAN);
        let max = r.last().copied().unwrap_or(f64::NAN);
        let median = r.get(r.len() / 2).copied().unwrap_or(f64::NAN);
        RatioReport {
            samples,
            min,
            max,
            median,
            verified: true,
            pass: false,
        }
    }
}

fn high_frequencies(tab: &SymbolTable) -> Result<Vec<(f64, f64)>> {
    let v: Vec<(f64, f64)> = tab
        .radial_grid
        .iter()
        .zip(&tab.values)
        .filter(|(r, _)| **r > 1.0)
        .map(|(r, m)| (*r, *m))
        .collect();
    if v.is_empty() {
        return Err(Error::Precondition("grid has no frequency above 1".into()));
    }
    Ok(v)
}

/// m(ρ)/(ψ₁(1/ρ) + ψ₂(1/ρ)) for ρ > 1. Passes when the landscape is finite
/// and its maximum stays within 10× its median.
pub fn check_upper_psi(k: &LevyKernel, tab: &SymbolTable) -> Result<RatioReport> {
    let mut samples = Vec::new();
    for (r, m) in high_frequencies(tab)? {
        let s = 1.0 / r;
        samples.push((r, m / (k.psi1(s)? + k.psi2(s)?)));
    }
    let mut rep = RatioReport::from_samples(samples);
    rep.pass = rep.max.is_finite() && rep.max <= 10.0 * rep.median;
    Ok(rep)
}

/// min over ρ > 1 of m(ρ)/ψ₁^β(1/ρ). The profile β must bound ℓ from below on
/// (0, 1); a visible violation marks the report unverified and failing.
pub fn check_lower_psi(k: &LevyKernel, tab: &SymbolTable, beta: &ProfileFn) -> Result<RatioReport> {
    let verified = log_grid(1e-8, 1.0 - 1e-9, 8)
        .into_iter()
        .all(|r| beta.eval(r) <= k.ell_unchecked(r) * (1.0 + 1e-12));
    let mut samples = Vec::new();
    for (r, m) in high_frequencies(tab)? {
        samples.push((r, m / beta.psi1(1.0 / r)?));
    }
    let mut rep = RatioReport::from_samples(samples);
    rep.verified = verified;
    rep.pass = verified && rep.min > 1e-6;
    Ok(rep)
}

/// c_emp = min over ρ ≤ 1 of m(ρ)/ρ^γ with γ = min{α, 2}.
pub fn check_small_xi_power(tab: &SymbolTable, alpha: f64) -> Result<RatioReport> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    let gamma = alpha.min(2.0);
    let samples: Vec<(f64, f64)> = tab
        .radial_grid
        .iter()
        .zip(&tab.values)
        .filter(|(r, _)| **r <= 1.0)
        .map(|(r, m)| (*r, m / r.powf(gamma)))
        .collect();
    if samples.is_empty() {
        return Err(Error::Precondition("grid has no frequency in (0, 1]".into()));
    }
    let mut rep = RatioReport::from_samples(samples);
    rep.pass = rep.min > 1e-8;
    Ok(rep)
}
