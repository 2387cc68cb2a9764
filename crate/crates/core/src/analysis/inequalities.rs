//! Stroock-Varopoulos, restricted Nash, converse Nash and interpolation checks.
//! Each returns empirical quantities; none asserts a fixed constant.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::decay::{fit_decay_exponent, DecayFit, FitWindow};
use super::exponents::theta_exponents;
use super::forms::{bilinear_form, dirichlet_form_spectral};
use crate::error::{domain, Error, Result};
use crate::evolve::{propagate_series, LinearPropagator};
use crate::spectral::{lp_norm, GridField};

/// Slack allowed on the sign of an inequality margin, relative to the energy scale.
pub const MARGIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

fn power(v: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else if a == 1.0 {
        v
    } else {
        v.powf(a)
    }
}

/// E(f^a, f^b) - ab E(f, f) for f ≥ 0 and a + b = 2, with f⁰ ≡ 1.
pub fn stroock_varopoulos_check(p: &LinearPropagator, f: &GridField, a: f64, b: f64) -> Result<MarginReport> {
    if !(a >= 0.0 && b >= 0.0 && (a + b - 2.0).abs() <= 1e-12) {
        return Err(domain(format!("need a, b >= 0 with a + b = 2, got a = {a}, b = {b}")));
    }
    if f.min() < 0.0 {
        return Err(domain("Stroock-Varopoulos check needs a nonnegative field"));
    }
    let energy = dirichlet_form_spectral(p, f)?;
    let lhs = if a == 1.0 && b == 1.0 {
        energy
    } else {
        bilinear_form(p, &f.map(|v| power(v, a)), &f.map(|v| power(v, b)))?
    };
    let rhs = a * b * energy;
    let margin = lhs - rhs;
    Ok(MarginReport {
        lhs,
        rhs,
        margin,
        pass: margin >= -MARGIN_TOL * energy,
    })
}

type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A triple (F, G, H) with F'G' ≥ (H')² on the range of the field.
#[derive(Clone)]
pub enum SvTriple {
    Identity,
    /// F = |s|^{σ-1}s, G = |s|^{p-2}s, H = c|s|^{(p+σ-1)/2-1}s, c = 2√(σ(p-1))/(p+σ-1).
    PorousMedium { sigma: f64, p: f64 },
    /// A caller-provided triple; rejected unless `certified`.
    Custom {
        f: ScalarMap,
        g: ScalarMap,
        h: ScalarMap,
        certified: bool,
    },
}

impl fmt::Debug for SvTriple {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvTriple::Identity => write!(fm, "Identity"),
            SvTriple::PorousMedium { sigma, p } => write!(fm, "PorousMedium(sigma={sigma}, p={p})"),
            SvTriple::Custom { certified, .. } => write!(fm, "Custom(certified={certified})"),
        }
    }
}

fn signed_power(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(e - 1.0) * s
    }
}

impl SvTriple {
    /// Exact constant c_{p,σ} of the porous-medium triple.
    pub fn porous_constant(sigma: f64, p: f64) -> f64 {
        2.0 * (sigma * (p - 1.0)).sqrt() / (p + sigma - 1.0)
    }

    fn maps(&self) -> Result<(ScalarMap, ScalarMap, ScalarMap)> {
        match self {
            SvTriple::Identity => {
                let id: ScalarMap = Arc::new(|s| s);
                Ok((id.clone(), id.clone(), id))
            }
            &SvTriple::PorousMedium { sigma, p } => {
                if !(sigma >= 1.0 && p > 1.0) {
                    return Err(domain(format!("porous triple needs sigma >= 1, p > 1, got {sigma}, {p}")));
                }
                let c = Self::porous_constant(sigma, p);
                let e = 0.5 * (p + sigma - 1.0);
                Ok((
                    Arc::new(move |s| signed_power(s, sigma)),
                    Arc::new(move |s| signed_power(s, p - 1.0)),
                    Arc::new(move |s| c * signed_power(s, e)),
                ))
            }
            SvTriple::Custom { f, g, h, certified } => {
                if !certified {
                    return Err(Error::Contract(
                        "custom triple lacks a certificate that F'G' >= (H')^2 on the field's range".into(),
                    ));
                }
                Ok((f.clone(), g.clone(), h.clone()))
            }
        }
    }
}

/// E(F(u), G(u)) - E(H(u), H(u)).
pub fn generalized_sv_check(p: &LinearPropagator, u: &GridField, triple: &SvTriple) -> Result<MarginReport> {
    let (f, g, h) = triple.maps()?;
    let hu = u.map(|s| h(s));
    let rhs = dirichlet_form_spectral(p, &hu)?;
    let lhs = bilinear_form(p, &u.map(|s| f(s)), &u.map(|s| g(s)))?;
    let margin = lhs - rhs;
    Ok(MarginReport {
        lhs,
        rhs,
        margin,
        pass: margin >= -MARGIN_TOL * rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NashBranch {
    /// ‖g‖₂ < 1: the minimum picks ‖g‖₂^{2/d}.
    Nash,
    /// ‖g‖₂ ≥ 1: the minimum picks 1.
    Poincare,
}

impl fmt::Display for NashBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NashBranch::Nash => write!(f, "nash"),
            NashBranch::Poincare => write!(f, "poincare"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashSample {
    pub ratio: f64,
    pub branch: NashBranch,
}

/// E(g,g) / (‖g‖₂² min{1, ‖g‖₂^{2/d}}) with g = f/‖f‖_r.
pub fn nash_ratio(p: &LinearPropagator, f: &GridField, d: f64, r_norm: f64) -> Result<NashSample> {
    if !(d > 0.0) {
        return Err(domain(format!("Nash exponent must be positive, got {d}")));
    }
    if !(1.0..2.0).contains(&r_norm) {
        return Err(domain(format!("r must lie in [1, 2), got {r_norm}")));
    }
    let nr = lp_norm(f, r_norm)?;
    if nr == 0.0 {
        return Err(domain("Nash ratio of the zero field"));
    }
    let g = f.scaled(1.0 / nr);
    let n2 = lp_norm(&g, 2.0)?;
    let e = dirichlet_form_spectral(p, &g)?;
    let (factor, branch) = if n2 < 1.0 {
        (n2.powf(2.0 / d), NashBranch::Nash)
    } else {
        (1.0, NashBranch::Poincare)
    };
    Ok(NashSample {
        ratio: e / (n2 * n2 * factor),
        branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport {
    pub min_ratio: f64,
    pub nash_count: usize,
    pub poincare_count: usize,
    pub samples: Vec<NashSample>,
    pub family: String,
}

pub fn nash_sweep(p: &LinearPropagator, family: &[GridField], d: f64, r_norm: f64, label: &str) -> Result<NashReport> {
    let samples: Vec<NashSample> = crate::exec::map(family, |f| nash_ratio(p, f, d, r_norm))
        .into_iter()
        .collect::<Result<_>>()?;
    let min_ratio = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let nash_count = samples.iter().filter(|s| s.branch == NashBranch::Nash).count();
    Ok(NashReport {
        min_ratio,
        nash_count,
        poincare_count: samples.len() - nash_count,
        samples,
        family: label.to_string(),
    })
}

/// The decay premise ‖T_t v‖_p ≤ C₂ t^{-ν} ‖v‖_q for t > τ, measured on v.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub q: f64,
    pub p: f64,
    pub nu: f64,
    pub tau: f64,
    pub c2: f64,
    pub fit: DecayFit,
    fingerprint: u64,
}

fn fingerprint(v: &GridField) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    v.grid.points_per_axis().hash(&mut h);
    v.grid.half_width().to_bits().hash(&mut h);
    for x in &v.values {
        x.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Leading decay exponents below this count as no decay.
pub const MIN_DECAY: f64 = 1e-3;

impl DecayCertificate {
    /// Evolves v linearly at `times` (all > τ), fits ν, and sets C₂ to the
    /// smallest constant covering every sample.
    pub fn measure(pr: &LinearPropagator, v: &GridField, q: f64, p: f64, tau: f64, times: &[f64]) -> Result<Self> {
        if times.iter().any(|&t| t <= tau) {
            return Err(domain("certificate times must exceed tau"));
        }
        let vq = lp_norm(v, q)?;
        if vq == 0.0 {
            return Err(Error::Contract("decay premise fails: zero field".into()));
        }
        let fields = propagate_series(pr, v, times)?;
        let series: Vec<(f64, f64)> = times
            .iter()
            .zip(&fields)
            .map(|(&t, f)| lp_norm(f, p).map(|n| (t, n / vq)))
            .collect::<Result<_>>()?;
        let fit = fit_decay_exponent(&series, FitWindow::Range {
            t_lo: times[0],
            t_hi: *times.last().unwrap(),
        })?;
        if !(fit.exponent > MIN_DECAY) {
            return Err(Error::Contract(format!(
                "decay premise fails: measured exponent {:.3e} shows no decay",
                fit.exponent
            )));
        }
        let nu = fit.exponent;
        let c2 = series.iter().map(|&(t, n)| n * t.powf(nu)).fold(0.0, f64::max);
        Ok(DecayCertificate {
            q,
            p,
            nu,
            tau,
            c2,
            fit,
            fingerprint: fingerprint(v),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseReport {
    pub ratio: f64,
    /// Which argument of the minimum was active.
    pub tau_branch: bool,
    pub pass: bool,
}

/// E(v,v) / (‖v‖₂² min{1/τ, (‖v‖₂/‖v‖_q)^{2/ν}}) under a decay certificate for v.
pub fn converse_nash_check(p: &LinearPropagator, v: &GridField, cert: Option<&DecayCertificate>) -> Result<ConverseReport> {
    let cert = cert.ok_or_else(|| Error::Contract("converse Nash check needs a decay certificate".into()))?;
    if cert.fingerprint != fingerprint(v) {
        return Err(Error::Contract("decay certificate was measured on a different field".into()));
    }
    let n2 = lp_norm(v, 2.0)?;
    let nq = lp_norm(v, cert.q)?;
    let e = dirichlet_form_spectral(p, v)?;
    let a = 1.0 / cert.tau;
    let b = (n2 / nq).powf(2.0 / cert.nu);
    let ratio = e / (n2 * n2 * a.min(b));
    Ok(ConverseReport {
        ratio,
        tau_branch: a <= b,
        pass: ratio.is_finite() && ratio > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub lhs: f64,
    pub term1: f64,
    pub term2: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Smallest c with ‖z‖_s² ≤ c (term1 + term2).
    pub constant: f64,
}

/// ‖z‖_s² against ‖z‖_r^{2θ₁} E^{1-θ₁} + ‖z‖_r^{2θ₂} E^{1-θ₂}.
pub fn interpolation_check(p: &LinearPropagator, z: &GridField, r: f64, s: f64, gamma: f64) -> Result<InterpolationReport> {
    let (theta1, theta2) = theta_exponents(r, s, gamma, z.grid.dimension())?;
    let nr = lp_norm(z, r)?;
    let ns = lp_norm(z, s)?;
    let e = dirichlet_form_spectral(p, z)?;
    let term1 = nr.powf(2.0 * theta1) * e.powf(1.0 - theta1);
    let term2 = nr.powf(2.0 * theta2) * e.powf(1.0 - theta2);
    Ok(InterpolationReport {
        lhs: ns * ns,
        term1,
        term2,
        theta1,
        theta2,
        constant: ns * ns / (term1 + term2),
    })
}
