//! Exponent algebra for the decay rates and the interpolation inequality.

use crate::error::{domain, Error, Result};

/// θ₁ = r[N(2-s)+γs] / (s[N(2-r)+γr]) and θ₂ = r(2-s) / (s(2-r)),
/// for 1 < r < s ≤ 2, γ ∈ (0, 2], N ∈ {1, 2}.
pub fn theta_exponents(r: f64, s: f64, gamma: f64, n: usize) -> Result<(f64, f64)> {
    if !(r > 1.0 && r < s && s <= 2.0) {
        return Err(domain(format!("need 1 < r < s <= 2, got r = {r}, s = {s}")));
    }
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(domain(format!("gamma must lie in (0, 2], got {gamma}")));
    }
    if n != 1 && n != 2 {
        return Err(domain(format!("dimension must be 1 or 2, got {n}")));
    }
    let nf = n as f64;
    let t1 = r * (nf * (2.0 - s) + gamma * s) / (s * (nf * (2.0 - r) + gamma * r));
    let t2 = r * (2.0 - s) / (s * (2.0 - r));
    if !(t1 > t2) {
        return Err(Error::Numerical {
            what: format!("theta1 = {t1} does not exceed theta2 = {t2}"),
            achieved: t2 - t1,
        });
    }
    Ok((t1, t2))
}

/// (ϱ, ε) with ϱ = N(p-q) / (p[N(σ-1) + αq]) and ε = 1 - (σ-1)ϱ.
///
/// Accepts σ ≥ 1 and max{1, σ-1} ≤ q < p < ∞; the formulas stay finite at
/// q = σ - 1, which the porous-medium decay statement itself excludes.
pub fn rho_eps(q: f64, p: f64, n: usize, alpha: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(sigma >= 1.0) {
        return Err(domain(format!("sigma must be >= 1, got {sigma}")));
    }
    if !(q >= 1.0 && q >= sigma - 1.0 && q < p && p.is_finite()) {
        return Err(domain(format!(
            "need max(1, sigma-1) <= q < p < inf, got q = {q}, p = {p}, sigma = {sigma}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    let nf = n as f64;
    let rho = nf * (p - q) / (p * (nf * (sigma - 1.0) + alpha * q));
    Ok((rho, 1.0 - (sigma - 1.0) * rho))
}

/// ϱ(q, p) = (N/α)(1/q - 1/p) for the linear flow; p may be infinite.
pub fn linear_rate(q: f64, p: f64, n: usize, alpha: f64) -> f64 {
    n as f64 / alpha * (1.0 / q - 1.0 / p)
}

/// Nash exponent d = N(2-r)/(rα).
pub fn nash_exponent(r: f64, n: usize, alpha: f64) -> f64 {
    n as f64 * (2.0 - r) / (r * alpha)
}

/// Derived exponents for one (q, p, N, α, σ) tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub q: f64,
    pub p: f64,
    pub n: usize,
    pub alpha: f64,
    pub sigma: f64,
    pub rho: f64,
    pub epsilon: f64,
    /// s = 2p/(p+σ-1) and r = sq/p, the Lebesgue indices entering the interpolation step.
    pub s: f64,
    pub r: f64,
    /// (θ₁, θ₂) at (r, s, α ∧ 2), present when 1 < r.
    pub theta: Option<(f64, f64)>,
    /// d = N(2-r)/(rα), present when 1 ≤ r < 2.
    pub d: Option<f64>,
}

impl ExponentSet {
    pub fn new(q: f64, p: f64, n: usize, alpha: f64, sigma: f64) -> Result<Self> {
        let (rho, epsilon) = rho_eps(q, p, n, alpha, sigma)?;
        let s = 2.0 * p / (p + sigma - 1.0);
        let r = s * q / p;
        let theta = if r > 1.0 && r < s && s <= 2.0 {
            Some(theta_exponents(r, s, alpha.min(2.0), n)?)
        } else {
            None
        };
        let d = if (1.0..2.0).contains(&r) {
            Some(nash_exponent(r, n, alpha))
        } else {
            None
        };
        Ok(ExponentSet {
            q,
            p,
            n,
            alpha,
            sigma,
            rho,
            epsilon,
            s,
            r,
            theta,
            d,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_theta_examples() {
        let (t1, t2) = theta_exponents(4.0 / 3.0, 2.0, 1.0, 1).unwrap();
        assert!((t1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t2, 0.0);
        let (t1, t2) = theta_exponents(1.5, 2.0, 2.0, 1).unwrap();
        assert!((t1 - 6.0 / 7.0).abs() < 1e-15);
        assert_eq!(t2, 0.0);
        let (t1, t2) = theta_exponents(1.5, 1.5 + 1e-9, 1.0, 2).unwrap();
        assert!((t1 - 1.0).abs() < 1e-8 && (t2 - 1.0).abs() < 1e-8);
        assert!(theta_exponents(1.0, 2.0, 1.0, 1).is_err());
    }

    #[test]
    fn worked_rho_examples() {
        assert_eq!(rho_eps(1.0, 2.0, 1, 1.0, 1.0).unwrap(), (0.5, 1.0));
        let (r, e) = rho_eps(1.0, 2.0, 1, 1.0, 2.0).unwrap();
        assert_eq!(r, 0.25);
        assert_eq!(e, 0.75);
        assert!(rho_eps(1.0, 2.0, 1, 1.0, 2.5).is_err());
        assert!(rho_eps(2.0, 2.0, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_one_matches_linear_rate() {
        let (r, e) = rho_eps(1.5, 4.0, 2, 0.7, 1.0).unwrap();
        assert!((r - linear_rate(1.5, 4.0, 2, 0.7)).abs() < 1e-15);
        assert_eq!(e, 1.0);
    }

    #[test]
    fn exponent_set_fields() {
        let x = ExponentSet::new(1.0, 2.0, 1, 1.0, 1.0).unwrap();
        assert_eq!(x.s, 2.0);
        assert_eq!(x.r, 1.0);
        assert!(x.theta.is_none());
        assert_eq!(x.d, Some(1.0));
        let y = ExponentSet::new(1.5, 2.0, 1, 1.0, 1.0).unwrap();
        assert!(y.theta.is_some());
    }
}
