//! Power-law fits of norm-versus-time series.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Fewest points a fit window may hold.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay exponent, the negated log-log slope.
    pub exponent: f64,
    pub prefactor: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FitWindow {
    /// All points with t_lo ≤ t ≤ t_hi.
    Range { t_lo: f64, t_hi: f64 },
    /// The window ending at the last point with the largest r²; near ties go to the longer window.
    Auto,
}

fn ols(pts: &[(f64, f64)]) -> DecayFit {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy <= 1e-30 * (1.0 + my * my) { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    DecayFit {
        exponent: -slope,
        prefactor: intercept.exp(),
        t_lo: pts[0].0,
        t_hi: pts[pts.len() - 1].0,
        r_squared,
        points: pts.len(),
    }
}

/// Ordinary least squares of log(norm) against log(t) inside the window.
pub fn fit_decay_exponent(series: &[(f64, f64)], window: FitWindow) -> Result<DecayFit> {
    for (i, &(t, v)) in series.iter().enumerate() {
        if !(t > 0.0 && t.is_finite()) {
            return Err(domain(format!("time {t} at index {i} is not positive")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("norm {v} at t = {t} is not positive")));
        }
        if i > 0 && series[i - 1].0 >= t {
            return Err(domain("times must be strictly increasing"));
        }
    }
    match window {
        FitWindow::Range { t_lo, t_hi } => {
            let pts: Vec<(f64, f64)> = series.iter().copied().filter(|p| p.0 >= t_lo && p.0 <= t_hi).collect();
            if pts.len() < MIN_POINTS {
                return Err(Error::Precondition(format!(
                    "fit window [{t_lo}, {t_hi}] holds {} points, need {MIN_POINTS}",
                    pts.len()
                )));
            }
            Ok(ols(&pts))
        }
        FitWindow::Auto => {
            if series.len() < MIN_POINTS {
                return Err(Error::Precondition(format!(
                    "series holds {} points, need {MIN_POINTS}",
                    series.len()
                )));
            }
            let mut best: Option<DecayFit> = None;
            for start in 0..=series.len() - MIN_POINTS {
                let fit = ols(&series[start..]);
                best = match best {
                    Some(b) if b.r_squared >= fit.r_squared - 1e-12 => Some(b),
                    _ => Some(fit),
                };
            }
            Ok(best.expect("at least one window"))
        }
    }
}
