//! Regularizing-effect diagnostic: does ∫ |ξ|^k e^{-m(ξ) t} dξ converge?

use std::fmt;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{self, QuadOptions};
use crate::symbol::SymbolTable;

/// Highest derivative order probed by the C^k indicator.
pub const MAX_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Convergent,
    Divergent,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Convergent => "CONVERGENT",
            Verdict::Divergent => "DIVERGENT",
            Verdict::Undecided => "UNDECIDED",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub t: f64,
    /// (cutoff R, I(R)) for k = 0.
    pub partials: Vec<(f64, f64)>,
    pub verdict: Verdict,
    /// Verdict for each k = 0..=MAX_K.
    pub moment_verdicts: Vec<Verdict>,
    /// Smallest k whose moment integral looks divergent; None means C^{MAX_K} or better.
    pub first_divergent_k: Option<usize>,
}

/// Sphere measure in the radial reduction of ∫_{|ξ|≤R}.
fn radial_weight(n: usize) -> f64 {
    if n == 1 {
        2.0
    } else {
        2.0 * std::f64::consts::PI
    }
}

/// Integral over each shell [R_{i-1}, R_i], with R_{-1} = 0.
fn shell_integrals(tab: &SymbolTable, t: f64, k: usize, cutoffs: &[f64]) -> Result<Vec<f64>> {
    let n = tab.dimension;
    let power = (k + n - 1) as i32;
    let f = |r: f64| r.powi(power) * (-tab.eval(r) * t).exp();
    let opts = QuadOptions {
        abs_tol: f64::MIN_POSITIVE,
        ..QuadOptions::rel(1e-10)
    };
    let mut out = Vec::with_capacity(cutoffs.len());
    let mut lo = 0.0;
    for &big_r in cutoffs {
        let mut pts = vec![lo];
        // Table nodes, or sixteen samples per decade for closed forms.
        if tab.closed_form.is_some() || tab.radial_grid.is_empty() {
            let start = if lo > 0.0 { lo } else { 1e-3f64.min(big_r) };
            let decades = (big_r / start).log10().max(0.0);
            let m = (decades * 16.0).ceil() as usize;
            pts.extend((0..=m).map(|i| start * 10f64.powf(decades * i as f64 / m.max(1) as f64)));
        } else {
            pts.extend(tab.radial_grid.iter().copied());
        }
        pts.push(big_r);
        let pts = quad::merge_breaks(lo, big_r, &pts);
        let res = quad::integrate_panels(&f, &pts, &opts);
        if !res.converged {
            return Err(Error::Numerical {
                what: format!("regularity integral up to R = {big_r}"),
                achieved: res.achieved(),
            });
        }
        out.push(radial_weight(n) * res.value);
        lo = big_r;
    }
    Ok(out)
}

/// DIVERGENT when the last three increments are positive and nondecreasing
/// (to 1e-9 relative); CONVERGENT when the last increment is below 1e-6·I.
/// `shells[0]` is I(R₀); later entries are the increments.
fn classify(shells: &[f64]) -> Verdict {
    let inc = &shells[1..];
    let total: f64 = shells.iter().sum();
    if inc.len() >= 3 {
        let last = &inc[inc.len() - 3..];
        let positive = last.iter().all(|&d| d > 0.0);
        let nondecreasing = last.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        if positive && nondecreasing {
            return Verdict::Divergent;
        }
    }
    match inc.last() {
        Some(&d) if d.abs() < 1e-6 * total.abs() => Verdict::Convergent,
        _ => Verdict::Undecided,
    }
}

/// Partial integrals I(R) = ∫_{|ξ|≤R} e^{-m t} dξ at increasing cutoffs
/// (intended one decade apart), their trend verdict, and the C^k indicator.
pub fn regularizing_diagnostic(tab: &SymbolTable, t: f64, cutoffs: &[f64]) -> Result<RegularityReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be positive, got {t}")));
    }
    if cutoffs.len() < 4 {
        return Err(Error::Precondition("need at least four cutoffs".into()));
    }
    for w in cutoffs.windows(2) {
        if !(w[0] > 0.0 && w[1] > w[0]) {
            return Err(domain("cutoffs must be positive and increasing"));
        }
    }
    if tab.closed_form.is_none() {
        let top = tab.radial_grid.last().copied().unwrap_or(0.0);
        if *cutoffs.last().unwrap() > top * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "cutoff {} exceeds the table range {top}",
                cutoffs.last().unwrap()
            )));
        }
    }
    let mut moment_verdicts = Vec::with_capacity(MAX_K + 1);
    let mut partials = Vec::new();
    for k in 0..=MAX_K {
        let shells = shell_integrals(tab, t, k, cutoffs)?;
        if k == 0 {
            let mut acc = 0.0;
            partials = cutoffs
                .iter()
                .zip(&shells)
                .map(|(&r, &s)| {
                    acc += s;
                    (r, acc)
                })
                .collect();
        }
        moment_verdicts.push(classify(&shells));
    }
    let first_divergent_k = moment_verdicts.iter().position(|v| *v == Verdict::Divergent);
    Ok(RegularityReport {
        t,
        partials,
        verdict: moment_verdicts[0],
        moment_verdicts,
        first_divergent_k,
    })
}

/// Logarithmic growth rate ω of m: least-squares slope of m against ln ρ over
/// the top two decades of the table.
pub fn log_growth_rate(tab: &SymbolTable) -> Result<f64> {
    let top = *tab
        .radial_grid
        .last()
        .ok_or_else(|| Error::Precondition("empty symbol table".into()))?;
    let pts: Vec<(f64, f64)> = tab
        .radial_grid
        .iter()
        .zip(&tab.values)
        .filter(|(r, _)| **r >= top / 100.0)
        .map(|(r, m)| (r.ln(), *m))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Precondition("too few samples in the top two decades".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Decade cutoffs 10^lo, …, 10^hi.
pub fn decade_cutoffs(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}
