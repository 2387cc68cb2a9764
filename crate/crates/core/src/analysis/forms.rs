//! Dirichlet forms: spectral (multiplier) and direct (double sum over nodes).

use crate::error::{Error, Result};
use crate::evolve::LinearPropagator;
use crate::exec;
use crate::kernels::LevyKernel;
use crate::spectral::{forward, GridField, SpectrumField};

/// Largest 1-D grid accepted by [`dirichlet_form_direct`].
pub const DIRECT_LIMIT_1D: usize = 512;
/// Largest per-axis size of a 2-D grid accepted by [`dirichlet_form_direct`].
pub const DIRECT_LIMIT_2D: usize = 64;

fn check(p: &LinearPropagator, f: &GridField) -> Result<()> {
    if p.grid() != &f.grid {
        return Err(Error::Contract("field grid differs from propagator grid".into()));
    }
    Ok(())
}

fn weighted_sum(p: &LinearPropagator, a: &SpectrumField, b: &SpectrumField) -> f64 {
    let m = p.symbol();
    let chunk = 1 << 14;
    let parts = exec::map_range(m.len().div_ceil(chunk), |c| {
        let lo = c * chunk;
        let hi = (lo + chunk).min(m.len());
        (lo..hi).map(|i| m[i] * (a.coeffs[i] * b.coeffs[i].conj()).re).sum::<f64>()
    });
    parts.into_iter().sum::<f64>() / p.grid().volume()
}

/// E(f, f) = (2L)^{-N} Σ m |f̂|².
pub fn dirichlet_form_spectral(p: &LinearPropagator, f: &GridField) -> Result<f64> {
    check(p, f)?;
    let s = forward(f)?;
    Ok(weighted_sum(p, &s, &s).max(0.0))
}

/// E(f, g) = (2L)^{-N} Σ m Re(f̂ ĝ*).
pub fn bilinear_form(p: &LinearPropagator, f: &GridField, g: &GridField) -> Result<f64> {
    check(p, f)?;
    check(p, g)?;
    Ok(weighted_sum(p, &forward(f)?, &forward(g)?))
}

/// ½ Δx^{2N} Σ_{x≠y} (f(x) - f(y))² J(x - y) with periodic distance.
pub fn dirichlet_form_direct(k: &LevyKernel, f: &GridField) -> Result<f64> {
    let g = f.grid;
    let n = g.points_per_axis();
    let limit = if g.dimension() == 1 { DIRECT_LIMIT_1D } else { DIRECT_LIMIT_2D };
    if n > limit {
        return Err(Error::Resource(format!(
            "direct double sum limited to n <= {limit} per axis, got {n}"
        )));
    }
    if k.dimension() != g.dimension() {
        return Err(Error::Contract("kernel and grid dimensions differ".into()));
    }
    let dx = g.spacing();
    let wrap = |d: usize| d.min(n - d) as f64 * dx;
    let v = &f.values;
    let offsets = g.len();
    let per_offset = exec::map_range(offsets, |off| {
        if off == 0 {
            return 0.0;
        }
        let (da, db) = g.split(off);
        let r = (wrap(da).powi(2) + wrap(db).powi(2)).sqrt();
        let j = k.eval_unchecked(r);
        if j == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        if g.dimension() == 1 {
            for x in 0..n {
                let d = v[x] - v[(x + off) % n];
                s += d * d;
            }
        } else {
            for a in 0..n {
                for b in 0..n {
                    let d = v[a * n + b] - v[((a + da) % n) * n + (b + db) % n];
                    s += d * d;
                }
            }
        }
        j * s
    });
    Ok(0.5 * g.cell() * g.cell() * per_offset.into_iter().sum::<f64>())
}
