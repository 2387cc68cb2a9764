//! Exact linear semigroup e^{-t m(D)}, the grid fundamental solution, and an
//! explicit two-stage stepper for ∂ₜu + L_J Φ(u) = 0.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::kernels::LevyKernel;
use crate::spectral::{forward, inverse, GridField, PeriodicGrid, SpectrumField};
use crate::symbol::{self, build_symbol_table, log_grid, SymbolTable};

/// Points per decade of the radial table behind [`LinearPropagator::from_kernel`].
pub const PROPAGATOR_TABLE_DENSITY: usize = 128;

/// Largest admissible e^{-m(π/Δx) t} for [`fundamental_solution`].
pub const RESOLUTION_THRESHOLD: f64 = 1e-6;

/// The multiplier sampled on a grid's frequency lattice.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: PeriodicGrid,
    symbol: Vec<f64>,
    m_max: f64,
    label: String,
}

impl LinearPropagator {
    /// Symbol values per lattice slot from `f(|ξ|)`; the κ = 0 slot is set to 0.
    pub fn from_fn<F: Fn(f64) -> f64 + Sync + Send>(grid: PeriodicGrid, label: impl Into<String>, f: F) -> Result<Self> {
        let mut symbol = exec::map_range(grid.len(), |i| f(grid.radial_frequency(i)));
        symbol[0] = 0.0;
        if let Some(bad) = symbol.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(domain(format!("symbol value {bad} is not finite and nonnegative")));
        }
        let m_max = symbol.iter().cloned().fold(0.0, f64::max);
        Ok(LinearPropagator {
            grid,
            symbol,
            m_max,
            label: label.into(),
        })
    }

    /// Lattice symbol interpolated from a radial table.
    pub fn from_table(tab: &SymbolTable, grid: PeriodicGrid) -> Result<Self> {
        if tab.dimension != grid.dimension() {
            return Err(Error::Contract(format!(
                "table is {}-dimensional, grid is {}-dimensional",
                tab.dimension,
                grid.dimension()
            )));
        }
        Self::from_fn(grid, tab.kernel_id.clone(), |r| tab.eval(r))
    }

    /// Builds a radial table spanning the lattice and interpolates it.
    pub fn from_kernel(k: &LevyKernel, grid: PeriodicGrid) -> Result<Self> {
        let tab = lattice_table(k, &grid)?;
        Self::from_table(&tab, grid)
    }

    /// Direct quadrature at every distinct lattice radius.
    pub fn exact(k: &LevyKernel, grid: PeriodicGrid) -> Result<Self> {
        if k.dimension() != grid.dimension() {
            return Err(Error::Contract("kernel and grid dimensions differ".into()));
        }
        let half = grid.points_per_axis() as i64 / 2;
        let mut squares: Vec<i64> = if grid.dimension() == 1 {
            (0..=half).map(|a| a * a).collect()
        } else {
            (0..=half)
                .flat_map(|a| (0..=half).map(move |b| a * a + b * b))
                .collect()
        };
        squares.sort_unstable();
        squares.dedup();
        let step = grid.frequency_step();
        let values = exec::map(&squares, |&s| symbol::symbol_quadrature(k, step * (s as f64).sqrt()));
        let mut lookup = std::collections::HashMap::with_capacity(squares.len());
        for (s, v) in squares.iter().zip(values) {
            lookup.insert(*s, v?);
        }
        let symbol: Vec<f64> = (0..grid.len())
            .map(|i| {
                let [a, b] = grid.wavevector(i);
                lookup[&(a * a + b * b)]
            })
            .collect();
        let m_max = symbol.iter().cloned().fold(0.0, f64::max);
        Ok(LinearPropagator {
            grid,
            symbol,
            m_max,
            label: k.id(),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Largest symbol value on the lattice.
    pub fn m_max(&self) -> f64 {
        self.m_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_grid(&self, f: &GridField) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::Contract("field grid differs from propagator grid".into()));
        }
        Ok(())
    }

    /// Smallest symbol value at or beyond the per-axis Nyquist radius.
    pub fn nyquist_symbol(&self) -> f64 {
        let nyq = self.grid.max_frequency() * (1.0 - 1e-12);
        (0..self.grid.len())
            .filter(|&i| self.grid.radial_frequency(i) >= nyq)
            .map(|i| self.symbol[i])
            .fold(f64::INFINITY, f64::min)
    }

    fn decay_factors(&self, t: f64) -> Vec<f64> {
        exec::map(&self.symbol, |&m| (-m * t).exp())
    }
}

/// Radial table covering [π/L, √N π/Δx] at [`PROPAGATOR_TABLE_DENSITY`].
pub fn lattice_table(k: &LevyKernel, grid: &PeriodicGrid) -> Result<SymbolTable> {
    let lo = grid.frequency_step();
    let hi = grid.max_radial_frequency();
    build_symbol_table(k, &log_grid(lo, hi, PROPAGATOR_TABLE_DENSITY))
}

/// The discrete L_J f = inverse(m · forward(f)).
pub fn apply_operator(p: &LinearPropagator, f: &GridField) -> Result<GridField> {
    p.check_grid(f)?;
    inverse(&forward(f)?.multiply(&p.symbol)?)
}

/// inverse(e^{-mt} · forward(u0)).
pub fn propagate_linear(p: &LinearPropagator, u0: &GridField, t: f64) -> Result<GridField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be finite and >= 0, got {t}")));
    }
    p.check_grid(u0)?;
    inverse(&forward(u0)?.multiply(&p.decay_factors(t))?)
}

/// Linear solution at several times with a single forward transform.
pub fn propagate_series(p: &LinearPropagator, u0: &GridField, times: &[f64]) -> Result<Vec<GridField>> {
    p.check_grid(u0)?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(domain(format!("time must be finite and >= 0, got {t}")));
    }
    let spec = forward(u0)?;
    times.iter().map(|&t| propagated(p, &spec, t)).collect()
}

fn propagated(p: &LinearPropagator, spec: &SpectrumField, t: f64) -> Result<GridField> {
    inverse(&spec.multiply(&p.decay_factors(t))?)
}

/// Grid surrogate of μ_t, the inverse transform of e^{-m t}.
pub fn fundamental_solution(p: &LinearPropagator, t: f64) -> Result<GridField> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be positive, got {t}")));
    }
    let residual = (-p.nyquist_symbol() * t).exp();
    if residual > RESOLUTION_THRESHOLD {
        return Err(Error::Unresolvable { residual });
    }
    let spec = SpectrumField {
        grid: p.grid,
        coeffs: exec::map(&p.decay_factors(t), |&v| crate::spectral::Complex64::new(v, 0.0)),
    };
    inverse(&spec)
}

/// Φ(ζ) = |ζ|^{σ-1} ζ, valid while |u| ≤ `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiLaw {
    pub sigma: f64,
    pub bound: f64,
}

impl PhiLaw {
    pub fn new(sigma: f64, bound: f64) -> Result<Self> {
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(domain(format!("sigma must be >= 1, got {sigma}")));
        }
        if !(bound > 0.0) {
            return Err(domain(format!("validity bound must be positive, got {bound}")));
        }
        Ok(PhiLaw { sigma, bound })
    }

    pub fn eval(&self, z: f64) -> f64 {
        if self.sigma == 1.0 {
            z
        } else if self.sigma == 2.0 {
            z.abs() * z
        } else {
            z.abs().powf(self.sigma - 1.0) * z
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.sigma * z.abs().powf(self.sigma - 1.0)
    }
}

/// Two-stage explicit Runge-Kutta variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// u ← u - Δt F(u - Δt/2 F(u)).
    #[default]
    Midpoint,
    /// u ← ½u + ½(v - Δt F(v)), v = u - Δt F(u); a convex combination of Euler steps.
    Heun,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearOptions {
    pub cfl: f64,
    pub stepper: Stepper,
    pub max_steps: usize,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        NonlinearOptions {
            cfl: 0.5,
            stepper: Stepper::default(),
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearRun {
    pub times: Vec<f64>,
    pub fields: Vec<GridField>,
    pub steps: usize,
}

fn flux(p: &LinearPropagator, phi: &PhiLaw, u: &GridField) -> Result<GridField> {
    apply_operator(p, &u.map(|z| phi.eval(z)))
}

fn axpy(u: &GridField, a: f64, v: &GridField) -> GridField {
    GridField {
        grid: u.grid,
        values: exec::map_range(u.values.len(), |i| u.values[i] + a * v.values[i]),
    }
}

fn step(p: &LinearPropagator, phi: &PhiLaw, u: &GridField, dt: f64, stepper: Stepper) -> Result<GridField> {
    match stepper {
        Stepper::Midpoint => {
            let half = axpy(u, -0.5 * dt, &flux(p, phi, u)?);
            Ok(axpy(u, -dt, &flux(p, phi, &half)?))
        }
        Stepper::Heun => {
            let v = axpy(u, -dt, &flux(p, phi, u)?);
            let w = axpy(&v, -dt, &flux(p, phi, &v)?);
            Ok(GridField {
                grid: u.grid,
                values: exec::map_range(u.values.len(), |i| 0.5 * (u.values[i] + w.values[i])),
            })
        }
    }
}

/// Integrates ∂ₜu = -L_J Φ(u) to `t_end`, returning u at each snapshot time.
/// Steps obey Δt ≤ cfl/(m_max σ ‖u‖∞^{σ-1}) and are clipped to land on snapshots.
pub fn evolve_nonlinear(
    p: &LinearPropagator,
    phi: &PhiLaw,
    u0: &GridField,
    t_end: f64,
    snapshots: &[f64],
    opts: &NonlinearOptions,
) -> Result<NonlinearRun> {
    p.check_grid(u0)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(domain(format!("t_end must be positive, got {t_end}")));
    }
    if !(opts.cfl > 0.0) {
        return Err(domain("cfl must be positive"));
    }
    for w in snapshots.windows(2) {
        if w[1] < w[0] {
            return Err(domain("snapshot times must be nondecreasing"));
        }
    }
    if snapshots.iter().any(|&s| !(0.0..=t_end).contains(&s)) {
        return Err(domain("snapshot times must lie in [0, t_end]"));
    }
    let sup0 = u0.sup();
    if sup0 > phi.bound {
        return Err(Error::Precondition(format!(
            "initial sup norm {sup0} exceeds the validity bound {}",
            phi.bound
        )));
    }
    let mut targets: Vec<f64> = snapshots.to_vec();
    if targets.is_empty() {
        targets.push(t_end);
    }
    let mut t = 0.0;
    let mut u = u0.clone();
    let mut steps = 0;
    let mut fields = Vec::with_capacity(targets.len());
    for &target in &targets {
        while t < target {
            let sup = u.sup();
            if sup == 0.0 || p.m_max == 0.0 {
                t = target;
                break;
            }
            let cfl_dt = opts.cfl / (p.m_max * phi.sigma * sup.powf(phi.sigma - 1.0));
            let (dt, lands) = if t + cfl_dt >= target * (1.0 - 1e-14) {
                (target - t, true)
            } else {
                (cfl_dt, false)
            };
            let next = step(p, phi, &u, dt, opts.stepper)?;
            let after = next.sup();
            if !after.is_finite() || after > 1.01 * sup {
                return Err(Error::Stability { dt, before: sup, after });
            }
            u = next;
            t = if lands { target } else { t + dt };
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Resource(format!("exceeded {} time steps", opts.max_steps)));
            }
        }
        fields.push(u.clone());
    }
    Ok(NonlinearRun {
        times: targets,
        fields,
        steps,
    })
}
