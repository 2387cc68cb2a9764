//! Periodic grids on [-L, L)^N, the discrete Fourier pair, and L^p functionals.
//!
//! Nodes are x_j = -L + jΔx with Δx = 2L/n, frequencies ξ_κ = κπ/L with κ in
//! FFT order (0, 1, …, n/2-1, -n/2, …, -1). The forward coefficient is
//! `Δx^N Σ_x f(x) e^{-iξ·x}`, so it approximates the continuum transform and a
//! multiplier m(ξ) applies to it unscaled. In 2-D the flat index is ix·n + iy.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::exec;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    dimension: usize,
    half_width: f64,
    n: usize,
}

impl PeriodicGrid {
    pub fn new(dimension: usize, half_width: f64, n: usize) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(domain(format!("dimension must be 1 or 2, got {dimension}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(domain(format!("half width must be positive, got {half_width}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(domain(format!("points per axis must be a power of two >= 2, got {n}")));
        }
        Ok(PeriodicGrid {
            dimension,
            half_width,
            n,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Δx^N.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// (2L)^N.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dimension as i32)
    }

    /// Lattice step π/L.
    pub fn frequency_step(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest per-axis frequency π/Δx.
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    pub fn axis_coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Signed frequency index of FFT slot j.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Per-axis indices of flat node or frequency index `i`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        if self.dimension == 1 {
            (i, 0)
        } else {
            (i / self.n, i % self.n)
        }
    }

    /// Coordinates of node i (second entry is 0 in 1-D).
    pub fn node(&self, i: usize) -> [f64; 2] {
        let (a, b) = self.split(i);
        if self.dimension == 1 {
            [self.axis_coord(a), 0.0]
        } else {
            [self.axis_coord(a), self.axis_coord(b)]
        }
    }

    /// Integer frequency vector of slot i.
    pub fn wavevector(&self, i: usize) -> [i64; 2] {
        let (a, b) = self.split(i);
        if self.dimension == 1 {
            [self.wavenumber(a), 0]
        } else {
            [self.wavenumber(a), self.wavenumber(b)]
        }
    }

    /// |ξ| at frequency slot i.
    pub fn radial_frequency(&self, i: usize) -> f64 {
        let [a, b] = self.wavevector(i);
        self.frequency_step() * ((a * a + b * b) as f64).sqrt()
    }

    /// |ξ| at every frequency slot.
    pub fn radial_frequencies(&self) -> Vec<f64> {
        exec::map_range(self.len(), |i| self.radial_frequency(i))
    }

    /// Largest |ξ| on the lattice (the corner in 2-D).
    pub fn max_radial_frequency(&self) -> f64 {
        self.max_frequency() * (self.dimension as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    pub grid: PeriodicGrid,
    pub coeffs: Vec<Complex64>,
}

fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical {
            what: format!("{what} produced a non-finite value"),
            achieved: f64::NAN,
        })
    }
}

impl GridField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        ensure_finite(&values, "field construction")?;
        Ok(GridField { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        GridField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples f at every node; f receives [x, y] (y = 0 in 1-D).
    pub fn from_fn<F: Fn([f64; 2]) -> f64 + Sync + Send>(grid: PeriodicGrid, f: F) -> Result<Self> {
        let values = exec::map_range(grid.len(), |i| f(grid.node(i)));
        GridField::new(grid, values)
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> GridField {
        GridField {
            grid: self.grid,
            values: exec::map(&self.values, |&v| f(v)),
        }
    }

    pub fn scaled(&self, c: f64) -> GridField {
        self.map(|v| c * v)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest |u| over nodes on the boundary of the box.
    pub fn boundary_sup(&self) -> f64 {
        let n = self.grid.n;
        let mut m: f64 = 0.0;
        for i in 0..self.values.len() {
            let (a, b) = self.grid.split(i);
            let edge = if self.grid.dimension == 1 {
                a == 0 || a == n - 1
            } else {
                a == 0 || a == n - 1 || b == 0 || b == n - 1
            };
            if edge {
                m = m.max(self.values[i].abs());
            }
        }
        m
    }
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let mut cache = PLANS.get_or_init(Default::default).lock().expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut p = FftPlanner::new();
            if forward {
                p.plan_fft_forward(n)
            } else {
                p.plan_fft_inverse(n)
            }
        })
        .clone()
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    exec::map_range(n * n, |i| {
        let (a, b) = (i / n, i % n);
        data[b * n + a]
    })
}

/// Unnormalized DFT along every axis, in place.
fn fft_axes(data: &mut Vec<Complex64>, grid: &PeriodicGrid, forward: bool) {
    let n = grid.n;
    let fft = plan(n, forward);
    if grid.dimension == 1 {
        fft.process(data);
        return;
    }
    let rows_per_task = (CHUNK / n).max(1) * n;
    exec::for_each_chunk_mut(data, rows_per_task, |c| fft.process(c));
    let mut t = transpose(data, n);
    exec::for_each_chunk_mut(&mut t, rows_per_task, |c| fft.process(c));
    *data = transpose(&t, n);
}

/// (-1)^{κ₁+κ₂} for slot i; accounts for the grid starting at -L.
fn parity(grid: &PeriodicGrid, i: usize) -> f64 {
    let (a, b) = grid.split(i);
    if (a + b) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward(f: &GridField) -> Result<SpectrumField> {
    let grid = f.grid;
    if f.values.len() != grid.len() {
        return Err(Error::Contract("field size does not match its grid".into()));
    }
    let mut data: Vec<Complex64> = exec::map(&f.values, |&v| Complex64::new(v, 0.0));
    fft_axes(&mut data, &grid, true);
    let cell = grid.cell();
    let coeffs = exec::map_range(data.len(), |i| data[i] * (cell * parity(&grid, i)));
    Ok(SpectrumField { grid, coeffs })
}

pub fn inverse(s: &SpectrumField) -> Result<GridField> {
    let grid = s.grid;
    if s.coeffs.len() != grid.len() {
        return Err(Error::Contract("spectrum size does not match its grid".into()));
    }
    let scale = 1.0 / grid.volume();
    let mut data = exec::map_range(s.coeffs.len(), |i| s.coeffs[i] * (scale * parity(&grid, i)));
    fft_axes(&mut data, &grid, false);
    let values: Vec<f64> = exec::map(&data, |c| c.re);
    ensure_finite(&values, "inverse transform")?;
    Ok(GridField { grid, values })
}

impl SpectrumField {
    /// Pointwise multiplication by a real factor per slot.
    pub fn multiply(&self, factor: &[f64]) -> Result<SpectrumField> {
        if factor.len() != self.coeffs.len() {
            return Err(Error::Contract("multiplier size does not match spectrum".into()));
        }
        Ok(SpectrumField {
            grid: self.grid,
            coeffs: exec::map_range(self.coeffs.len(), |i| self.coeffs[i] * factor[i]),
        })
    }

    /// Largest |c(κ) - conj c(-κ)| relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let neg = |j: usize| (n - j) % n;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.coeffs.len() {
            let (a, b) = self.grid.split(i);
            let k = if self.grid.dimension == 1 {
                neg(a)
            } else {
                neg(a) * n + neg(b)
            };
            worst = worst.max((self.coeffs[i] - self.coeffs[k].conj()).norm());
            scale = scale.max(self.coeffs[i].norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Deterministic chunked sum of g over values.
pub(crate) fn chunked_sum<F: Fn(f64) -> f64 + Sync + Send>(values: &[f64], g: F) -> f64 {
    let chunks = values.len().div_ceil(CHUNK);
    exec::map_range(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(values.len());
        values[lo..hi].iter().map(|&v| g(v)).sum::<f64>()
    })
    .into_iter()
    .sum()
}

/// (Δx^N Σ|f|^p)^{1/p}, or max|f| for p = ∞.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.sup());
    }
    let cell = f.grid.cell();
    let s = if p == 1.0 {
        chunked_sum(&f.values, f64::abs)
    } else if p == 2.0 {
        chunked_sum(&f.values, |v| v * v)
    } else {
        // Scale by the sup norm so large p cannot overflow.
        let m = f.sup();
        if m == 0.0 {
            return Ok(0.0);
        }
        let s = chunked_sum(&f.values, |v| (v.abs() / m).powf(p));
        return Ok(m * (cell * s).powf(1.0 / p));
    };
    Ok((cell * s).powf(1.0 / p))
}

/// Δx^N Σ f.
pub fn mass(f: &GridField) -> f64 {
    f.grid.cell() * chunked_sum(&f.values, |v| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g1(l: f64, n: usize) -> PeriodicGrid {
        PeriodicGrid::new(1, l, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(PeriodicGrid::new(1, 1.0, 100).is_err());
        assert!(PeriodicGrid::new(3, 1.0, 8).is_err());
        assert!(PeriodicGrid::new(1, 0.0, 8).is_err());
        let g = g1(4.0, 16);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.wavenumber(15), -1);
        assert_eq!(g.wavenumber(8), -8);
        assert!((g.max_frequency() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn constant_transforms_to_box_mass() {
        for dim in [1, 2] {
            let g = PeriodicGrid::new(dim, 3.0, 16).unwrap();
            let f = GridField::from_fn(g, |_| 1.0).unwrap();
            let s = forward(&f).unwrap();
            assert!((s.coeffs[0].re - g.volume()).abs() < 1e-12);
            for c in &s.coeffs[1..] {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_matches_continuum_transform() {
        let g = g1(20.0, 1024);
        let f = GridField::from_fn(g, |x| (-0.5 * x[0] * x[0]).exp()).unwrap();
        let s = forward(&f).unwrap();
        for i in 0..g.len() {
            let xi = g.wavenumber(i) as f64 * g.frequency_step();
            let e = (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp();
            assert!((s.coeffs[i] - Complex64::new(e, 0.0)).norm() < 1e-8, "slot {i}");
        }
    }

    #[test]
    fn shifted_gaussian_phase_in_two_dimensions() {
        let g = PeriodicGrid::new(2, 16.0, 128).unwrap();
        let (a, b) = (1.5, -2.0);
        let f = GridField::from_fn(g, |x| (-0.5 * ((x[0] - a).powi(2) + (x[1] - b).powi(2))).exp()).unwrap();
        let s = forward(&f).unwrap();
        for i in (0..g.len()).step_by(37) {
            let [ka, kb] = g.wavevector(i);
            let (x1, x2) = (ka as f64 * g.frequency_step(), kb as f64 * g.frequency_step());
            let amp = 2.0 * PI * (-0.5 * (x1 * x1 + x2 * x2)).exp();
            let e = Complex64::from_polar(amp, -(x1 * a + x2 * b));
            assert!((s.coeffs[i] - e).norm() < 1e-8);
        }
    }

    #[test]
    fn round_trip_and_norms() {
        let g = g1(2.0, 64);
        let f = GridField::from_fn(g, |x| (3.0 * x[0]).sin() + x[0] * x[0]).unwrap();
        let back = inverse(&forward(&f).unwrap()).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = GridField::from_fn(g, |_| 2.0).unwrap();
        assert!((lp_norm(&c, 3.0).unwrap() - 2.0 * 4f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(lp_norm(&c, 0.5).is_err());
    }

    #[test]
    fn indicator_has_unit_norms() {
        let g = g1(4.0, 64);
        let f = GridField::from_fn(g, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((lp_norm(&f, p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((mass(&f) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_contract_error() {
        let g = g1(1.0, 8);
        assert!(GridField::new(g, vec![0.0; 7]).is_err());
        let s = SpectrumField {
            grid: g,
            coeffs: vec![Complex64::new(0.0, 0.0); 4],
        };
        assert!(matches!(inverse(&s), Err(Error::Contract(_))));
    }
}
