//! Initial-data and test-function families on a periodic grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::{GridField, PeriodicGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialDatum {
    /// Indicator of the centered half-open cube [-w/2, w/2)^N.
    Box { width: f64 },
    /// C^∞ plateau of side `width` whose edges ramp over `transition`.
    SmoothBox { width: f64, transition: f64 },
    /// Unit-mass Gaussian with standard deviation `s`.
    Gaussian { s: f64 },
    /// Unit-mass Gaussian of width three grid spacings.
    #[serde(rename = "delta")]
    DeltaSurrogate,
    /// Real random trigonometric polynomial with wavenumbers up to `band`.
    #[serde(rename = "random")]
    SeededRandom { band: usize, seed: u64 },
}

impl InitialDatum {
    pub fn sample(&self, grid: &PeriodicGrid) -> Result<GridField> {
        match *self {
            InitialDatum::Box { width } => box_field(grid, width),
            InitialDatum::SmoothBox { width, transition } => smooth_box(grid, width, transition),
            InitialDatum::Gaussian { s } => gaussian(grid, s),
            InitialDatum::DeltaSurrogate => gaussian(grid, 3.0 * grid.spacing()),
            InitialDatum::SeededRandom { band, seed } => random_band_limited(grid, band, seed),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            InitialDatum::SeededRandom { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

pub fn box_field(grid: &PeriodicGrid, width: f64) -> Result<GridField> {
    if !(width > 0.0) {
        return Err(domain(format!("box width must be positive, got {width}")));
    }
    let h = 0.5 * width;
    let dim = grid.dimension();
    GridField::from_fn(*grid, move |x| {
        let within = |c: f64| (-h..h).contains(&c);
        let inside = within(x[0]) && (dim == 1 || within(x[1]));
        if inside {
            1.0
        } else {
            0.0
        }
    })
}

/// Smooth transition from 0 at t ≤ 0 to 1 at t ≥ 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// One-dimensional plateau profile: 1 on |x| ≤ (w - τ)/2, 0 beyond (w + τ)/2.
pub fn plateau(x: f64, width: f64, transition: f64) -> f64 {
    let inner = 0.5 * (width - transition);
    smooth_step(((inner + transition) - x.abs()) / transition)
}

pub fn smooth_box(grid: &PeriodicGrid, width: f64, transition: f64) -> Result<GridField> {
    if !(width > 0.0 && transition > 0.0 && transition < width) {
        return Err(domain("smooth box needs 0 < transition < width"));
    }
    let dim = grid.dimension();
    GridField::from_fn(*grid, move |x| {
        let a = plateau(x[0], width, transition);
        if dim == 1 {
            a
        } else {
            a * plateau(x[1], width, transition)
        }
    })
}

/// g_λ(x) = λ^N g(λx) for the smooth box g; preserves the L¹ norm.
pub fn dilated_smooth_box(grid: &PeriodicGrid, width: f64, transition: f64, lambda: f64) -> Result<GridField> {
    if !(lambda > 0.0) {
        return Err(domain("dilation factor must be positive"));
    }
    let dim = grid.dimension();
    let amp = lambda.powi(dim as i32);
    smooth_box(grid, width / lambda, transition / lambda).map(|f| f.scaled(amp))
}

pub fn gaussian(grid: &PeriodicGrid, s: f64) -> Result<GridField> {
    if !(s > 0.0) {
        return Err(domain(format!("gaussian width must be positive, got {s}")));
    }
    let dim = grid.dimension() as i32;
    let norm = (2.0 * std::f64::consts::PI * s * s).powf(-0.5 * dim as f64);
    GridField::from_fn(*grid, move |x| norm * (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * s * s)).exp())
}

/// Σ a_κ cos(ξ_κ·x) + b_κ sin(ξ_κ·x) over a half lattice of wavevectors with
/// 1 ≤ max|κ_i| ≤ band, coefficients uniform in [-1, 1].
pub fn random_band_limited(grid: &PeriodicGrid, band: usize, seed: u64) -> Result<GridField> {
    if band == 0 || band >= grid.points_per_axis() / 2 {
        return Err(domain(format!(
            "band must lie in 1..{}, got {band}",
            grid.points_per_axis() / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = band as i64;
    let mut modes: Vec<([f64; 2], f64, f64)> = Vec::new();
    let step = grid.frequency_step();
    let second: Vec<i64> = if grid.dimension() == 1 { vec![0] } else { (-b..=b).collect() };
    for k1 in 0..=b {
        for &k2 in &second {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let a: f64 = rng.random_range(-1.0..1.0);
            let c: f64 = rng.random_range(-1.0..1.0);
            modes.push(([k1 as f64 * step, k2 as f64 * step], a, c));
        }
    }
    let scale = 1.0 / (modes.len() as f64).sqrt();
    GridField::from_fn(*grid, move |x| {
        scale
            * modes
                .iter()
                .map(|(k, a, c)| {
                    let ph = k[0] * x[0] + k[1] * x[1];
                    a * ph.cos() + c * ph.sin()
                })
                .sum::<f64>()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, lp_norm, mass};

    #[test]
    fn box_and_gaussian_masses() {
        let g = PeriodicGrid::new(1, 16.0, 512).unwrap();
        let b = box_field(&g, 4.0).unwrap();
        assert!((mass(&b) - 4.0).abs() < 1e-12);
        let gs = gaussian(&g, 1.0).unwrap();
        assert!((mass(&gs) - 1.0).abs() < 1e-12);
        let d = InitialDatum::DeltaSurrogate.sample(&g).unwrap();
        assert!((mass(&d) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dilation_preserves_l1_norm() {
        let g = PeriodicGrid::new(1, 64.0, 1 << 14).unwrap();
        let base = lp_norm(&dilated_smooth_box(&g, 1.0, 0.25, 1.0).unwrap(), 1.0).unwrap();
        for lam in [0.125, 0.5, 2.0, 8.0] {
            let f = dilated_smooth_box(&g, 1.0, 0.25, lam).unwrap();
            assert!((lp_norm(&f, 1.0).unwrap() - base).abs() < 1e-6 * base, "lambda {lam}");
        }
    }

    #[test]
    fn random_field_is_band_limited_and_reproducible() {
        let g = PeriodicGrid::new(2, 1.0, 32).unwrap();
        let a = random_band_limited(&g, 5, 7).unwrap();
        let b = random_band_limited(&g, 5, 7).unwrap();
        assert_eq!(a, b);
        let s = forward(&a).unwrap();
        for i in 0..g.len() {
            let [k1, k2] = g.wavevector(i);
            if k1.abs() > 5 || k2.abs() > 5 {
                assert!(s.coeffs[i].norm() < 1e-12);
            }
        }
        assert!(random_band_limited(&g, 16, 0).is_err());
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(plateau(0.0, 1.0, 0.25), 1.0);
        assert_eq!(plateau(0.7, 1.0, 0.25), 0.0);
    }
}
