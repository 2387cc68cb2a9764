//! Experiment configuration files (TOML). Field units are listed in SCHEMA.md.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::exponents::{linear_rate, nash_exponent, rho_eps, theta_exponents};
use crate::datum::InitialDatum;
use crate::error::{Error, Result};
use crate::evolve::{PhiLaw, Stepper};
use crate::kernels::{LevyKernel, NearProfile, TailProfile};
use crate::spectral::PeriodicGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Seed for random data and families; overrides a seed inside `initial`.
    #[serde(default)]
    pub seed: Option<u64>,
    pub kernel: KernelSpec,
    pub grid: GridSpec,
    pub flow: FlowSpec,
    pub initial: InitialDatum,
    pub snapshots: SnapshotSpec,
    #[serde(default, rename = "analysis")]
    pub analyses: Vec<AnalysisSpec>,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub dim: usize,
    pub near: NearProfile,
    pub tail: TailProfile,
    /// Divide a pure-power symbol by its constant, giving m = |ξ|^α.
    #[serde(default)]
    pub normalize: bool,
}

impl KernelSpec {
    pub fn build(&self) -> Result<LevyKernel> {
        LevyKernel::admissible(self.dim, self.near, self.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FlowSpec {
    Linear,
    Nonlinear {
        sigma: f64,
        #[serde(default = "default_bound")]
        bound: f64,
        #[serde(default = "default_cfl")]
        cfl: f64,
        #[serde(default)]
        stepper: Stepper,
    },
}

fn default_bound() -> f64 {
    1.0
}

fn default_cfl() -> f64 {
    0.5
}

impl FlowSpec {
    pub fn sigma(&self) -> f64 {
        match *self {
            FlowSpec::Linear => 1.0,
            FlowSpec::Nonlinear { sigma, .. } => sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SnapshotSpec {
    List {
        times: Vec<f64>,
    },
    /// `count` log-spaced times on [t_min, t_max], optionally preceded by t = 0.
    Log {
        t_min: f64,
        t_max: f64,
        count: usize,
        #[serde(default)]
        include_zero: bool,
    },
}

impl SnapshotSpec {
    pub fn times(&self) -> Result<Vec<f64>> {
        let times = match self {
            SnapshotSpec::List { times } => times.clone(),
            &SnapshotSpec::Log {
                t_min,
                t_max,
                count,
                include_zero,
            } => {
                if !(t_min > 0.0 && t_max > t_min && count >= 2) {
                    return Err(Error::Config(format!(
                        "log snapshots need 0 < t_min < t_max and count >= 2, got {t_min}, {t_max}, {count}"
                    )));
                }
                let mut v = Vec::with_capacity(count + 1);
                if include_zero {
                    v.push(0.0);
                }
                let ratio = (t_max / t_min).ln();
                for i in 0..count {
                    v.push(if i + 1 == count {
                        t_max
                    } else {
                        t_min * (ratio * i as f64 / (count - 1) as f64).exp()
                    });
                }
                v
            }
        };
        if times.is_empty() {
            return Err(Error::Config("no snapshot times".into()));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config("snapshot times must be strictly increasing".into()));
            }
        }
        if !(times[0] >= 0.0) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::Config("snapshot times must be finite and nonnegative".into()));
        }
        Ok(times)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisSpec {
    /// Power-law fit of ‖u(t)‖_p against the predicted rate ϱ(q, p).
    DecayFit {
        q: f64,
        p: f64,
        /// [t_lo, t_hi]; absent means automatic max-r² window.
        #[serde(default)]
        window: Option<[f64; 2]>,
        #[serde(default)]
        tolerance: Option<f64>,
    },
    /// ‖u(t)‖_∞ must decrease at every snapshot and end below the given fraction of its start.
    SupTrend {
        #[serde(default = "default_sup_fraction")]
        max_final_fraction: f64,
    },
    /// Mass conservation and L¹, L², L^∞ monotonicity along the run.
    Contraction {
        #[serde(default = "default_mass_tol")]
        tolerance: f64,
    },
    /// E(u(t), u(t)) ≤ ‖u₀‖₂²/(2et) at every positive snapshot (linear flows).
    EnergyBound {
        #[serde(default = "default_energy_tol")]
        tolerance: f64,
    },
    /// Restricted Nash ratios over dilations λ of a smooth box.
    NashCheck {
        r: f64,
        lambda_min: f64,
        lambda_max: f64,
        count: usize,
        #[serde(default = "default_box_width")]
        width: f64,
        #[serde(default = "default_transition")]
        transition: f64,
    },
    /// Interpolation constant at every snapshot.
    Interpolation {
        r: f64,
        s: f64,
        #[serde(default)]
        gamma: Option<f64>,
    },
    /// Regularizing-effect verdicts from a dedicated radial table.
    Regularity {
        times: Vec<f64>,
        decade_lo: i32,
        decade_hi: i32,
        #[serde(default = "default_per_decade")]
        per_decade: usize,
    },
}

fn default_sup_fraction() -> f64 {
    0.05
}
fn default_mass_tol() -> f64 {
    1e-10
}
fn default_energy_tol() -> f64 {
    1e-12
}
fn default_box_width() -> f64 {
    1.0
}
fn default_transition() -> f64 {
    0.25
}
fn default_per_decade() -> usize {
    16
}

impl AnalysisSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisSpec::DecayFit { .. } => "decay_fit",
            AnalysisSpec::SupTrend { .. } => "sup_trend",
            AnalysisSpec::Contraction { .. } => "contraction",
            AnalysisSpec::EnergyBound { .. } => "energy_bound",
            AnalysisSpec::NashCheck { .. } => "nash_check",
            AnalysisSpec::Interpolation { .. } => "interpolation",
            AnalysisSpec::Regularity { .. } => "regularity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write one field file per snapshot.
    #[serde(default)]
    pub fields: bool,
    /// Exponent of the `lp` column of norms.csv.
    #[serde(default = "default_norm_p")]
    pub norm_p: f64,
    /// Boundary/sup ratio allowed by the domain-escape guard.
    #[serde(default = "default_guard")]
    pub guard_threshold: f64,
}

fn default_norm_p() -> f64 {
    4.0
}
fn default_guard() -> f64 {
    1e-6
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| cfg(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut c = Self::from_toml(&text)?;
        if c.output.dir.is_relative() {
            if let Some(parent) = path.parent() {
                c.output.dir = parent.join(&c.output.dir);
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_toml().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// The initial datum with the top-level seed applied.
    pub fn datum(&self) -> InitialDatum {
        match (self.initial, self.seed) {
            (InitialDatum::SeededRandom { band, .. }, Some(seed)) => InitialDatum::SeededRandom { band, seed },
            (d, _) => d,
        }
    }

    pub fn seed_used(&self) -> Option<u64> {
        self.datum().seed().or(self.seed)
    }

    pub fn grid(&self) -> Result<PeriodicGrid> {
        PeriodicGrid::new(self.kernel.dim, self.grid.half_width, self.grid.n)
    }

    pub fn phi(&self) -> Result<Option<PhiLaw>> {
        match self.flow {
            FlowSpec::Linear => Ok(None),
            FlowSpec::Nonlinear { sigma, bound, .. } => PhiLaw::new(sigma, bound).map(Some),
        }
    }

    /// Predicted decay exponent of ‖u(t)‖_p for data in L^q.
    pub fn predicted_rate(&self, q: f64, p: f64) -> Result<f64> {
        let alpha = self.kernel.build()?.tail_exponent();
        match self.flow {
            FlowSpec::Linear => Ok(linear_rate(q, p, self.kernel.dim, alpha)),
            FlowSpec::Nonlinear { sigma, .. } => Ok(rho_eps(q, p, self.kernel.dim, alpha, sigma)?.0),
        }
    }

    /// Checks every parameter range before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(cfg("name must not be empty"));
        }
        let kernel = self.kernel.build()?;
        if self.kernel.normalize && kernel.pure_power_exponent().is_none() {
            return Err(cfg("normalize applies to pure-power kernels only"));
        }
        self.grid()?;
        self.phi()?;
        if let FlowSpec::Nonlinear { cfl, .. } = self.flow {
            if !(cfl > 0.0 && cfl <= 1.0) {
                return Err(cfg(format!("cfl must lie in (0, 1], got {cfl}")));
            }
        }
        let times = self.snapshots.times()?;
        if !(self.output.norm_p >= 1.0) {
            return Err(cfg("norm_p must be >= 1"));
        }
        if !(self.output.guard_threshold > 0.0) {
            return Err(cfg("guard_threshold must be positive"));
        }
        let n = self.kernel.dim;
        let alpha = kernel.tail_exponent();
        for (i, a) in self.analyses.iter().enumerate() {
            let at = |msg: String| cfg(format!("analysis {i} ({}): {msg}", a.kind()));
            match *a {
                AnalysisSpec::DecayFit { q, p, window, tolerance } => {
                    if !(q >= 1.0 && p > q) {
                        return Err(at(format!("need 1 <= q < p, got q = {q}, p = {p}")));
                    }
                    let sigma = self.flow.sigma();
                    if matches!(self.flow, FlowSpec::Nonlinear { .. }) && sigma - 1.0 >= q {
                        return Err(at(format!(
                            "nonlinear decay needs sigma - 1 < q < p, got sigma - 1 = {}, q = {q}",
                            sigma - 1.0
                        )));
                    }
                    self.predicted_rate(q, p).map_err(|e| at(e.to_string()))?;
                    if let Some([lo, hi]) = window {
                        if !(lo > 0.0 && hi > lo) {
                            return Err(at(format!("window [{lo}, {hi}] must satisfy 0 < t_lo < t_hi")));
                        }
                    }
                    if let Some(tol) = tolerance {
                        if !(tol > 0.0) {
                            return Err(at("tolerance must be positive".into()));
                        }
                    }
                    if times.iter().filter(|&&t| t > 0.0).count() < crate::analysis::decay::MIN_POINTS {
                        return Err(at("too few positive snapshot times for a fit".into()));
                    }
                }
                AnalysisSpec::SupTrend { max_final_fraction } => {
                    if !(max_final_fraction > 0.0) {
                        return Err(at("max_final_fraction must be positive".into()));
                    }
                }
                AnalysisSpec::Contraction { tolerance } | AnalysisSpec::EnergyBound { tolerance } => {
                    if !(tolerance >= 0.0) {
                        return Err(at("tolerance must be nonnegative".into()));
                    }
                    if matches!(a, AnalysisSpec::EnergyBound { .. }) && self.flow != FlowSpec::Linear {
                        return Err(at("energy bound applies to linear flows".into()));
                    }
                }
                AnalysisSpec::NashCheck {
                    r,
                    lambda_min,
                    lambda_max,
                    count,
                    width,
                    transition,
                } => {
                    if !(1.0..2.0).contains(&r) {
                        return Err(at(format!("r must lie in [1, 2), got {r}")));
                    }
                    if !(lambda_min > 0.0 && lambda_max > lambda_min && count >= 2) {
                        return Err(at("need 0 < lambda_min < lambda_max and count >= 2".into()));
                    }
                    if !(width > 0.0 && transition > 0.0 && transition < width) {
                        return Err(at("need 0 < transition < width".into()));
                    }
                    let _ = nash_exponent(r, n, alpha);
                }
                AnalysisSpec::Interpolation { r, s, gamma } => {
                    if r == 1.0 {
                        return Err(at(
                            "r = 1 is the open endpoint of the interpolation inequality, which is proved only for r > 1"
                                .into(),
                        ));
                    }
                    theta_exponents(r, s, gamma.unwrap_or(alpha.min(2.0)), n).map_err(|e| at(e.to_string()))?;
                }
                AnalysisSpec::Regularity {
                    ref times,
                    decade_lo,
                    decade_hi,
                    per_decade,
                } => {
                    if times.is_empty() || times.iter().any(|t| !(*t > 0.0)) {
                        return Err(at("times must be positive".into()));
                    }
                    if decade_hi - decade_lo < 3 {
                        return Err(at("need at least four decade cutoffs".into()));
                    }
                    if per_decade == 0 {
                        return Err(at("per_decade must be positive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the domain-escape guard is enforced (decay experiments only).
    pub fn guard_enforced(&self) -> bool {
        self.analyses
            .iter()
            .any(|a| matches!(a, AnalysisSpec::DecayFit { .. } | AnalysisSpec::SupTrend { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
[kernel]
dim = 1
near = { type = "bounded", c0 = 1.0 }
tail = { type = "power", alpha = 1.0 }
[grid]
half_width = 64.0
n = 256
[flow]
type = "nonlinear"
sigma = 2.0
[initial]
type = "box"
width = 1.0
[snapshots]
type = "log"
t_min = 1.0
t_max = 10.0
count = 8
include_zero = true
[output]
dir = "out"
"#;

    fn with(extra: &str) -> Result<ExperimentConfig> {
        let c = ExperimentConfig::from_toml(&format!("{BASE}{extra}"))?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn parses_and_round_trips() {
        let c = with("").unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
        let t = c.snapshots.times().unwrap();
        assert_eq!(t.len(), 9);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[8], 10.0);
    }

    #[test]
    fn rejects_sigma_minus_one_at_least_q() {
        let e = with("[[analysis]]\ntype = \"decay_fit\"\nq = 1.0\np = 2.0\n").unwrap_err();
        assert!(e.to_string().contains("sigma - 1 < q < p"), "{e}");
        assert!(with("[[analysis]]\ntype = \"decay_fit\"\nq = 1.5\np = 2.0\n").is_ok());
    }

    #[test]
    fn rejects_open_interpolation_endpoint() {
        let e = with("[[analysis]]\ntype = \"interpolation\"\nr = 1.0\ns = 2.0\n").unwrap_err();
        assert!(e.to_string().contains("open endpoint"), "{e}");
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(with("bogus = 1\n").is_err());
    }

    #[test]
    fn seed_override_reaches_random_datum() {
        let text = BASE.replace("type = \"box\"\nwidth = 1.0", "type = \"random\"\nband = 4\nseed = 3");
        let c = ExperimentConfig::from_toml(&text).unwrap().with_seed(9);
        assert_eq!(c.datum(), InitialDatum::SeededRandom { band: 4, seed: 9 });
        assert_eq!(c.seed_used(), Some(9));
    }
}
