//! Config-driven pipeline: kernel, symbol table, flow, analyses, artifacts.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::analysis::{
    decay::{fit_decay_exponent, FitWindow},
    dirichlet_form_spectral, interpolation_check, log_growth_rate, nash_exponent, nash_sweep, regularizing_diagnostic,
    decade_cutoffs,
};
use crate::config::{AnalysisSpec, ExperimentConfig, FlowSpec};
use crate::datum::dilated_smooth_box;
use crate::error::{Error, Result};
use crate::evolve::{evolve_nonlinear, lattice_table, propagate_series, LinearPropagator, NonlinearOptions};
use crate::io::{self, num, Report};
use crate::kernels::LevyKernel;
use crate::spectral::{lp_norm, mass, GridField};
use crate::symbol::{build_symbol_table, log_grid, SymbolTable};

/// One analysis result: its report and, when it carries a criterion, the verdict.
#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub kind: &'static str,
    pub report: Report,
    /// CSV rows behind the report, if any.
    pub rows: Option<String>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct GuardVerdict {
    pub worst_ratio: f64,
    pub threshold: f64,
    pub enforced: bool,
}

impl GuardVerdict {
    pub fn pass(&self) -> bool {
        self.worst_ratio <= self.threshold
    }
}

/// Everything a run computed, including the in-memory snapshots.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub times: Vec<f64>,
    pub fields: Vec<GridField>,
    pub initial: GridField,
    pub table: SymbolTable,
    pub guard: GuardVerdict,
    pub outcomes: Vec<AnalysisOutcome>,
    pub steps: Option<usize>,
    /// Rows of norms.csv: t, l1, l2, lp, linf, energy.
    pub norms: Vec<Vec<f64>>,
}

impl RunOutput {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass != Some(false))
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<(String, String)>,
    pub output: RunOutput,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Lattice symbol table of the configured kernel, normalized when requested.
pub fn config_table(c: &ExperimentConfig, k: &LevyKernel) -> Result<SymbolTable> {
    let tab = lattice_table(k, &c.grid()?)?;
    if c.kernel.normalize {
        tab.normalized()
    } else {
        Ok(tab)
    }
}

/// Runs the pipeline in memory without touching the filesystem.
pub fn execute(c: &ExperimentConfig) -> Result<RunOutput> {
    stage("validate", c.validate())?;
    let kernel = stage("kernel", c.kernel.build())?;
    let grid = stage("grid", c.grid())?;
    let table = stage("symbol", config_table(c, &kernel))?;
    let prop = stage("symbol", LinearPropagator::from_table(&table, grid))?;
    let u0 = stage("initial", c.datum().sample(&grid))?;
    let times = stage("snapshots", c.snapshots.times())?;
    let (fields, steps) = match c.flow {
        FlowSpec::Linear => (stage("evolve", propagate_series(&prop, &u0, &times))?, None),
        FlowSpec::Nonlinear { cfl, stepper, .. } => {
            let phi = c.phi()?.expect("nonlinear flow has a law");
            let opts = NonlinearOptions {
                cfl,
                stepper,
                ..Default::default()
            };
            let t_end = *times.last().unwrap();
            let run = stage("evolve", evolve_nonlinear(&prop, &phi, &u0, t_end.max(f64::MIN_POSITIVE), &times, &opts))?;
            (run.fields, Some(run.steps))
        }
    };
    let mut worst: f64 = 0.0;
    let mut worst_t = 0.0;
    for (t, f) in times.iter().zip(&fields) {
        let sup = f.sup();
        let ratio = if sup > 0.0 { f.boundary_sup() / sup } else { 0.0 };
        if ratio > worst {
            worst = ratio;
            worst_t = *t;
        }
    }
    let guard = GuardVerdict {
        worst_ratio: worst,
        threshold: c.output.guard_threshold,
        enforced: c.guard_enforced(),
    };
    if guard.enforced && !guard.pass() {
        return Err(Error::DomainEscape { t: worst_t, ratio: worst }.in_stage("guard"));
    }
    let mut outcomes = Vec::with_capacity(c.analyses.len());
    for (i, a) in c.analyses.iter().enumerate() {
        let o = analyse(c, &kernel, &prop, &u0, &times, &fields, a);
        outcomes.push(stage(&format!("analysis {i} ({})", a.kind()), o)?);
    }
    let mut norms = Vec::with_capacity(times.len());
    for (t, f) in times.iter().zip(&fields) {
        norms.push(vec![
            *t,
            lp_norm(f, 1.0)?,
            lp_norm(f, 2.0)?,
            lp_norm(f, c.output.norm_p)?,
            f.sup(),
            dirichlet_form_spectral(&prop, f)?,
        ]);
    }
    Ok(RunOutput {
        times,
        fields,
        initial: u0,
        table,
        guard,
        outcomes,
        steps,
        norms,
    })
}

fn positive_series(times: &[f64], fields: &[GridField], p: f64) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .zip(fields)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, f)| lp_norm(f, p).map(|n| (*t, n)))
        .collect()
}

fn analyse(
    c: &ExperimentConfig,
    kernel: &LevyKernel,
    prop: &LinearPropagator,
    u0: &GridField,
    times: &[f64],
    fields: &[GridField],
    spec: &AnalysisSpec,
) -> Result<AnalysisOutcome> {
    let mut rep = Report::new();
    rep.set("analysis", spec.kind());
    let mut rows: Option<(Vec<&'static str>, Vec<Vec<f64>>)> = None;
    let pass = match *spec {
        AnalysisSpec::DecayFit { q, p, window, tolerance } => {
            let series = positive_series(times, fields, p)?;
            let w = match window {
                Some([t_lo, t_hi]) => FitWindow::Range { t_lo, t_hi },
                None => FitWindow::Auto,
            };
            let fit = fit_decay_exponent(&series, w)?;
            let expected = c.predicted_rate(q, p)?;
            let rel = (fit.exponent - expected).abs() / expected;
            rep.set("q", q)
                .set("p", p)
                .set("exponent", fit.exponent)
                .set("prefactor", fit.prefactor)
                .set("expected", expected)
                .set("relative_error", rel)
                .set("t_lo", fit.t_lo)
                .set("t_hi", fit.t_hi)
                .set("r_squared", fit.r_squared)
                .set("points", fit.points);
            rows = Some((vec!["t", "norm"], series.iter().map(|&(t, n)| vec![t, n]).collect()));
            tolerance.map(|tol| {
                rep.set("tolerance", tol);
                rel <= tol
            })
        }
        AnalysisSpec::SupTrend { max_final_fraction } => {
            let mut sups = vec![u0.sup()];
            let start = if times.first() == Some(&0.0) { 1 } else { 0 };
            sups.extend(fields[start..].iter().map(|f| f.sup()));
            let monotone = sups.windows(2).all(|w| w[1] <= w[0]);
            let fraction = sups.last().unwrap() / sups[0];
            rep.set("initial_sup", sups[0])
                .set("final_sup", *sups.last().unwrap())
                .set("final_fraction", fraction)
                .set("monotone", monotone)
                .set("max_final_fraction", max_final_fraction);
            Some(monotone && fraction < max_final_fraction)
        }
        AnalysisSpec::Contraction { tolerance } => {
            let m0 = mass(u0);
            let ps = [1.0, 2.0, f64::INFINITY];
            let n0: Vec<f64> = ps.iter().map(|&p| lp_norm(u0, p)).collect::<Result<_>>()?;
            let mut prev = n0.clone();
            let mut mass_dev: f64 = 0.0;
            let mut worst_rise = [0.0f64; 3];
            for f in fields {
                mass_dev = mass_dev.max((mass(f) - m0).abs());
                for (j, &p) in ps.iter().enumerate() {
                    let n = lp_norm(f, p)?;
                    worst_rise[j] = worst_rise[j].max((n - prev[j]) / n0[j].max(f64::MIN_POSITIVE));
                    prev[j] = n;
                }
            }
            let mass_ok = mass_dev <= tolerance * m0.abs().max(1.0);
            let norms_ok = worst_rise.iter().all(|&r| r <= tolerance);
            rep.set("initial_mass", m0)
                .set("max_mass_deviation", mass_dev)
                .set("max_rise_l1", worst_rise[0])
                .set("max_rise_l2", worst_rise[1])
                .set("max_rise_linf", worst_rise[2])
                .set("tolerance", tolerance);
            Some(mass_ok && norms_ok)
        }
        AnalysisSpec::EnergyBound { tolerance } => {
            let n2 = lp_norm(u0, 2.0)?;
            let mut worst: f64 = 0.0;
            let mut table = Vec::new();
            for (t, f) in times.iter().zip(fields).filter(|(t, _)| **t > 0.0) {
                let e = dirichlet_form_spectral(prop, f)?;
                let bound = n2 * n2 / (2.0 * std::f64::consts::E * t);
                worst = worst.max(e / bound);
                table.push(vec![*t, e, bound]);
            }
            rep.set("max_energy_over_bound", worst).set("tolerance", tolerance);
            rows = Some((vec!["t", "energy", "bound"], table));
            Some(worst <= 1.0 + tolerance)
        }
        AnalysisSpec::NashCheck {
            r,
            lambda_min,
            lambda_max,
            count,
            width,
            transition,
        } => {
            let d = nash_exponent(r, c.kernel.dim, kernel.tail_exponent());
            let lambdas: Vec<f64> = (0..count)
                .map(|i| lambda_min * (lambda_max / lambda_min).powf(i as f64 / (count - 1) as f64))
                .collect();
            let family: Vec<GridField> = lambdas
                .iter()
                .map(|&l| dilated_smooth_box(prop.grid(), width, transition, l))
                .collect::<Result<_>>()?;
            let nash = nash_sweep(prop, &family, d, r, "dilated smooth box")?;
            rep.set("r", r)
                .set("d", d)
                .set("family", nash.family.as_str())
                .set("min_ratio", nash.min_ratio)
                .set("nash_branch_count", nash.nash_count)
                .set("poincare_branch_count", nash.poincare_count);
            let table = lambdas
                .iter()
                .zip(&nash.samples)
                .enumerate()
                .map(|(i, (&l, s))| {
                    vec![i as f64, l, s.ratio, if s.branch == crate::analysis::NashBranch::Nash { 0.0 } else { 1.0 }]
                })
                .collect();
            rows = Some((vec!["sample_id", "lambda", "ratio", "branch"], table));
            Some(nash.min_ratio > 0.0)
        }
        AnalysisSpec::Interpolation { r, s, gamma } => {
            let g = gamma.unwrap_or(kernel.tail_exponent().min(2.0));
            let mut table = Vec::new();
            for (t, f) in times.iter().zip(fields) {
                if f.sup() == 0.0 {
                    continue;
                }
                let rep_i = interpolation_check(prop, f, r, s, g)?;
                table.push(vec![*t, rep_i.lhs, rep_i.term1, rep_i.term2, rep_i.constant]);
            }
            let max_c = table.iter().map(|r| r[4]).fold(0.0, f64::max);
            rep.set("r", r).set("s", s).set("gamma", g).set("max_constant", max_c);
            rows = Some((vec!["t", "lhs", "term1", "term2", "constant"], table));
            Some(max_c.is_finite())
        }
        AnalysisSpec::Regularity {
            ref times,
            decade_lo,
            decade_hi,
            per_decade,
        } => {
            let grid = log_grid(10f64.powi(decade_lo), 10f64.powi(decade_hi), per_decade);
            let mut tab = build_symbol_table(kernel, &grid)?;
            if c.kernel.normalize {
                tab = tab.normalized()?;
            }
            let omega = log_growth_rate(&tab)?;
            rep.set("omega", omega).set("threshold_time", c.kernel.dim as f64 / omega);
            let cutoffs = decade_cutoffs(decade_lo, decade_hi);
            let mut table = Vec::new();
            for &t in times {
                let d = regularizing_diagnostic(&tab, t, &cutoffs)?;
                rep.set(format!("verdict_t{}", num(t)), d.verdict.to_string());
                rep.set(
                    format!("first_divergent_k_t{}", num(t)),
                    d.first_divergent_k.map(|k| k.to_string()).unwrap_or_else(|| "none".into()),
                );
                table.extend(d.partials.iter().map(|&(r, i)| vec![t, r, i]));
            }
            rows = Some((vec!["t", "cutoff", "integral"], table));
            None
        }
    };
    if let Some(p) = pass {
        rep.set("pass", p);
    }
    Ok(AnalysisOutcome {
        kind: spec.kind(),
        report: rep,
        rows: rows.map(|(h, r)| io::table_csv(&h, &r)),
        pass,
    })
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn staging_path(dir: &Path) -> PathBuf {
    let mut name = dir.file_name().map(|n| n.to_os_string()).unwrap_or_else(|| "run".into());
    name.push(".partial");
    dir.with_file_name(name)
}

fn render_outputs(c: &ExperimentConfig, out: &RunOutput) -> Vec<(String, String)> {
    let mut files = vec![
        ("config.toml".to_string(), c.to_toml()),
        ("symbol.csv".to_string(), io::symbol_csv(&out.table)),
    ];
    files.push(("norms.csv".into(), io::table_csv(&["t", "l1", "l2", "lp", "linf", "energy"], &out.norms)));
    if c.output.fields {
        for (i, f) in out.fields.iter().enumerate() {
            files.push((format!("field_{i:04}.csv"), io::field_csv(f)));
        }
    }
    for (i, o) in out.outcomes.iter().enumerate() {
        files.push((format!("analysis_{i}_{}.txt", o.kind), o.report.render()));
        if let Some(csv) = &o.rows {
            files.push((format!("analysis_{i}_{}.csv", o.kind), csv.clone()));
        }
    }
    files
}

fn manifest(c: &ExperimentConfig, out: &RunOutput, files: &[(String, String)]) -> String {
    let mut m = Report::new();
    m.set("name", c.name.as_str())
        .set("config_sha256", c.hash())
        .set(
            "seed",
            c.seed_used().map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
        )
        .set("symbol_quad_tol", out.table.quad_tol)
        .set("symbol_table_points", out.table.len())
        .set("guard_threshold", out.guard.threshold)
        .set("guard_worst_ratio", out.guard.worst_ratio)
        .set("guard_enforced", out.guard.enforced)
        .set("guard_verdict", if out.guard.pass() { "PASS" } else { "FAIL" });
    if let FlowSpec::Nonlinear { cfl, stepper, .. } = c.flow {
        m.set("cfl", cfl).set("stepper", format!("{stepper:?}").to_lowercase());
    }
    if let Some(s) = out.steps {
        m.set("time_steps", s);
    }
    m.set("all_pass", out.all_pass());
    for (name, text) in files {
        m.set(format!("sha256:{name}"), sha256(text));
    }
    m.render()
}

/// Executes the config and writes its artifacts. Outputs are staged in a
/// sibling `.partial` directory that is renamed on success and removed on failure.
pub fn run(c: &ExperimentConfig) -> Result<RunSummary> {
    let dir = c.output.dir.clone();
    let staging = staging_path(&dir);
    if staging.exists() {
        std::fs::remove_dir_all(&staging)?;
    }
    let result = (|| {
        let out = execute(c)?;
        std::fs::create_dir_all(&staging).map_err(|e| Error::from(e).in_stage("output"))?;
        let mut files = render_outputs(c, &out);
        for (name, text) in &files {
            stage("output", io::write_text(&staging.join(name), text))?;
        }
        let man = manifest(c, &out, &files);
        stage("output", io::write_text(&staging.join("manifest.txt"), &man))?;
        files.push(("manifest.txt".into(), man));
        if dir.exists() {
            std::fs::remove_dir_all(&dir)?;
        }
        std::fs::rename(&staging, &dir)?;
        Ok((out, files))
    })();
    match result {
        Ok((output, files)) => Ok(RunSummary {
            dir,
            files: files.into_iter().map(|(n, t)| (n, sha256(&t))).collect(),
            output,
        }),
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"
name = "unit"
[kernel]
dim = 1
near = {{ type = "bounded", c0 = 1.0 }}
tail = {{ type = "power", alpha = 1.0 }}
[grid]
half_width = 32.0
n = 256
[flow]
type = "linear"
[initial]
type = "box"
width = 1.0
[snapshots]
type = "log"
t_min = 0.5
t_max = 4.0
count = 6
include_zero = true
[output]
dir = "{}"
{extra}
"#,
            dir.display()
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn run_writes_manifest_and_is_reproducible() {
        let tmp = tempfile::tempdir().unwrap();
        let c = config(&tmp.path().join("a"), "[[analysis]]\ntype = \"contraction\"\n[[analysis]]\ntype = \"energy_bound\"\n");
        let s1 = run(&c).unwrap();
        assert!(s1.output.all_pass());
        let man = std::fs::read_to_string(s1.dir.join("manifest.txt")).unwrap();
        assert!(man.contains("guard_verdict"));
        let s2 = run(&c).unwrap();
        assert_eq!(s1.files, s2.files);
        assert!(!staging_path(&s1.dir).exists());
    }

    #[test]
    fn guard_failure_removes_partial_outputs() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("b");
        let c = config(&dir, "[[analysis]]\ntype = \"sup_trend\"\n");
        let err = run(&c).unwrap_err();
        assert!(err.to_string().contains("domain-escape"), "{err}");
        assert!(!dir.exists());
        assert!(!staging_path(&dir).exists());
    }
}
