use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levyheat::config::{AnalysisSpec, ExperimentConfig, KernelSpec};
use levyheat::io;
use levyheat::runner::{self, RunSummary};
use levyheat::symbol::{build_symbol_table, log_grid};
use levyheat::verify::Battery;

/// Worker-count override for the data-parallel stages.
const THREADS_ENV: &str = "LEVYHEAT_THREADS";

#[derive(Parser)]
#[command(name = "levyheat", version, about = "Spectral experiments for nonlocal heat equations")]
struct Cli {
    /// Seed override for random data and test families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the radial symbol m(ρ) on a log grid.
    Symbol(SymbolArgs),
    /// Evolve an initial datum and write snapshots plus norms.
    Evolve {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Fit the decay exponent of ‖u(t)‖_p and compare with the predicted rate.
    DecayFit {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        p: f64,
        /// Fit window as t_lo,t_hi; omitted means automatic.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<f64>>,
        /// Allowed deviation from the predicted exponent.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Restricted Nash ratios over a dilation family of smooth boxes.
    NashCheck {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.125)]
        lambda_min: f64,
        #[arg(long, default_value_t = 8.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 25)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 0.25)]
        transition: f64,
    },
    /// Interpolation constants along the flow.
    Interpolation {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Regularizing-effect verdicts at the given times.
    Regularity {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<f64>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        decade_lo: i32,
        #[arg(long, default_value_t = 6)]
        decade_hi: i32,
        #[arg(long, default_value_t = 16)]
        per_decade: usize,
    },
    /// Run an experiment config file.
    Run {
        config: PathBuf,
        /// Output directory, replacing the one in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance battery and print a pass/fail table.
    Verify {
        /// Comma-separated criterion ids; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Near-origin profile, e.g. `fractional:beta=1` or `borderline`.
    #[arg(long, default_value = "fractional:beta=1")]
    near: String,
    /// Tail profile, e.g. `power:alpha=1`, `compact`, `exponential:lambda=2`.
    #[arg(long, default_value = "power:alpha=1")]
    tail: String,
    /// Divide a pure-power symbol by its constant.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct SymbolArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 1e-3)]
    rho_min: f64,
    #[arg(long, default_value_t = 1e4)]
    rho_max: f64,
    #[arg(long, default_value_t = 64)]
    per_decade: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Take everything but the analysis from this config file.
    #[arg(long, conflicts_with_all = ["dim", "near", "tail", "normalize", "half_width", "n", "sigma", "initial", "times"])]
    config: Option<PathBuf>,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Half-width L of the periodic box [-L, L)^N.
    #[arg(long, default_value_t = 16.0)]
    half_width: f64,
    /// Grid points per dimension (power of two).
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Exponent of Φ(u) = |u|^{σ-1}u; the linear flow when omitted.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1.0, requires = "sigma")]
    bound: f64,
    #[arg(long, default_value_t = 0.5, requires = "sigma")]
    cfl: f64,
    #[arg(long, default_value = "midpoint", requires = "sigma")]
    stepper: String,
    /// Initial datum, e.g. `box:width=1`, `gaussian:s=0.5`, `delta`, `random:band=10,seed=1`.
    #[arg(long, default_value = "box:width=1")]
    initial: String,
    /// Snapshot times.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    times: Vec<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one field file per snapshot.
    #[arg(long)]
    fields: bool,
}

/// `kind:k=v,k=v` to a TOML inline table with a `type` tag.
fn descriptor(text: &str) -> Result<String, String> {
    let (kind, params) = text.split_once(':').unwrap_or((text, ""));
    let mut parts = vec![format!("type = \"{}\"", kind.trim())];
    for kv in params.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value in `{text}`, got `{kv}`"))?;
        parts.push(format!("{} = {}", k.trim(), v.trim()));
    }
    Ok(format!("{{ {} }}", parts.join(", ")))
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

impl KernelArgs {
    fn toml(&self) -> Result<String, String> {
        Ok(format!(
            "dim = {}\nnormalize = {}\nnear = {}\ntail = {}\n",
            self.dim,
            self.normalize,
            descriptor(&self.near)?,
            descriptor(&self.tail)?
        ))
    }
}

impl ExperimentArgs {
    fn config(&self, name: &str, default_dir: &str) -> Result<ExperimentConfig, String> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path).map_err(|e| e.to_string())?,
            None => {
                let flow = match self.sigma {
                    None => "type = \"linear\"".to_string(),
                    Some(s) => format!(
                        "type = \"nonlinear\"\nsigma = {}\nbound = {}\ncfl = {}\nstepper = \"{}\"",
                        float(s),
                        float(self.bound),
                        float(self.cfl),
                        self.stepper
                    ),
                };
                let times: Vec<String> = self.times.iter().map(|&t| float(t)).collect();
                let text = format!(
                    "name = \"{name}\"\n[kernel]\n{}[grid]\nhalf_width = {}\nn = {}\n[flow]\n{flow}\n\
                     [initial]\n{}\n[snapshots]\ntype = \"list\"\ntimes = [{}]\n[output]\ndir = \"{default_dir}\"\n",
                    self.kernel.toml()?,
                    float(self.half_width),
                    self.n,
                    inline_to_section(&descriptor(&self.initial)?),
                    times.join(", "),
                );
                ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?
            }
        };
        if let Some(dir) = &self.out {
            c.output.dir = dir.clone();
        }
        c.output.fields |= self.fields;
        Ok(c)
    }
}

/// `{ a = 1, b = 2 }` to `a = 1\nb = 2`.
fn inline_to_section(inline: &str) -> String {
    inline.trim_start_matches('{').trim_end_matches('}').split(", ").map(str::trim).collect::<Vec<_>>().join("\n")
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be positive"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    Ok(())
}

fn symbol(args: &SymbolArgs) -> Result<ExitCode, String> {
    let spec: KernelSpec = toml::from_str(&args.kernel.toml()?).map_err(|e| format!("kernel: {e}"))?;
    let k = spec.build().map_err(|e| e.to_string())?;
    if !(args.rho_min > 0.0 && args.rho_max > args.rho_min && args.per_decade > 0) {
        return Err("need 0 < rho-min < rho-max and per-decade > 0".into());
    }
    let mut tab = build_symbol_table(&k, &log_grid(args.rho_min, args.rho_max, args.per_decade)).map_err(|e| e.to_string())?;
    if spec.normalize {
        tab = tab.normalized().map_err(|e| e.to_string())?;
    }
    let csv = io::symbol_csv(&tab);
    match &args.out {
        Some(path) => io::write_text(path, &csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn report(summary: &RunSummary) -> ExitCode {
    let out = &summary.output;
    println!("output = {}", summary.dir.display());
    println!("guard_worst_ratio = {}", io::num(out.guard.worst_ratio));
    if let Some(steps) = out.steps {
        println!("time_steps = {steps}");
    }
    for o in &out.outcomes {
        println!("[{}]", o.kind);
        print!("{}", o.report.render());
    }
    if out.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn analysis(exp: &ExperimentArgs, seed: Option<u64>, kind: &str, spec: AnalysisSpec) -> Result<ExitCode, String> {
    let mut c = exp.config(kind, &format!("levyheat-out/{kind}"))?;
    if let Some(s) = seed {
        c = c.with_seed(s);
    }
    c.analyses = vec![spec];
    runner::run(&c).map(|s| report(&s)).map_err(|e| e.to_string())
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    init_threads()?;
    let seed = cli.seed;
    match cli.command {
        Command::Symbol(args) => symbol(&args),
        Command::Evolve { exp } => {
            let mut c = exp.config("evolve", "levyheat-out/evolve")?;
            if let Some(s) = seed {
                c = c.with_seed(s);
            }
            c.analyses.clear();
            runner::run(&c).map(|s| report(&s)).map_err(|e| e.to_string())
        }
        Command::DecayFit { exp, q, p, window, tolerance } => analysis(
            &exp,
            seed,
            "decay_fit",
            AnalysisSpec::DecayFit {
                q,
                p,
                window: window.map(|w| [w[0], w[1]]),
                tolerance,
            },
        ),
        Command::NashCheck { exp, r, lambda_min, lambda_max, count, width, transition } => analysis(
            &exp,
            seed,
            "nash_check",
            AnalysisSpec::NashCheck { r, lambda_min, lambda_max, count, width, transition },
        ),
        Command::Interpolation { exp, r, s, gamma } => {
            analysis(&exp, seed, "interpolation", AnalysisSpec::Interpolation { r, s, gamma })
        }
        Command::Regularity { exp, at, decade_lo, decade_hi, per_decade } => analysis(
            &exp,
            seed,
            "regularity",
            AnalysisSpec::Regularity {
                times: at,
                decade_lo,
                decade_hi,
                per_decade,
            },
        ),
        Command::Run { config, out } => {
            let mut c = ExperimentConfig::load(&config).map_err(|e| e.to_string())?;
            if let Some(s) = seed {
                c = c.with_seed(s);
            }
            if let Some(dir) = out {
                c.output.dir = dir;
            }
            runner::run(&c).map(|s| report(&s)).map_err(|e| e.to_string())
        }
        Command::Verify { only } => {
            let ids = only.unwrap_or_else(|| (1..=12).collect());
            if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
                return Err(format!("no criterion {bad}; ids run from 1 to 12"));
            }
            let mut battery = Battery::new();
            let mut failed = 0;
            for id in &ids {
                let r = battery.run(*id);
                failed += usize::from(!r.pass);
                println!("{r}");
            }
            println!("{} passed, {} failed", ids.len() - failed, failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_become_tagged_tables() {
        assert_eq!(descriptor("fractional:beta=1").unwrap(), "{ type = \"fractional\", beta = 1 }");
        assert_eq!(descriptor("compact").unwrap(), "{ type = \"compact\" }");
        assert!(descriptor("power:alpha").is_err());
        assert_eq!(inline_to_section("{ type = \"box\", width = 1 }"), "type = \"box\"\nwidth = 1");
    }

    #[test]
    fn flags_build_a_valid_config() {
        let cli = Cli::parse_from(["levyheat", "evolve", "--sigma", "2", "--times", "0,0.5", "--initial", "gaussian:s=0.5"]);
        let Command::Evolve { exp } = cli.command else { panic!() };
        let c = exp.config("t", "out").unwrap();
        c.validate().unwrap();
        assert_eq!(c.snapshots.times().unwrap(), vec![0.0, 0.5]);
        assert!((c.flow.sigma() - 2.0).abs() < 1e-15);
    }
}
