//! The `poincare` command-line tool.
//!
//! Every command resolves an [`ExperimentConfig`] from an optional config
//! file and command-line flags (flags win), fills per-command defaults, runs
//! one computation and writes a JSON report embedding the resolved config.
//! Exit codes: 0 success, 2 a checked inequality failed, 1 bad input or a
//! computation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use poincare_core::config::ExperimentConfig;
use serde::Serialize;

mod commands;
mod report;

pub use report::{format_csv_float, Table};

pub const VERSION: &str = env!("POINCARE_VERSION");

/// Environment variable supplying the default worker count.
pub const THREADS_ENV: &str = "POINCARE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "poincare", version = VERSION, about = "Poincaré series, Bergman kernels and Seshadri bounds on compact quotients of the disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate the group elements moving the base point by at most R.
    Enumerate,
    /// Dirichlet domain, its quadrature grid and a tiling test.
    FundamentalDomain,
    /// Σ|j_γ(z)|² truncated at several radii.
    WeightSum,
    /// Evaluate a truncated Poincaré series and its derivative.
    PoincareEval,
    /// Check P(γz)·j_γ(z)^m = P(z) at random (γ, z).
    AutomorphyCheck,
    /// Weighted norms ‖f‖_{p,(m−2)/2}, p = 1, 2.
    Norm,
    /// Compare the unfolded L¹ bound with its fundamental-domain side.
    Lemma22Check,
    /// Polynomial approximation of a seed in ‖·‖_{1,(m−2)/2}.
    ApproxPoly,
    /// Transformation law, Hermitian symmetry and reproducing property of K_m.
    KernelCheck,
    /// ∫|K_m(z,w)| K(z,z)^{m/2−1} dλ(z) at several w.
    CmConstant,
    /// Rebuild f from h = P_m(f₀) and compare P_m(f) with h.
    Roundtrip,
    /// Half the smallest non-trivial displacement of x.
    InjectivityRadius,
    /// Largest orbit count in a ball of radius r, divided by r².
    Density,
    /// Properties of the cut-off a(t).
    CutoffCheck,
    /// Finite-difference check of ∂∂̄ψ ≥ −2D(r,x)·g.
    QuasiPshCheck,
    /// Lower bounds for the Seshadri constant of the canonical bundle.
    SeshadriBound,
    /// Smallest m for each ampleness criterion.
    Thresholds,
    /// Sampled jet and point separation by P_m(z^k), k ≤ d.
    SeparationScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        use Command::*;
        match self {
            Enumerate => "enumerate",
            FundamentalDomain => "fundamental-domain",
            WeightSum => "weight-sum",
            PoincareEval => "poincare-eval",
            AutomorphyCheck => "automorphy-check",
            Norm => "norm",
            Lemma22Check => "lemma22-check",
            ApproxPoly => "approx-poly",
            KernelCheck => "kernel-check",
            CmConstant => "cm-constant",
            Roundtrip => "roundtrip",
            InjectivityRadius => "injectivity-radius",
            Density => "density",
            CutoffCheck => "cutoff-check",
            QuasiPshCheck => "quasi-psh-check",
            SeshadriBound => "seshadri-bound",
            Thresholds => "thresholds",
            SeparationScan => "separation-scan",
        }
    }
}

/// Flags shared by every command; each overrides the config key of the same
/// name.
#[derive(Debug, Clone, Default, Args)]
struct Opts {
    /// Experiment config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write tabular data as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Group preset name (genus2, trivial).
    #[arg(long, global = true)]
    group: Option<String>,
    /// Group file.
    #[arg(long, global = true)]
    group_file: Option<String>,
    /// Weight.
    #[arg(long, short, global = true)]
    m: Option<String>,
    /// Seed function, e.g. "poly 1 0 0.5" or "rational 1 / 2 -1".
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Truncation radius R.
    #[arg(long, short = 'R', global = true)]
    radius: Option<String>,
    /// List of radii, e.g. "4,6,8".
    #[arg(long, global = true)]
    radii: Option<String>,
    /// Radial nodes of the polar grid.
    #[arg(long, global = true)]
    grid_radial: Option<String>,
    /// Angular nodes of the polar grid.
    #[arg(long, global = true)]
    grid_angular: Option<String>,
    /// Number of random samples.
    #[arg(long, global = true)]
    samples: Option<String>,
    /// Top monomial degree of the section basis.
    #[arg(long, short, global = true)]
    degree: Option<String>,
    /// Seshadri constant (lower bound) for thresholds.
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Complex dimension.
    #[arg(long, short, global = true)]
    n: Option<String>,
    /// Constant C(Ω) for the Donnelly–Fefferman threshold.
    #[arg(long, short, global = true)]
    c: Option<String>,
    /// Point of the disc, e.g. "0.1+0.2i".
    #[arg(long, short, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// Counting or cut-off radius r.
    #[arg(long, short, global = true)]
    r: Option<String>,
    /// Seed of the random number generator (default 0).
    #[arg(long, global = true)]
    rng_seed: Option<String>,
    /// Relative quadrature slack.
    #[arg(long, global = true)]
    slack: Option<String>,
    /// Finite-difference step.
    #[arg(long, global = true)]
    fd_step: Option<String>,
    /// Candidate radii as multiples of the injectivity radius.
    #[arg(long, global = true)]
    factors: Option<String>,
    /// Approximation target.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Quadrature spacing over the fundamental domain.
    #[arg(long, global = true)]
    spacing: Option<String>,
}

impl Opts {
    /// The flags as config text, so they go through the same validation as
    /// a file.
    fn as_config_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let pairs = [
            ("output", path(&self.output)),
            ("csv", path(&self.csv)),
            ("group", self.group.clone()),
            ("group_file", self.group_file.clone()),
            ("m", self.m.clone()),
            ("seed", self.seed.clone()),
            ("radius", self.radius.clone()),
            ("radii", self.radii.clone()),
            ("grid_radial", self.grid_radial.clone()),
            ("grid_angular", self.grid_angular.clone()),
            ("samples", self.samples.clone()),
            ("degree", self.degree.clone()),
            ("epsilon", self.epsilon.clone()),
            ("n", self.n.clone()),
            ("c", self.c.clone()),
            ("x", self.x.clone()),
            ("r", self.r.clone()),
            ("rng_seed", self.rng_seed.clone()),
            ("slack", self.slack.clone()),
            ("fd_step", self.fd_step.clone()),
            ("factors", self.factors.clone()),
            ("delta", self.delta.clone()),
            ("spacing", self.spacing.clone()),
        ];
        let mut s = String::new();
        for (k, v) in pairs {
            if let Some(v) = v {
                s += &format!("{k} = {}\n", v.replace(['\n', '#'], " "));
            }
        }
        s
    }
}

/// Result of one command before it is wrapped in a report.
pub struct Outcome {
    pub result: serde_json::Value,
    pub passed: bool,
    pub table: Option<Table>,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    passed: bool,
    result: serde_json::Value,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

fn load_config(opts: &Opts) -> Result<ExperimentConfig, String> {
    let file = match &opts.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            ExperimentConfig::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig::parse(&opts.as_config_text()).map_err(|e| match e {
        poincare_core::Error::Parse { message, .. } => format!("command line: {message}"),
        other => format!("command line: {other}"),
    })?;
    Ok(file.overridden_by(flags))
}

/// Run the tool on `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    let mut cfg = match load_config(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.opts.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_INPUT;
        }
    };
    let outcome = pool.install(|| commands::execute(cli.command, &mut cfg));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = Report {
        command: cli.command.name(),
        version: VERSION,
        config: &cfg,
        passed: outcome.passed,
        result: outcome.result,
    };
    let mut json = match serde_json::to_string_pretty(&report) {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot serialize report: {e}");
            return EXIT_INPUT;
        }
    };
    json.push('\n');
    let written = match &cfg.output {
        Some(p) => std::fs::write(p, &json).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => stdout.write_all(json.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INPUT;
    }
    if let (Some(p), Some(t)) = (&cfg.csv, &outcome.table) {
        if let Err(e) = std::fs::write(p, t.to_csv()) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", p.display());
            return EXIT_INPUT;
        }
    }
    if outcome.passed {
        EXIT_OK
    } else {
        let _ = writeln!(
            stderr,
            "{}: a checked inequality failed; see the report",
            cli.command.name()
        );
        EXIT_ASSERTION
    }
}
