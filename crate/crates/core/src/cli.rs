//! The `ballspace` command line. Every command is deterministic given its
//! flags, its config file and `--seed`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counterexample::{build_certificate_with_progress, su_limit, verify_certificate, Certificate, CertificateConfig};
use crate::kernel::{drewnowski_integral, kernel_coeffs, nawrocki_search, sup_on_vn_point, KernelParams, SearchBudget};
use crate::numerics::{LogReal, RadialSeries};
use crate::quadrature::{integrate_slice, montecarlo_sphere, QuadratureSpec};
use crate::spaces::{decay_target, MultiIndex, SpaceSpec};
use crate::toeplitz::{apply_toeplitz, solve_toeplitz_ball, solve_toeplitz_disk, SymbolSeries};
use crate::{json, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Defaults for every command, read from a TOML file with `--config` and
/// overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d: u32,
    pub trunc_degree: usize,
    pub seed: u64,
    pub samples: usize,
    pub quadrature: QuadratureSpec,
    pub search: SearchBudget,
    pub certificate: CertificateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 2,
            trunc_degree: 64,
            seed: 0,
            samples: 100_000,
            quadrature: QuadratureSpec::default(),
            search: SearchBudget::default(),
            certificate: CertificateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("d must be at least 1"));
        }
        if self.samples == 0 || self.search.max_index == 0 || self.search.grid_points == 0 {
            return Err(Error::invalid("budgets must be positive"));
        }
        self.quadrature.validate()
    }
}

#[derive(Debug, Parser)]
#[command(name = "ballspace", version, about = "Hardy spaces of the unit ball: norms, Toeplitz solves, kernels and weight certificates")]
pub struct Cli {
    /// TOML file with run defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Squared norm of a monomial.
    Norms(NormsArgs),
    #[command(subcommand)]
    Toeplitz(ToeplitzCommand),
    #[command(subcommand)]
    Kernel(KernelCommand),
    #[command(subcommand)]
    Certificate(CertificateCommand),
    /// Integral of the log of a weight over the sphere.
    Szego(SzegoArgs),
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// `ball:<d>` or `disk:<n>`.
    #[arg(long)]
    pub space: SpaceSpec,
    /// Comma-separated multi-index.
    #[arg(long, value_delimiter = ',', conflicts_with = "k")]
    pub alpha: Option<Vec<u32>>,
    /// Degree of `z_1^k`.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum ToeplitzCommand {
    /// `T_{m̄} g` for a one-variable symbol.
    Apply(ToeplitzArgs),
    /// Solve `T_{m̄} g = f`.
    Solve(ToeplitzArgs),
}

#[derive(Debug, Args)]
pub struct ToeplitzArgs {
    #[arg(long)]
    pub space: SpaceSpec,
    /// Symbol: a series CSV in `z_1`, or a JSON multivariable symbol.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Input series CSV.
    #[arg(long, required_unless_present = "decay")]
    pub series: Option<PathBuf>,
    /// Use `f̂(k) = e^{-k^γ} C(k+d-1, k)` as the input series.
    #[arg(long, conflicts_with = "series")]
    pub decay: Option<f64>,
    #[arg(long = "N")]
    pub trunc: Option<usize>,
    /// Exit with status 1 if the residual exceeds this.
    #[arg(long)]
    pub max_residual: Option<f64>,
    /// Write the JSON report here instead of stderr.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
}

#[derive(Debug, Subcommand)]
pub enum KernelCommand {
    /// Taylor coefficients in `z_1` as CSV.
    Coeffs {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long = "N")]
        trunc: Option<usize>,
    },
    /// `∫ log(1 + c|F|) dσ`, by default with the certificate's quadrature.
    Drewnowski {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The radius maximizing the normalized `i`-th coefficient.
    Nawrocki {
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        i: u64,
    },
    /// `sup c|F|` over `V_n`.
    Supvn {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum CertificateCommand {
    /// Build a certificate and verify it.
    Build(BuildArgs),
    /// Recompute every inequality in a certificate file.
    Verify {
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub gamma_exp: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Record the build time in the certificate.
    #[arg(long)]
    pub timestamp: bool,
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quadrature,
    Montecarlo,
}

#[derive(Debug, Args)]
pub struct SzegoArgs {
    /// Weight `|f(ζ_1)|` for a series CSV `f`.
    #[arg(long, required_unless_present = "certificate")]
    pub weight: Option<PathBuf>,
    /// The weight `g` of a certificate file.
    #[arg(long, conflicts_with = "weight")]
    pub certificate: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum, default_value_t = Method::Quadrature)]
    pub method: Method,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a command produced: its exit status and diagnostics already
/// written.
struct Outcome {
    passed: bool,
}

impl Outcome {
    fn ok() -> Self {
        Outcome { passed: true }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_report(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stderr().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_series(path: &Path) -> Result<RadialSeries> {
    RadialSeries::read_csv(BufReader::new(File::open(path)?))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// A one-variable symbol as a real series in `z_1`.
fn symbol_in_z1(sym: &SymbolSeries) -> Result<RadialSeries> {
    let mut coeffs: Vec<(usize, f64)> = Vec::new();
    for (alpha, b) in sym.terms() {
        let e = alpha.entries();
        if e[1..].iter().any(|&x| x != 0) || b.im != 0.0 {
            return Err(Error::invalid(
                "this space needs a real symbol in z_1 alone".to_string(),
            ));
        }
        coeffs.push((e[0] as usize, b.re));
    }
    let deg = coeffs.iter().map(|&(k, _)| k).max().unwrap_or(0);
    let mut s = RadialSeries::zeros(deg);
    for (k, v) in coeffs {
        s.set(k, LogReal::from_f64(v));
    }
    Ok(s)
}

fn kernel_params(cfg: &RunConfig, k: &KernelArgs) -> Result<KernelParams> {
    KernelParams::new(k.d.unwrap_or(cfg.d), k.c, k.r)
}

#[derive(Serialize)]
struct NormOutput {
    space: String,
    alpha: Vec<u32>,
    sign: i8,
    logmag: f64,
    value: f64,
}

fn cmd_norms(args: &NormsArgs, out: Option<&Path>) -> Result<Outcome> {
    let alpha = match (&args.alpha, args.k) {
        (Some(a), _) => a.clone(),
        (None, Some(k)) => {
            let mut a = vec![0; args.space.dim()];
            a[0] = k;
            a
        }
        (None, None) => return Err(Error::invalid("give --alpha or --k")),
    };
    let w = args.space.monomial_norm_sq(&MultiIndex::new(alpha.clone())?)?;
    let text = json::to_string(&NormOutput {
        space: args.space.to_string(),
        alpha,
        sign: w.sign(),
        logmag: w.logmag(),
        value: w.to_f64(),
    })?;
    emit(out, &text)?;
    Ok(Outcome::ok())
}

#[derive(Serialize)]
struct DiskReport {
    space: String,
    trunc_degree: usize,
    order: usize,
    residual: f64,
    unmatched: f64,
}

fn cmd_toeplitz(cfg: &RunConfig, cmd: &ToeplitzCommand, out: Option<&Path>) -> Result<Outcome> {
    let (args, solve) = match cmd {
        ToeplitzCommand::Apply(a) => (a, false),
        ToeplitzCommand::Solve(a) => (a, true),
    };
    let n = args.trunc.unwrap_or(cfg.trunc_degree);
    let f = match (&args.series, args.decay) {
        (Some(p), _) => read_series(p)?,
        (None, Some(g)) => {
            let d = match args.space {
                SpaceSpec::Ball { d } => d,
                SpaceSpec::WeightedDisk { .. } => 1,
            };
            decay_target(d, g, n)
        }
        (None, None) => return Err(Error::invalid("give --series or --decay")),
    };
    let symbol = if is_json(&args.symbol) {
        Some(SymbolSeries::from_json_reader(File::open(&args.symbol)?)?)
    } else {
        None
    };
    let m1 = || match &symbol {
        Some(s) => symbol_in_z1(s),
        None => read_series(&args.symbol),
    };

    if !solve {
        let g = apply_toeplitz(&m1()?, &f.truncated(n), &args.space);
        emit(out, &g.to_csv_string())?;
        return Ok(Outcome::ok());
    }

    let (residual, g, report) = match (&symbol, args.space) {
        (Some(m), SpaceSpec::Ball { d }) if d >= 2 => {
            if m.d() != d as usize {
                return Err(Error::DimensionMismatch {
                    expected: d as usize,
                    got: m.d(),
                });
            }
            let sol = solve_toeplitz_ball(m, &f, n)?;
            for w in &sol.report.warnings {
                eprintln!("warning: {w}");
            }
            (sol.report.mismatch, sol.g_axis, json::to_string(&sol.report)?)
        }
        _ => {
            let sol = solve_toeplitz_disk(&m1()?, &f, &args.space, n)?;
            let report = DiskReport {
                space: args.space.to_string(),
                trunc_degree: n,
                order: sol.order,
                residual: sol.residual,
                unmatched: sol.unmatched,
            };
            (sol.residual, sol.g, json::to_string(&report)?)
        }
    };
    emit(out, &g.to_csv_string())?;
    emit_report(args.report.as_deref(), &report)?;
    let passed = match args.max_residual {
        Some(limit) => residual <= limit,
        None => true,
    };
    if !passed {
        eprintln!("residual {residual:e} exceeds --max-residual {:e}", args.max_residual.unwrap_or(0.0));
    }
    Ok(Outcome { passed })
}

#[derive(Serialize)]
struct DrewnowskiOutput {
    d: u32,
    c: f64,
    r: f64,
    value: f64,
    est_error: f64,
}

#[derive(Serialize)]
struct SupOutput {
    d: u32,
    c: f64,
    r: f64,
    n: u32,
    lambda_re: f64,
    lambda_im: f64,
    su_log: f64,
    limit_log: f64,
    within_limit: bool,
}

fn cmd_kernel(cfg: &RunConfig, cmd: &KernelCommand, out: Option<&Path>) -> Result<Outcome> {
    let text = match cmd {
        KernelCommand::Coeffs { kernel, trunc } => {
            let p = kernel_params(cfg, kernel)?;
            kernel_coeffs(&p, trunc.unwrap_or(cfg.trunc_degree)).to_csv_string()
        }
        KernelCommand::Drewnowski { kernel, tol } => {
            let p = kernel_params(cfg, kernel)?;
            let mut quad = cfg.certificate.quadrature;
            if let Some(t) = tol {
                quad.tolerance = *t;
            }
            let est = drewnowski_integral(&p, &quad)?;
            json::to_string(&DrewnowskiOutput {
                d: p.d,
                c: p.c,
                r: p.r,
                value: est.value,
                est_error: est.est_error,
            })?
        }
        KernelCommand::Nawrocki { d, c, i } => {
            let found = nawrocki_search(d.unwrap_or(cfg.d), *c, *i, &cfg.search)?;
            json::to_string(&found)?
        }
        KernelCommand::Supvn { kernel, n } => {
            let p = kernel_params(cfg, kernel)?;
            if *n == 0 {
                return Err(Error::invalid("--n must be at least 1"));
            }
            let (lambda, v) = sup_on_vn_point(&p, *n)?;
            json::to_string(&SupOutput {
                d: p.d,
                c: p.c,
                r: p.r,
                n: *n,
                lambda_re: lambda.re,
                lambda_im: lambda.im,
                su_log: v.logmag(),
                limit_log: su_limit(*n),
                within_limit: v.logmag() <= su_limit(*n),
            })?
        }
    };
    emit(out, &text)?;
    Ok(Outcome::ok())
}

fn cmd_build(cfg: &RunConfig, args: &BuildArgs, out: Option<&Path>) -> Result<Outcome> {
    let mut cc = cfg.certificate.clone();
    if let Some(d) = args.d {
        cc.d = d;
    }
    if let Some(l) = args.levels {
        cc.levels = l;
    }
    if let Some(g) = args.gamma_exp {
        cc.gamma_exp = g;
    }
    if let Some(t) = args.tol {
        cc.quadrature.tolerance = t;
    }
    cc.timestamp |= args.timestamp;
    let cert = build_certificate_with_progress(&cc, &mut |s| eprintln!("{s}"))?;
    emit(out, &cert.to_json()?)?;
    if args.no_verify {
        return Ok(Outcome::ok());
    }
    Ok(Outcome {
        passed: report_verification(&cert)?,
    })
}

fn report_verification(cert: &Certificate) -> Result<bool> {
    let report = verify_certificate(cert)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.failures {
        match f.level {
            Some(n) => eprintln!("FAIL {} (level {n}): {}", f.check, f.message),
            None => eprintln!("FAIL {}: {}", f.check, f.message),
        }
    }
    if report.passed {
        eprintln!("verification passed");
    }
    Ok(report.passed)
}

fn cmd_verify(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let cert = Certificate::read(path)?;
    let report = verify_certificate(&cert)?;
    emit(out, &json::to_string(&report)?)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.failures {
        match f.level {
            Some(n) => eprintln!("FAIL {} (level {n}): {}", f.check, f.message),
            None => eprintln!("FAIL {}: {}", f.check, f.message),
        }
    }
    Ok(Outcome {
        passed: report.passed,
    })
}

#[derive(Serialize)]
struct SzegoOutput {
    d: u32,
    method: &'static str,
    value: f64,
    /// Quadrature error estimate or Monte Carlo standard error.
    error: f64,
}

fn cmd_szego(cfg: &RunConfig, args: &SzegoArgs, out: Option<&Path>) -> Result<Outcome> {
    let mut quad = cfg.quadrature;
    if let Some(t) = args.tol {
        quad.tolerance = t;
    }
    let cert = args.certificate.as_deref().map(Certificate::read).transpose()?;
    let series = args.weight.as_deref().map(read_series).transpose()?;
    let d = match &cert {
        Some(c) => c.d,
        None => args.d.unwrap_or(cfg.d),
    };
    let log_weight = |l: Complex64| match (&cert, &series) {
        (Some(c), _) => crate::counterexample::g_log_modulus(c, l),
        (None, Some(f)) => f.eval(l).norm().ln(),
        (None, None) => unreachable!("clap requires a weight"),
    };
    if cert.is_none() && series.is_none() {
        return Err(Error::invalid("give --weight or --certificate"));
    }
    let (method, value, error) = match args.method {
        Method::Quadrature => {
            let est = integrate_slice(log_weight, d, &quad)?;
            ("quadrature", est.value, est.est_error)
        }
        Method::Montecarlo => {
            let est = montecarlo_sphere(
                |z| log_weight(z[0]),
                d,
                args.samples.unwrap_or(cfg.samples),
                args.seed.unwrap_or(cfg.seed),
            )?;
            ("montecarlo", est.value, est.std_error)
        }
    };
    emit(
        out,
        &json::to_string(&SzegoOutput {
            d,
            method,
            value,
            error,
        })?,
    )?;
    Ok(Outcome::ok())
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Norms(a) => cmd_norms(a, out),
        Command::Toeplitz(t) => cmd_toeplitz(&cfg, t, out),
        Command::Kernel(k) => cmd_kernel(&cfg, k, out),
        Command::Certificate(CertificateCommand::Build(b)) => cmd_build(&cfg, b, out),
        Command::Certificate(CertificateCommand::Verify { path }) => cmd_verify(path, out),
        Command::Szego(s) => cmd_szego(&cfg, s, out),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("BALLSPACE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid(format!("BALLSPACE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::invalid(e.to_string()))
}

/// Runs the command line and returns the process exit status: 0 when all
/// checks pass, 1 when a check fails, 2 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    match run(&cli) {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(e @ (Error::BudgetExceeded { .. } | Error::Verification(_))) => {
            eprintln!("error: {e}");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
