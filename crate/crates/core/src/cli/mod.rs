//! Command-line front end: profiles, figure data, critical angular momentum,
//! reflectivity and the self-check suite.
//!
//! Exit codes: 0 success, 1 check failure, 2 invalid parameters, 3 numeric
//! convergence failure.

pub mod check;
pub mod config;
pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::isospectral::{iso_impedance, iso_ratio, ratio_r};
use crate::model::{make_lens_spec, sample_grid, LensSpec, ProfileTable, RadialGrid, Spacing};
use crate::radial::{impedance_z, partner_potential_plus, potential_v, reflectivity, zero_mode_f};
use crate::spectral::{critical_l, orbital_capacity};
use crate::Error;

use format::{format_sig, table_to_string, DEFAULT_PRECISION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "nodeless",
    version,
    about = "Demkov-Ostrovsky zero modes, isospectral impedances and partner potentials"
)]
pub struct Cli {
    /// Significant digits in numeric CSV fields.
    #[arg(long, global = true)]
    precision: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// key=value file with defaults for --precision and --out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate quantities along a radial grid.
    #[command(allow_negative_numbers = true)]
    Profile(ProfileArgs),
    /// Write the impedance-ratio curves fig1..fig3.
    #[command(allow_negative_numbers = true)]
    Figures(FiguresArgs),
    /// Locate the angular momentum at which a pocket appears in U+.
    #[command(name = "critical-l", allow_negative_numbers = true)]
    CriticalL(CriticalArgs),
    /// Reflectivity of a sech^2 well.
    #[command(allow_negative_numbers = true)]
    Reflect(ReflectArgs),
    /// Run the invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Potential,
    ZeroMode,
    Impedance,
    IsoImpedance,
    Ratio,
    UPlus,
    Capacity,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Potential => "potential",
            Quantity::ZeroMode => "zero-mode",
            Quantity::Impedance => "impedance",
            Quantity::IsoImpedance => "iso-impedance",
            Quantity::Ratio => "ratio",
            Quantity::UPlus => "u-plus",
            Quantity::Capacity => "capacity",
        }
    }

    fn singular_at_origin(self) -> bool {
        !matches!(self, Quantity::ZeroMode | Quantity::Ratio)
    }

    fn eval(self, spec: &LensSpec, rho: f64) -> crate::Result<f64> {
        match self {
            Quantity::Potential => potential_v(spec, rho),
            Quantity::ZeroMode => {
                if rho < 0.0 {
                    Err(Error::InvalidParameter(format!(
                        "rho must be >= 0, got {rho}"
                    )))
                } else {
                    Ok(zero_mode_f(spec, rho))
                }
            }
            Quantity::Impedance => impedance_z(spec, rho),
            Quantity::IsoImpedance => iso_impedance(spec, rho),
            Quantity::Ratio => iso_ratio(spec, rho),
            Quantity::UPlus => partner_potential_plus(spec, rho),
            Quantity::Capacity => orbital_capacity(spec.kappa(), spec.l_real(), rho),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Explicit radii, comma separated; replaces the grid flags.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 6.0)]
    end: f64,
    #[arg(long, default_value_t = 601)]
    count: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
    spacing: SpacingArg,
}

impl GridArgs {
    fn samples(&self) -> crate::Result<Vec<f64>> {
        if !self.rho.is_empty() {
            if self.rho.iter().any(|r| !r.is_finite()) {
                return Err(Error::InvalidParameter("rho values must be finite".into()));
            }
            return Ok(self.rho.clone());
        }
        let grid = RadialGrid {
            start: self.start,
            end: self.end,
            count: self.count,
            spacing: match self.spacing {
                SpacingArg::Linear => Spacing::Linear,
                SpacingArg::Log => Spacing::Logarithmic,
            },
        };
        sample_grid(&grid)
    }
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long)]
    l: u32,
    #[arg(long)]
    lambda: Option<f64>,
    /// Quantities to tabulate, comma separated or repeated.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    quantity: Vec<Quantity>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    /// Figure numbers; figure N plots angular momentum l = N.
    #[arg(long = "figure", value_delimiter = ',', default_values_t = [1u32, 2, 3],
          value_parser = clap::value_parser!(u32).range(1..=3))]
    figures: Vec<u32>,
    #[arg(long = "lambda", value_delimiter = ',', default_values_t = [0.01, 0.1, 1.0, 10.0])]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 6.0)]
    end: f64,
    #[arg(long, default_value_t = 601)]
    count: usize,
    /// Also write fig<N>.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = crate::spectral::DEFAULT_L_SEARCH.0)]
    l_min: f64,
    #[arg(long, default_value_t = crate::spectral::DEFAULT_L_SEARCH.1)]
    l_max: f64,
    #[arg(long, default_value_t = crate::spectral::DEFAULT_RHO_GUESS)]
    rho_guess: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("well").required(true).args(["l", "strength"])))]
struct ReflectArgs {
    /// Use the well produced by the fisheye at this angular momentum.
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    strength: Option<f64>,
    /// Wavenumbers, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<f64>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Scale the coupling by (1 + offset) in the zero-energy residual.
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_coupling: f64,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Usage(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Convergence(_) | Error::Divergence(_)) => EXIT_CONVERGENCE,
            Failure::Lib(_) | Failure::Io(_) | Failure::Usage(_) => EXIT_INVALID,
            Failure::Checks => EXIT_CHECK_FAILED,
        }
    }
}

struct Output<'a> {
    dir: PathBuf,
    precision: usize,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Output<'_> {
    fn write_file(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", self.dir.display()));
        fs::create_dir_all(&self.dir).map_err(io)?;
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(io)?;
        Ok(path)
    }

    fn say(&mut self, text: &str) -> Result<(), Failure> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string()))
    }

    fn notice(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

fn resolve(cli: &Cli) -> Result<(PathBuf, usize), Failure> {
    let cfg = match &cli.config {
        Some(path) => config::load(path).map_err(Failure::Usage)?,
        None => config::Config::default(),
    };
    let precision = cli.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
    config::check_precision(precision).map_err(Failure::Usage)?;
    let dir = cli
        .out
        .clone()
        .or(cfg.out)
        .unwrap_or_else(|| Path::new("out").to_path_buf());
    Ok((dir, precision))
}

fn cmd_profile(args: &ProfileArgs, out: &mut Output) -> Result<(), Failure> {
    let spec = make_lens_spec(args.kappa, args.l, args.lambda)?;
    let mut rhos = args.grid.samples()?;
    if args.quantity.iter().any(|q| q.singular_at_origin()) {
        let before = rhos.len();
        rhos.retain(|&r| r != 0.0);
        if rhos.len() < before {
            out.notice("note: rho = 0 dropped, a selected quantity is singular there");
        }
    }
    if rhos.is_empty() {
        return Err(Failure::Usage("no radii left to evaluate".into()));
    }
    let mut table = ProfileTable::new("rho", rhos.clone());
    for &q in &args.quantity {
        let values = rhos
            .par_iter()
            .map(|&r| q.eval(&spec, r))
            .collect::<crate::Result<Vec<f64>>>()?;
        table.push_column(q.name(), values)?;
    }
    let csv = table_to_string(&table, out.precision);
    out.write_file("profile.csv", &csv)?;
    out.say(&csv)
}

fn figure_table(l: u32, lambdas: &[f64], rhos: &[f64]) -> crate::Result<ProfileTable> {
    let rows = rhos
        .par_iter()
        .map(|&r| lambdas.iter().map(|&lam| ratio_r(l, lam, r)).collect())
        .collect::<crate::Result<Vec<Vec<f64>>>>()?;
    let mut table = ProfileTable::new("rho", rhos.to_vec());
    for (j, lam) in lambdas.iter().enumerate() {
        table.push_column(
            format!("lam_{lam}"),
            rows.iter().map(|row| row[j]).collect(),
        )?;
    }
    Ok(table)
}

fn cmd_figures(args: &FiguresArgs, out: &mut Output) -> Result<(), Failure> {
    let rhos = sample_grid(&RadialGrid::linear(args.start, args.end, args.count))?;
    for &n in &args.figures {
        let table = figure_table(n, &args.lambdas, &rhos)?;
        let path = out.write_file(
            &format!("fig{n}.csv"),
            &table_to_string(&table, out.precision),
        )?;
        out.say(&format!("{}\n", path.display()))?;
        if args.svg {
            let title = format!("R_{n}(rho) = I(rho) + lambda");
            let picture = svg::render(&table, &title, &format!("R_{n}"));
            let path = out.write_file(&format!("fig{n}.svg"), &picture)?;
            out.say(&format!("{}\n", path.display()))?;
        }
    }
    Ok(())
}

fn cmd_critical(args: &CriticalArgs, out: &mut Output) -> Result<(), Failure> {
    let cp = critical_l(args.kappa, (args.l_min, args.l_max), args.rho_guess)?;
    let g = |x: f64| format_sig(x, 6);
    out.say(&format!(
        "l_star={} rho_star={} residual_slope={} residual_curvature={} u_plus={}\n",
        g(cp.l_star),
        g(cp.rho_star),
        g(cp.residuals.0),
        g(cp.residuals.1),
        g(cp.u_plus)
    ))
}

fn cmd_reflect(args: &ReflectArgs, out: &mut Output) -> Result<(), Failure> {
    let strength = match (args.l, args.strength) {
        (Some(l), None) => {
            let l = f64::from(l);
            (l + 0.5) * (l + 1.5)
        }
        (None, Some(s)) => s,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --l and --strength".into(),
            ))
        }
    };
    let results = args
        .k
        .par_iter()
        .map(|&k| reflectivity(strength, k))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut table = ProfileTable::new("k", args.k.clone());
    table.push_column("r2", results.iter().map(|r| r.r2).collect())?;
    table.push_column("t2", results.iter().map(|r| r.t2).collect())?;
    table.push_column(
        "unitarity_residual",
        results.iter().map(|r| r.unitarity_residual).collect(),
    )?;
    let csv = table_to_string(&table, out.precision);
    out.write_file("reflect.csv", &csv)?;
    out.say(&csv)
}

fn cmd_check(args: &CheckArgs, out: &mut Output) -> Result<(), Failure> {
    let faults = check::Faults {
        coupling_offset: args.perturb_coupling,
    };
    let results = check::run_suite(faults);
    let width = results.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut report = String::new();
    for c in &results {
        let status = if c.passed { "PASS" } else { "FAIL" };
        report.push_str(&format!(
            "{status} {:width$}  worst {:<10} limit {}",
            c.name,
            format_sig(c.worst, 3),
            format_sig(c.limit, 3)
        ));
        if let Some(note) = &c.note {
            report.push_str(&format!("  ({note})"));
        }
        report.push('\n');
    }
    let passed = results.iter().filter(|c| c.passed).count();
    report.push_str(&format!("{passed}/{} checks passed\n", results.len()));
    out.say(&report)?;
    if passed == results.len() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                return EXIT_INVALID;
            }
            let _ = write!(stdout, "{rendered}");
            return EXIT_OK;
        }
    };
    let result = resolve(&cli).and_then(|(dir, precision)| {
        let mut out = Output {
            dir,
            precision,
            stdout,
            stderr,
        };
        match &cli.command {
            Command::Profile(a) => cmd_profile(a, &mut out),
            Command::Figures(a) => cmd_figures(a, &mut out),
            Command::CriticalL(a) => cmd_critical(a, &mut out),
            Command::Reflect(a) => cmd_reflect(a, &mut out),
            Command::Check(a) => cmd_check(a, &mut out),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            match &failure {
                Failure::Lib(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                }
                Failure::Io(m) | Failure::Usage(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                Failure::Checks => {
                    let _ = writeln!(stderr, "error: invariant checks failed");
                }
            }
            failure.code()
        }
    }
}
