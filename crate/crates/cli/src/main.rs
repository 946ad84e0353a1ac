//! `wavebound`: command-line front end.
//!
//! Each subcommand reads a JSON parameter object from `--config` (flags, where
//! offered, override its keys), computes, and writes CSV/JSON artifacts into
//! `--out`. Without `--out` the main table goes to stdout.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 I/O failure
//! while writing results.

mod commands;
mod output;
mod params;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use params::Cx;

#[derive(Debug, Parser)]
#[command(name = "wavebound", version, about = "Polarizability bounds, Y-problems and acoustic sphere scattering checks")]
struct Cli {
    /// JSON parameter file for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output artifacts (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized property sweeps.
    #[arg(long, global = true, default_value_t = 20240611)]
    seed: u64,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "WAVEBOUND_THREADS")]
    threads: Option<usize>,
    /// Emit dimensional quantities instead of the normalized groups.
    #[arg(long, global = true)]
    raw: bool,
    #[command(subcommand)]
    command: Command,
}

/// Susceptibility flags shared by the bound subcommands.
#[derive(Debug, Clone, Args)]
struct ContrastFlags {
    /// Inclusion susceptibility, `RE` or `RE,IM`.
    #[arg(long, allow_hyphen_values = true)]
    chi1: Option<Cx>,
    /// Inclusion permittivity (matrix is 1), `RE` or `RE,IM`.
    #[arg(long, allow_hyphen_values = true)]
    eps1: Option<Cx>,
    /// Spatial dimension, 2 or 3.
    #[arg(long)]
    dim: Option<usize>,
    /// Samples per arc in the CSV.
    #[arg(long)]
    samples: Option<usize>,
    /// Value to test for membership, `RE,IM`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<Cx>,
}

impl ContrastFlags {
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        put(&mut m, "chi1", &self.chi1);
        put(&mut m, "eps1", &self.eps1);
        put(&mut m, "dim", &self.dim);
        put(&mut m, "samples", &self.samples);
        put(&mut m, "point", &self.point);
        m
    }
}

#[derive(Debug, Clone, Args)]
struct ChiFlags {
    /// Inclusion susceptibility, `RE` or `RE,IM`.
    #[arg(long, allow_hyphen_values = true)]
    chi1: Option<Cx>,
    /// Inclusion permittivity (matrix is 1), `RE` or `RE,IM`.
    #[arg(long, allow_hyphen_values = true)]
    eps1: Option<Cx>,
}

impl ChiFlags {
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        put(&mut m, "chi1", &self.chi1);
        put(&mut m, "eps1", &self.eps1);
        m
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lens of attainable Tr(alpha)/(d|Omega|) for a lossy inclusion: the two
    /// circular arcs from the dilute limit of the Bergman-Milton bounds, with the
    /// ball and thin-shell values as corners.
    BoundsRegion(ContrastFlags),
    /// Hashin-Shtrikman interval for real susceptibility:
    /// [chi - chi^2/(d(1+chi)), chi - chi^2/(chi+d)].
    HsInterval(ContrastFlags),
    /// Two-dimensional region from Milton's curves (disk to thin shell and the
    /// chord back), intersected with the Bergman-Milton lens.
    Milton2d(ContrastFlags),
    /// Closed-form polarizability of a ball, ellipsoid or coated ball from the
    /// depolarization-factor formula alpha_i/|Omega| = chi/(1 + L_i chi).
    ShapeAlpha(ChiFlags),
    /// Periodic-cell polarizability of a pixel inclusion: dipole moment
    /// (eps* - 1)/p of the cell problem, extrapolated to the dilute limit.
    GridAlpha(ChiFlags),
    /// Y-tensor of a finite-dimensional instance, checked against the power
    /// identity <e1, Y* e1> = <e2, L e2>.
    YSolve,
    /// Driving-point admittance of an impedance network as a Y-tensor, with
    /// Kirchhoff's laws as the orthogonality conditions.
    NetworkY,
    /// Partial-wave solution for a fluid sphere: scattering coefficients and the
    /// far-field amplitude normalized as 4 pi P(theta)/(p k0^2 |Omega|).
    MieSolve,
    /// Energy balance absorbed + scattered = extinction, with extinction also from
    /// the forward amplitude (optical theorem) and from the interior volume form.
    OpticalCheck,
    /// Backscatter amplitude against the loss-weighted contrast bound and its
    /// time-offset form, as bound-versus-actual tables.
    BackscatterBound,
    /// Polygon of possible complex backscatter amplitudes from the half-plane
    /// bounds Im(exp(2 i omega t0) p z) <= rhs(t0).
    WrapRegion,
    /// Runs the acceptance criteria and writes a pass/fail report.
    VerifyAll {
        /// Comma-separated criterion ids (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn put<T: serde::Serialize>(m: &mut Map<String, Value>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        m.insert(key.into(), serde_json::to_value(v).expect("flag value serialises"));
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<wavebound::Error> for CliError {
    fn from(e: wavebound::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Parameters from the config file with flag overrides applied on top.
fn load<T: DeserializeOwned>(config: Option<&Path>, overrides: Map<String, Value>) -> Result<T, CliError> {
    let mut obj = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("reading {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(CliError::Validation("config must be a JSON object".into())),
                Err(e) => return Err(CliError::Validation(format!("malformed JSON in {}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    obj.extend(overrides);
    serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Validation(format!("invalid parameters: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.config.as_deref();
    let base = cfg.and_then(Path::parent).unwrap_or(Path::new("."));
    let mut art = output::Artifacts::default();
    let mut failed_checks = None;
    match &cli.command {
        Command::BoundsRegion(f) => commands::bounds_region(&load(cfg, f.overrides())?, &mut art)?,
        Command::HsInterval(f) => commands::hs_interval_cmd(&load(cfg, f.overrides())?, &mut art)?,
        Command::Milton2d(f) => commands::milton2d(&load(cfg, f.overrides())?, &mut art)?,
        Command::ShapeAlpha(f) => commands::shape_alpha(&load(cfg, f.overrides())?, &mut art)?,
        Command::GridAlpha(f) => commands::grid_alpha(&load(cfg, f.overrides())?, base, cli.raw, &mut art)?,
        Command::YSolve => commands::y_solve(&load(cfg, Map::new())?, &mut art)?,
        Command::NetworkY => commands::network_y(&load(cfg, Map::new())?, &mut art)?,
        Command::MieSolve => commands::mie_solve(&load(cfg, Map::new())?, cli.raw, &mut art)?,
        Command::OpticalCheck => commands::optical_check(&load(cfg, Map::new())?, cli.raw, &mut art)?,
        Command::BackscatterBound => commands::backscatter(&load(cfg, Map::new())?, cli.raw, &mut art)?,
        Command::WrapRegion => commands::wrap_region(&load(cfg, Map::new())?, cli.raw, &mut art)?,
        Command::VerifyAll { only } => failed_checks = Some(commands::verify_all(only, cli.seed, &mut art)?),
    }
    art.commit(cli.out.as_deref())?;
    match failed_checks {
        Some(n) if n > 0 => Err(CliError::Numerical(format!("{n} acceptance criteria failed"))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
