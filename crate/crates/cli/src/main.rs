//! `qbody`: batch computations over fixed-dimension correlation bodies.
//!
//! Subcommands: `xo`, `witness`, `seesaw`, `certify`, `realize`, `cone`.
//! JSON goes to stdout (or `--out`); `cone` writes a CSV of scan rows to
//! `--out` and prints a JSON summary. Exit codes: 0 success, 2 usage error,
//! 3 numerical-integrity error, 4 I/O error.

mod output;

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use qbody_core::cone::{ConeSection, ScanPoint, SurfaceClass};
use qbody_core::model::{
    to_matrix, witness_point_closed_form, witness_point_from_mixture, Behavior, CorrelationMatrix,
};
use qbody_core::realize::{behavior_of, realize_from_vectors, QuantumRealization};
use qbody_core::sdp::analytic_certificate;
use qbody_core::seesaw::{bell_matrix, best_over_trials};
use qbody_core::witness::{dimension_witness, WitnessVerdict};
use qbody_core::{Error as CoreError, ToleranceConfig};

const SEESAW_MAX_ITER: usize = 10_000;
const REALIZE_MAX_SETTINGS: usize = 16;

#[derive(Parser)]
#[command(name = "qbody", version, about = "Correlation bodies of two-outcome scenarios: witness points, rank witnesses, Bell maxima, certificates, realizations and cone scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance preset.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,

    /// Override the relative singular-value threshold for rank decisions.
    #[arg(long, global = true)]
    rank_eps: Option<f64>,

    /// Override the absolute eigenvalue floor for PSD checks.
    #[arg(long, global = true)]
    psd_eps: Option<f64>,

    /// Override the see-saw convergence threshold.
    #[arg(long, global = true)]
    conv_eps: Option<f64>,

    /// Worker threads for scans and repeated trials (results are identical
    /// for any value).
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,

    /// Write the primary output to this path instead of stdout. Required by
    /// `cone`, which stores its CSV rows there.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; `csv` applies to `cone` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    Default,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Witness point: enumerated mixture vs closed form.
    Xo {
        /// Number of settings per party (even).
        #[arg(long)]
        m: usize,
    },
    /// Rank-based dimension witness for the witness point.
    Witness {
        /// Number of settings per party (even).
        #[arg(long)]
        m: usize,
        /// Local Hilbert-space dimension to test.
        #[arg(long)]
        d: usize,
    },
    /// Maximize the Bell polynomial by alternating updates.
    Seesaw {
        /// Number of settings per party.
        #[arg(long)]
        m: usize,
        /// Independently seeded restarts.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Base seed; trial t uses seed + t.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Analytic primal/dual certificate of the quantum maximum.
    Certify {
        /// Number of settings per party.
        #[arg(long)]
        m: usize,
    },
    /// Build the generator realization of the witness point and verify it.
    Realize {
        /// Number of settings per party (even, at most 16).
        #[arg(long)]
        m: usize,
    },
    /// Scan the 3x2 slice over the fixed CHSH block; CSV rows to --out.
    Cone {
        /// Grid density for the scans.
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numerical(msg) | CliError::Io(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotPsd { .. } | CoreError::NumericalIntegrity(_) | CoreError::InfeasiblePoint(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(format!("serialization failed: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tolerances = tolerances(&cli)?;
    if cli.format == Format::Csv && !matches!(cli.command, Command::Cone { .. }) {
        return Err(CliError::Usage("csv format is only available for the cone command".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.parallel.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("failed to build thread pool: {e}")))?;
    pool.install(|| dispatch(&cli, &tolerances))
}

fn tolerances(cli: &Cli) -> Result<ToleranceConfig, CliError> {
    let mut t = match cli.tolerance_profile {
        Profile::Default => ToleranceConfig::default(),
        Profile::Strict => ToleranceConfig::strict(),
    };
    if let Some(rank_eps) = cli.rank_eps {
        t.rank_eps = rank_eps;
    }
    if let Some(psd_eps) = cli.psd_eps {
        t.psd_eps = psd_eps;
    }
    if let Some(conv_eps) = cli.conv_eps {
        t.conv_eps = conv_eps;
    }
    t.validate()?;
    Ok(t)
}

fn dispatch(cli: &Cli, tolerances: &ToleranceConfig) -> Result<(), CliError> {
    match cli.command {
        Command::Xo { m } => {
            require_even(m)?;
            emit(cli, &cmd_xo(m)?)
        }
        Command::Witness { m, d } => {
            require_even(m)?;
            if d == 0 {
                return Err(CliError::Usage("d must be at least 1".into()));
            }
            emit(cli, &cmd_witness(m, d, tolerances)?)
        }
        Command::Seesaw { m, trials, seed } => {
            if m == 0 {
                return Err(CliError::Usage("m must be at least 1".into()));
            }
            if trials == 0 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let bell = bell_matrix(m)?;
            let best = best_over_trials(&bell, trials, seed, tolerances.conv_eps, SEESAW_MAX_ITER)?;
            emit(cli, &best)
        }
        Command::Certify { m } => {
            if m == 0 {
                return Err(CliError::Usage("m must be at least 1".into()));
            }
            emit(cli, &analytic_certificate(m)?)
        }
        Command::Realize { m } => {
            require_even(m)?;
            if m > REALIZE_MAX_SETTINGS {
                return Err(CliError::Usage(format!(
                    "realize supports m <= {REALIZE_MAX_SETTINGS}; the joint space grows as 4^(m/2)"
                )));
            }
            emit(cli, &cmd_realize(m, tolerances)?)
        }
        Command::Cone { grid } => cmd_cone(cli, grid),
    }
}

fn require_even(m: usize) -> Result<(), CliError> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(CliError::Usage("m must be even and at least 2".into()));
    }
    Ok(())
}

fn emit<T: Serialize>(cli: &Cli, value: &T) -> Result<(), CliError> {
    let text = output::to_json(value)?;
    match &cli.out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct XoReport {
    m: usize,
    max_abs_difference: f64,
    mixture: Behavior,
    mixture_matrix: CorrelationMatrix,
    closed_form_matrix: CorrelationMatrix,
}

fn cmd_xo(m: usize) -> Result<XoReport, CliError> {
    let mixture = witness_point_from_mixture(m)?;
    let mixture_matrix = to_matrix(&mixture);
    let closed_form_matrix = witness_point_closed_form(m)?;
    Ok(XoReport {
        m,
        max_abs_difference: mixture_matrix.max_abs_difference(&closed_form_matrix),
        mixture,
        mixture_matrix,
        closed_form_matrix,
    })
}

fn cmd_witness(m: usize, d: usize, tolerances: &ToleranceConfig) -> Result<WitnessVerdict, CliError> {
    let behavior = witness_point_closed_form(m)?.to_behavior()?;
    Ok(dimension_witness(&behavior, d, tolerances.rank_eps)?)
}

#[derive(Serialize)]
struct RealizeReport {
    m: usize,
    local_dimension: usize,
    max_deviation: f64,
    witness: WitnessVerdict,
    behavior: Behavior,
    realization: QuantumRealization,
}

fn cmd_realize(m: usize, tolerances: &ToleranceConfig) -> Result<RealizeReport, CliError> {
    // Orthonormal Bob vectors and the parallel Alice updates that pin the
    // witness point: a_i = (2/m) sum_j b_j - b_i.
    let b_vectors: Vec<DVector<f64>> =
        (0..m).map(|k| DVector::from_fn(m, |i, _| if i == k { 1.0 } else { 0.0 })).collect();
    let s: DVector<f64> = b_vectors.iter().sum();
    let a_vectors: Vec<DVector<f64>> =
        (0..m).map(|i| &s * (2.0 / m as f64) - &b_vectors[i]).collect();

    let realization = realize_from_vectors(&a_vectors, &b_vectors)?;
    let behavior = behavior_of(&realization)?;
    let max_deviation =
        to_matrix(&behavior).max_abs_difference(&witness_point_closed_form(m)?);
    let witness = dimension_witness(&behavior, realization.dim_a, tolerances.rank_eps)?;
    Ok(RealizeReport {
        m,
        local_dimension: realization.dim_a,
        max_deviation,
        witness,
        behavior,
        realization,
    })
}

#[derive(Serialize, Default)]
struct ClassCounts {
    total: usize,
    apex: usize,
    equator: usize,
    lateral_surface: usize,
    interior: usize,
    exterior: usize,
}

impl ClassCounts {
    fn tally(points: &[ScanPoint]) -> Self {
        let mut counts = Self { total: points.len(), ..Self::default() };
        for sp in points {
            match sp.class {
                SurfaceClass::Apex => counts.apex += 1,
                SurfaceClass::Equator => counts.equator += 1,
                SurfaceClass::LateralSurface => counts.lateral_surface += 1,
                SurfaceClass::Interior => counts.interior += 1,
                SurfaceClass::Exterior => counts.exterior += 1,
            }
        }
        counts
    }
}

#[derive(Serialize)]
struct ConeSummary {
    grid_density: usize,
    csv_path: String,
    projective: ClassCounts,
    povm: ClassCounts,
}

fn cmd_cone(cli: &Cli, grid: usize) -> Result<(), CliError> {
    let path = cli
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("cone requires --out for its CSV rows".into()))?;
    let section = ConeSection::new();
    let projective = section.projective_scan(grid)?;
    let povm = section.povm_scan(grid)?;

    let file = fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    output::write_scan_csv(file, &projective, &povm)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;

    let summary = ConeSummary {
        grid_density: grid,
        csv_path: path.display().to_string(),
        projective: ClassCounts::tally(&projective),
        povm: ClassCounts::tally(&povm),
    };
    println!("{}", output::to_json(&summary)?);
    Ok(())
}
