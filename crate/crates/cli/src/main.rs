use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udisc_core::io::{load_ensemble, LoadError};
use udisc_core::report::{monte_carlo, run_report};
use udisc_core::scan::{region_scan, RegionScanConfig};
use udisc_core::scenarios::{ab_priors, Scenario};
use udisc_core::solver::SolveOptions;
use udisc_core::tensor::TensorSpace;
use udisc_core::{tol, Ensemble, Error};

#[derive(Parser)]
#[command(name = "udisc", version, about = "Optimal unambiguous discrimination and LOCC/NLWE analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one ensemble and print the full report.
    Run {
        /// Built-in scenario name or path to a JSON ensemble file.
        source: String,
        #[command(flatten)]
        priors: PriorArgs,
        /// Also write the report as JSON.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Cap on the total number of Newton steps.
        #[arg(long, default_value_t = tol::MAX_NEWTON_STEPS)]
        max_steps: usize,
    },
    /// Scan the (a, b) prior family of example1 for local achievability.
    Scan {
        #[arg(long)]
        a_steps: usize,
        #[arg(long)]
        b_steps: usize,
        #[arg(long, value_name = "PATH")]
        csv: PathBuf,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Monte Carlo run of the local protocol that detects one state.
    Mc {
        source: String,
        /// 1-based index of the state to detect.
        #[arg(long)]
        target: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        priors: PriorArgs,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct PriorArgs {
    /// Comma-separated priors, one per state.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    priors: Option<Vec<f64>>,
    /// The two-parameter family over six states.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    priors_ab: Option<Vec<f64>>,
    /// Equal priors (the default for built-in scenarios).
    #[arg(long)]
    uniform: bool,
}

#[derive(Debug)]
enum CliError {
    UnknownScenario(String),
    Load(LoadError),
    Core(Error),
    Invalid(String),
    Write(PathBuf, std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NoConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::UnknownScenario(s) => write!(
                f,
                "unknown scenario '{s}' (expected example1, example2, four-state, orthonormal-demo or an existing file)"
            ),
            CliError::Load(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Invalid(s) => f.write_str(s),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Load(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// KKT threshold from `UDISC_TOL`, falling back to the library default.
fn kkt_tolerance() -> CliResult<f64> {
    match std::env::var("UDISC_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Invalid(format!("UDISC_TOL must be a positive number, got '{s}'"))),
        },
        Err(_) => Ok(tol::KKT_TOL),
    }
}

fn load_source(source: &str, priors: &PriorArgs) -> CliResult<(Ensemble, Option<TensorSpace>)> {
    let (base, space, file_priors) = if let Ok(sc) = source.parse::<Scenario>() {
        (sc.uniform(), sc.space(), false)
    } else if Path::new(source).is_file() {
        let loaded = load_ensemble(source)?;
        (loaded.ensemble, loaded.space, true)
    } else {
        return Err(CliError::UnknownScenario(source.to_string()));
    };
    let n = base.len();
    let chosen = if let Some(p) = &priors.priors {
        if p.len() != n {
            return Err(CliError::Core(Error::InvalidPriors(format!(
                "{} priors given for {n} states",
                p.len()
            ))));
        }
        Some(p.clone())
    } else if let Some(ab) = &priors.priors_ab {
        if n != 6 {
            return Err(CliError::Invalid(format!(
                "--priors-ab needs a six-state ensemble, '{source}' has {n}"
            )));
        }
        Some(ab_priors(ab[0], ab[1])?)
    } else if priors.uniform || !file_priors {
        Some(vec![1.0 / n as f64; n])
    } else {
        None
    };
    let ensemble = match chosen {
        Some(p) => base.with_priors(p)?,
        None => base,
    };
    Ok((ensemble, space))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Write(path.to_path_buf(), e))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_file(path, &text)
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run {
            source,
            priors,
            json,
            max_steps,
        } => {
            let options = SolveOptions {
                kkt_tol: kkt_tolerance()?,
                max_steps,
                ..SolveOptions::default()
            };
            let (ensemble, space) = load_source(&source, &priors)?;
            let report = run_report(&source, &ensemble, space.as_ref(), &options)?;
            print!("{report}");
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
        }
        Command::Scan {
            a_steps,
            b_steps,
            csv,
            svg,
        } => {
            let scan = region_scan(RegionScanConfig::new(a_steps, b_steps)?)?;
            write_file(&csv, &scan.to_csv())?;
            if let Some(path) = svg {
                write_file(&path, &scan.to_svg())?;
            }
            let locc = scan
                .cells
                .iter()
                .filter(|c| c.verdict == udisc_core::scan::CellVerdict::Locc)
                .count();
            println!("cells: {}", scan.cells.len());
            println!("LOCC: {locc}");
            println!("NLWE: {}", scan.cells.len() - locc);
            println!("mismatches with analytic rule: {}", scan.mismatches().len());
        }
        Command::Mc {
            source,
            target,
            trials,
            seed,
            priors,
            json,
        } => {
            let (ensemble, space) = load_source(&source, &priors)?;
            let Some(space) = space else {
                return Err(CliError::Invalid(format!("'{source}' has no tensor structure")));
            };
            if target == 0 || target > ensemble.len() {
                return Err(CliError::Invalid(format!(
                    "--target must be between 1 and {}, got {target}",
                    ensemble.len()
                )));
            }
            let report = monte_carlo(&ensemble, &space, target - 1, trials, seed)?;
            print!("{report}");
            if let Some(path) = json {
                write_json(&path, &report)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
