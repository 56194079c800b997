use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgls::cli::{self, CliError, StageSelection, TemperatureOptions};
use qgls::network::Units;

#[derive(Parser)]
#[command(
    name = "qgls",
    version,
    about = "Gaussian light through lossy and amplifying devices"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every element's constraint residual, optionally a PT index profile.
    Validate {
        file: PathBuf,
        #[arg(long)]
        pt_profile: Option<PathBuf>,
    },
    /// Run the pipeline and report the final state.
    Simulate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Report temperatures in kelvin; requires --omega-hz.
        #[arg(long, requires = "omega_hz")]
        si: bool,
        #[arg(long)]
        omega_hz: Option<f64>,
        /// Also report the log-as-factor temperature expression.
        #[arg(long)]
        literal_paper_formula: bool,
    },
    /// Sample the Wigner function of one mode on a grid.
    Wigner {
        file: PathBuf,
        /// Stage index (0 = input) or `all`.
        #[arg(long, default_value = "all")]
        stage: StageSelection,
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[arg(long, default_value = "-6:6:121", allow_hyphen_values = true)]
        xrange: String,
        #[arg(long, default_value = "-6:6:121", allow_hyphen_values = true)]
        prange: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// With several CSV stages, `_stage<k>` is inserted before the extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare against a truncated Fock-space simulation.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Comparison tolerance, also used as the truncation leak bound.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("QGLS_TOL") {
        Err(_) => Ok(qgls::numerics::DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(CliError::Semantic(format!(
                "QGLS_TOL must be a positive number, got `{s}`"
            ))),
        },
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn stage_path(base: &Path, stage: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_stage{stage}.{}", ext.to_string_lossy()),
        None => format!("{stem}_stage{stage}"),
    };
    base.with_file_name(name)
}

fn run(args: Args) -> Result<(), CliError> {
    let tol = tolerance()?;
    match args.command {
        Command::Validate { file, pt_profile } => {
            let text = cli::read_text(&file)?;
            let profile = pt_profile.as_deref().map(cli::read_text).transpose()?;
            let outcome = cli::cmd_validate(&text, profile.as_deref(), tol)?;
            print!("{}", outcome.render());
            if !outcome.passed() {
                return Err(CliError::Semantic("validation failed".into()));
            }
        }
        Command::Simulate {
            file,
            output,
            si,
            omega_hz,
            literal_paper_formula,
        } => {
            let text = cli::read_text(&file)?;
            let opts = TemperatureOptions {
                units: if si { Units::Si } else { Units::Natural },
                omega: omega_hz.map(|f| 2.0 * std::f64::consts::PI * f),
                literal_formula: literal_paper_formula,
            };
            let report = cli::cmd_simulate(&text, opts, tol)?;
            emit(output.as_deref(), &json(&report))?;
        }
        Command::Wigner {
            file,
            stage,
            mode,
            xrange,
            prange,
            format,
            output,
        } => {
            let x = cli::parse_axis(&xrange)?;
            let p = cli::parse_axis(&prange)?;
            let text = cli::read_text(&file)?;
            let grids = cli::cmd_wigner(&text, stage, mode, x, p, tol)?;
            match format {
                Format::Json => emit(output.as_deref(), &json(&grids))?,
                Format::Csv if grids.len() == 1 => emit(output.as_deref(), &grids[0].grid.to_csv())?,
                Format::Csv => match output {
                    Some(base) => {
                        for g in &grids {
                            emit(Some(&stage_path(&base, g.stage)), &g.grid.to_csv())?;
                        }
                    }
                    None => {
                        for g in &grids {
                            print!("# stage {}\n{}", g.stage, g.grid.to_csv());
                        }
                    }
                },
            }
        }
        Command::Oracle {
            file,
            dim,
            tol: compare_tol,
            output,
        } => {
            let text = cli::read_text(&file)?;
            let report = cli::cmd_oracle(&text, dim, compare_tol, tol)?;
            emit(output.as_deref(), &json(&report))?;
            if !report.passed {
                return Err(CliError::Mismatch(format!(
                    "differences exceed {compare_tol:e} (see report)"
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
