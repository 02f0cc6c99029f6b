//! `halfline`: characteristic determinants of the half-line difference
//! equation from the command line.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 no root where
//! one must exist, 5 unsupported Euler case. Failures print one JSON object
//! on stderr.

mod commands;
mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halfline::Error;
use num_complex::Complex64;
use serde::Serialize;

use commands::{EulerOutcome, Function};
use parse::Axis;

#[derive(Debug, Parser)]
#[command(
    name = "halfline",
    version,
    about = "Characteristic determinants of z_{n-1} - z_{n+1} + b_n c_n z_n = lambda z_n"
)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    tolerances: Tolerances,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Relative truncation tolerance for Jost and Evans functions.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive)]
    pub tol: f64,
    /// Relative truncation tolerance for the finite-section determinants.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    pub section_tol: f64,
    /// Tolerance for real and complex root refinement.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = positive)]
    pub root_tol: f64,
    /// Minimum distance of contours and grids from the band [-2i, 2i].
    #[arg(long, global = true, default_value_t = 1e-2, value_parser = positive)]
    pub margin: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots mu_+/mu_- and the projections at one lambda.
    Frame {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        lambda: Complex64,
        #[arg(long, default_value_t = halfline::spectral::DEFAULT_BAND_TOL, value_parser = positive)]
        band_tol: f64,
    },
    /// det(I-K), det(I-T), Evans, Jost and (Euler, Re lambda > 0) the
    /// continued-fraction function at one lambda.
    Dets {
        /// Problem JSON, or @path to a file holding it.
        #[arg(long)]
        problem: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        lambda: Complex64,
        /// Also report section sizes and truncation estimates.
        #[arg(long)]
        all: bool,
    },
    /// Counts zeros in a rectangle and locates them where possible.
    Eigs {
        #[arg(long)]
        problem: String,
        /// Real range `a,b`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::interval)]
        re: (f64, f64),
        /// Imaginary range `c,d`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::interval)]
        im: (f64, f64),
        #[arg(long, value_enum, default_value_t = Function::Jost)]
        function: Function,
        /// Real-axis scan resolution.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Instability pipeline for the Euler slice through q along p.
    Euler {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::ivec)]
        p: [i64; 2],
        #[arg(long, allow_hyphen_values = true, value_parser = parse::ivec)]
        q: [i64; 2],
        #[arg(long, default_value_t = 1e-2, value_parser = positive)]
        lambda_min: f64,
        /// Upper end of the search interval (default 2 max|rho_n|).
        #[arg(long, value_parser = positive)]
        lambda_max: Option<f64>,
    },
    /// CSV of F+ (and with --all every function) over a grid, real part
    /// varying fastest.
    Sweep {
        #[arg(long)]
        problem: String,
        /// Real axis: `x` or `a:b:n`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::axis)]
        re: Axis,
        /// Imaginary axis: `y` or `c:d:n`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::axis)]
        im: Axis,
        #[arg(long)]
        all: bool,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Usage(String),
    Io(String),
    /// Stdout closed by the reader, e.g. when piping into `head`.
    Closed,
    Unsupported(halfline::CaseLabel),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    case_label: Option<halfline::CaseLabel>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    theory_violating: bool,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Closed => 3,
            CliError::Unsupported(_) => 5,
            CliError::Lib(e) => match e {
                Error::InvalidInput(_)
                | Error::DegenerateRho { .. }
                | Error::DegenerateLatticePoint { .. } => 2,
                Error::NoRootFound { .. } => 4,
                Error::InvalidCase(_) => 5,
                _ => 3,
            },
        }
    }

    fn report(&self) -> ErrorReport<'_> {
        let (error, message) = match self {
            CliError::Lib(e) => (e.kind(), e.to_string()),
            CliError::Usage(m) => ("InvalidInput", m.clone()),
            CliError::Io(m) => ("IoError", m.clone()),
            CliError::Closed => ("IoError", "output closed".into()),
            CliError::Unsupported(l) => (
                "UnsupportedCase",
                format!("case {l} is not supported by the pipeline"),
            ),
        };
        ErrorReport {
            error,
            message,
            exit_code: self.exit_code(),
            case_label: match self {
                CliError::Unsupported(l) => Some(*l),
                _ => None,
            },
            theory_violating: matches!(self, CliError::Lib(Error::NoRootFound { .. })),
        }
    }
}

pub fn io_error(e: io::Error) -> CliError {
    if e.kind() == io::ErrorKind::BrokenPipe {
        CliError::Closed
    } else {
        CliError::Io(e.to_string())
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    let io = io_error;
    match output {
        Some(path) => {
            let mut f = File::create(path).map_err(io)?;
            writeln!(f, "{text}").map_err(io)
        }
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(io)
        }
    }
}

fn run(cfg: RunConfig) -> Result<(), CliError> {
    let tol = &cfg.tolerances;
    match cfg.command {
        Command::Frame { lambda, band_tol } => {
            emit(&cfg.output, &commands::frame(lambda, band_tol)?)
        }
        Command::Dets {
            problem,
            lambda,
            all,
        } => {
            let model = commands::load_problem(&problem)?;
            emit(&cfg.output, &commands::dets(&model, lambda, all, tol)?)
        }
        Command::Eigs {
            problem,
            re,
            im,
            function,
            grid,
        } => {
            if grid == 0 {
                return Err(CliError::Usage("--grid must be positive".into()));
            }
            let model = commands::load_problem(&problem)?;
            emit(
                &cfg.output,
                &commands::eigs(&model, re, im, function, grid, tol)?,
            )
        }
        Command::Euler {
            p,
            q,
            lambda_min,
            lambda_max,
        } => match commands::euler(p, q, lambda_min, lambda_max, tol)? {
            EulerOutcome::Report(json) => emit(&cfg.output, &json),
            EulerOutcome::Unsupported(json, label) => {
                emit(&cfg.output, &json)?;
                Err(CliError::Unsupported(label))
            }
        },
        Command::Sweep {
            problem,
            re,
            im,
            all,
        } => {
            let model = commands::load_problem(&problem)?;
            match &cfg.output {
                Some(path) => {
                    let f = File::create(path).map_err(io_error)?;
                    commands::sweep(&model, &re, &im, all, tol, BufWriter::new(f))
                }
                None => commands::sweep(&model, &re, &im, all, tol, io::stdout().lock()),
            }
        }
    }
}

fn fail(err: &CliError) -> ExitCode {
    let report = err.report();
    let line = serde_json::to_string(&report)
        .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", report.error));
    eprintln!("{line}");
    ExitCode::from(report.exit_code)
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        let report = serde_json::json!({
            "error": "InternalError",
            "message": info.to_string(),
            "exit_code": 3,
        });
        eprintln!("{report}");
        std::process::exit(3);
    }));
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    match run(cfg) {
        Ok(()) | Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
