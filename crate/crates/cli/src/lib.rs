//! Command dispatch for the `orbindex` binary.
//!
//! Exit codes: 0 pass, 1 input error, 2 verification failure or unresolved quadrature.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use orbindex::heat::QuadratureSpec;
use orbindex::io::model_doc::{load_model, mode_from_env};
use orbindex::io::report::{
    classes_report, heat_report_doc, index_report, localized_report, sectors_report, verify_report, write_report,
    IndexMethod,
};
use orbindex::sector::{Mode, QuotientModel, SectionChoice};
use orbindex::{Cyclotomic, Error};
use serde_json::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "orbindex", version, about = "Localized indices on orbifold quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conjugacy classes with fixed points.
    Classes { model: PathBuf },
    /// Twisted-sector components.
    Sectors { model: PathBuf },
    /// Global index or per-element Lefschetz numbers.
    Index {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Kawasaki)]
        method: MethodArg,
    },
    /// Localized index of one class.
    Localized {
        model: PathBuf,
        #[arg(long = "class")]
        class: String,
        /// `canonical` or `scrambled:SEED`
        #[arg(long, default_value = "canonical", value_parser = parse_section)]
        section: SectionChoice,
    },
    /// Localized heat supertrace at several times.
    Heat {
        model: PathBuf,
        #[arg(long = "class")]
        class: String,
        #[arg(long = "t", value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 1024)]
        max_grid: usize,
        /// fixed class-sum radius in lattice units
        #[arg(long)]
        truncation: Option<u32>,
    },
    /// Sum identity, assembly, integrality and oracle checks.
    Verify { model: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Lefschetz,
    Kawasaki,
    Assembly,
}

fn parse_section(s: &str) -> Result<SectionChoice, String> {
    match s.split_once(':') {
        None if s == "canonical" => Ok(SectionChoice::Canonical),
        Some(("scrambled", seed)) => seed.parse().map(SectionChoice::Scrambled).map_err(|e| format!("bad seed: {e}")),
        _ => Err(format!("expected `canonical` or `scrambled:SEED`, got `{s}`")),
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Resolution { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

/// Runs one command; `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_PASS;
        }
    };
    match dispatch(cli.command) {
        Ok((report, pass)) => match write_report(&report, out) {
            Ok(()) if pass => EXIT_PASS,
            Ok(()) => EXIT_FAIL,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

fn load(path: &Path) -> orbindex::Result<QuotientModel> {
    load_model(path, mode_from_env()?)
}

fn dispatch(cmd: Command) -> orbindex::Result<(Value, bool)> {
    match cmd {
        Command::Classes { model } => Ok((classes_report(&load(&model)?), true)),
        Command::Sectors { model } => Ok((sectors_report(&load(&model)?)?, true)),
        Command::Index { model, method } => {
            let m = load(&model)?;
            let method = match method {
                MethodArg::Lefschetz => IndexMethod::Lefschetz,
                MethodArg::Kawasaki => IndexMethod::Kawasaki,
                MethodArg::Assembly => IndexMethod::Assembly,
            };
            match m.options.mode {
                Mode::Exact => index_report::<Cyclotomic>(&m, method),
                Mode::Float => index_report::<Complex64>(&m, method),
            }
        }
        Command::Localized { model, class, section } => {
            let m = load(&model)?;
            let r = match m.options.mode {
                Mode::Exact => localized_report::<Cyclotomic>(&m, &class, &section)?,
                Mode::Float => localized_report::<Complex64>(&m, &class, &section)?,
            };
            Ok((r, true))
        }
        Command::Heat { model, class, t, tol, grid, max_grid, truncation } => {
            let m = load(&model)?;
            let quad = QuadratureSpec { grid, max_grid, truncation, tolerance: tol };
            heat_report_doc(&m, &class, &t, &quad)
        }
        Command::Verify { model } => {
            let m = load(&model)?;
            match m.options.mode {
                Mode::Exact => verify_report::<Cyclotomic>(&m),
                Mode::Float => verify_report::<Complex64>(&m),
            }
        }
    }
}
