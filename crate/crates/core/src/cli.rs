//! The `braidlab` command line.
//!
//! [`run`] parses arguments and returns a [`CommandResult`] instead of
//! printing, so that the binary and the tests share one code path. Payloads
//! are compact JSON with 17-significant-digit floats.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::braid::{braid_residual, unitarity_residual, ybe_residual, Residual};
use crate::error::BraidError;
use crate::json::{self, ComplexDoc};
use crate::params::{ParamSet, RandomOptions};
use crate::projectors::verify_projector_algebra;
use crate::smatrix::potential;
use crate::spectrum::{
    closed_form_spectrum, closed_form_values, match_spectra, multiplet_census, oracle_spectrum, record_docs,
    total_multiplicity, MatchReport, RecordDoc,
};
use crate::spinchain::{conserved_quantity, hamiltonian, Boundary};
use crate::transfer::{commutator_residual, transfer_matrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Tolerance for `spectrum --compare`, relative to the largest modulus.
pub const SPECTRUM_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    /// JSON document for standard output.
    pub payload: Option<String>,
    /// Text for standard error.
    pub diagnostics: String,
}

impl CommandResult {
    fn ok(payload: String) -> Self {
        Self {
            exit_code: EXIT_OK,
            payload: Some(payload),
            diagnostics: String::new(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "braidlab", version, about = "Multiparameter braid matrices and their lattice models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random parameter set.
    GenParams {
        #[arg(long = "N")]
        n_states: usize,
        #[arg(long)]
        seed: u64,
        /// Purely imaginary entries.
        #[arg(long)]
        imaginary: bool,
        /// Enforce m_ab^(+) > m_ab^(-).
        #[arg(long)]
        boltzmann: bool,
    },
    /// Numerical certificate for one identity.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta2: Option<f64>,
        #[arg(long = "theta2-im", allow_hyphen_values = true, default_value_t = 0.0)]
        theta2_im: f64,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sparse transfer matrix T^(r)(theta).
    Transfer {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        theta: ThetaArgs,
    },
    /// Closed-form spectrum, optionally against dense diagonalization.
    Spectrum {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        compare: bool,
    },
    /// Zero-sum multiplets on the identical-index subspaces.
    Census {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        r: usize,
    },
    /// Nearest-neighbour Hamiltonian or a higher conserved quantity.
    SpinChain {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum)]
        boundary: Boundary,
        #[arg(long)]
        conserved: Option<u32>,
    },
    /// Coupling table of the potential V(theta) at a given lambda.
    Potential {
        #[command(flatten)]
        params: ParamsArg,
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long = "lambda-re", allow_hyphen_values = true)]
        lambda_re: f64,
        #[arg(long = "lambda-im", allow_hyphen_values = true, default_value_t = 0.0)]
        lambda_im: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckKind {
    Braid,
    Ybe,
    Unitarity,
    Commute,
    Projectors,
}

#[derive(Debug, Args)]
struct ParamsArg {
    /// Parameter-set JSON file.
    #[arg(long)]
    params: PathBuf,
}

#[derive(Debug, Args)]
struct ThetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long = "theta-im", allow_hyphen_values = true, default_value_t = 0.0)]
    theta_im: f64,
}

impl ThetaArgs {
    fn value(&self) -> Complex64 {
        Complex64::new(self.theta, self.theta_im)
    }
}

/// Failure inside a subcommand, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<BraidError> for Failure {
    fn from(e: BraidError) -> Self {
        let code = match e {
            BraidError::Resource { .. } => EXIT_RESOURCE,
            BraidError::Numerical(_) => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = std::result::Result<CommandResult, Failure>;

/// Parse `args` (program name first) and execute the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CommandResult {
                exit_code,
                payload: None,
                diagnostics: e.render().to_string(),
            };
        }
    };
    match execute(cli.command) {
        Ok(result) => result,
        Err(Failure { code, message }) => {
            // Verification-class failures still emit a JSON payload.
            let payload = (code == EXIT_VERIFICATION).then(|| json::to_string(&ErrorDoc { error: &message }));
            CommandResult {
                exit_code: code,
                payload,
                diagnostics: format!("error: {message}\n"),
            }
        }
    }
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: &'a str,
}

fn load_params(arg: &ParamsArg) -> std::result::Result<ParamSet, Failure> {
    let text = std::fs::read_to_string(&arg.params)
        .map_err(|e| usage(format!("cannot read {}: {e}", arg.params.display())))?;
    Ok(ParamSet::from_json(&text)?)
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::GenParams {
            n_states,
            seed,
            imaginary,
            boltzmann,
        } => {
            let options = RandomOptions {
                imaginary,
                boltzmann,
                ..RandomOptions::default()
            };
            Ok(CommandResult::ok(ParamSet::random(n_states, seed, &options)?.to_json()))
        }
        Command::Check {
            kind,
            params,
            theta,
            theta2,
            theta2_im,
            r,
            tol,
        } => {
            let p = load_params(&params)?;
            let theta2 = theta2.map(|re| Complex64::new(re, theta2_im));
            check(kind, &p, theta.value(), theta2, r, tol)
        }
        Command::Transfer { params, r, theta } => {
            let p = load_params(&params)?;
            let t = transfer_matrix(&p, r, theta.value())?;
            Ok(CommandResult::ok(json::to_string(&t.to_doc())))
        }
        Command::Spectrum {
            params,
            r,
            theta,
            oracle,
            compare,
        } => {
            let p = load_params(&params)?;
            spectrum(&p, r, theta.value(), oracle, compare)
        }
        Command::Census { params, r } => {
            let p = load_params(&params)?;
            Ok(CommandResult::ok(json::to_string(&multiplet_census(&p, r)?)))
        }
        Command::SpinChain {
            params,
            r,
            boundary,
            conserved,
        } => {
            let p = load_params(&params)?;
            let op = match conserved {
                None => hamiltonian(&p, r, boundary)?,
                Some(_) if boundary == Boundary::Open => {
                    return Err(usage("conserved quantities are defined for the closed chain only"))
                }
                Some(l) => conserved_quantity(&p, r, l)?,
            };
            Ok(CommandResult::ok(json::to_string(&op.to_doc())))
        }
        Command::Potential {
            params,
            theta,
            lambda_re,
            lambda_im,
        } => {
            let p = load_params(&params)?;
            let table = potential(&p, theta.value(), Complex64::new(lambda_re, lambda_im))?;
            Ok(CommandResult::ok(json::to_string(&table)))
        }
    }
}

#[derive(Serialize)]
struct CheckDoc {
    check: CheckKind,
    #[serde(rename = "N")]
    n_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    theta: ComplexDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta2: Option<ComplexDoc>,
    residual: f64,
    scaled_residual: f64,
    scale: f64,
    tolerance: f64,
    passed: bool,
}

fn check(
    kind: CheckKind,
    p: &ParamSet,
    theta: Complex64,
    theta2: Option<Complex64>,
    r: usize,
    tol: Option<f64>,
) -> Outcome {
    let need_theta2 = || theta2.ok_or_else(|| usage(format!("check {kind:?} requires --theta2").to_lowercase()));
    let (residual, default_tol, uses_r, uses_theta2) = match kind {
        CheckKind::Braid => (braid_residual(p, theta, need_theta2()?), 1e-10, false, true),
        CheckKind::Ybe => (ybe_residual(p, theta, need_theta2()?), 1e-10, false, true),
        CheckKind::Unitarity => {
            if theta.im != 0.0 {
                return Err(usage("unitarity is checked for real theta"));
            }
            (unitarity_residual(p, theta.re), 1e-10, false, false)
        }
        CheckKind::Commute => (commutator_residual(p, r, theta, need_theta2()?)?, 1e-9, true, true),
        CheckKind::Projectors => {
            let report = verify_projector_algebra(p.n_states(), tol.unwrap_or(0.0))?;
            let raw = report.orthogonality_deviation.max(report.completeness_deviation);
            (Residual::new(raw, 1.0), 0.0, false, false)
        }
    };
    let tolerance = tol.unwrap_or(default_tol);
    let passed = residual.scaled <= tolerance;
    let doc = CheckDoc {
        check: kind,
        n_states: p.n_states(),
        r: uses_r.then_some(r),
        theta: theta.into(),
        theta2: if uses_theta2 { theta2.map(ComplexDoc::from) } else { None },
        residual: residual.raw,
        scaled_residual: residual.scaled,
        scale: residual.scale,
        tolerance,
        passed,
    };
    Ok(CommandResult {
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
        payload: Some(json::to_string(&doc)),
        diagnostics: if passed {
            String::new()
        } else {
            format!(
                "{kind:?} residual {:e} exceeds tolerance {tolerance:e}\n",
                residual.scaled
            )
        },
    })
}

#[derive(Serialize)]
struct SpectrumDoc {
    #[serde(rename = "N")]
    n_states: usize,
    r: usize,
    theta: ComplexDoc,
    total_multiplicity: usize,
    records: Vec<RecordDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Vec<ComplexDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matched: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<MatchReport>,
}

fn spectrum(p: &ParamSet, r: usize, theta: Complex64, oracle: bool, compare: bool) -> Outcome {
    let records = closed_form_spectrum(p, r)?;
    let dense = if oracle || compare {
        Some(oracle_spectrum(p, r, theta)?)
    } else {
        None
    };
    let comparison = match (&dense, compare) {
        (Some(values), true) => Some(match_spectra(
            &closed_form_values(p, &records, theta),
            values,
            SPECTRUM_MATCH_TOL,
        )),
        _ => None,
    };
    let matched = comparison.map(|c| c.matched);
    let doc = SpectrumDoc {
        n_states: p.n_states(),
        r,
        theta: theta.into(),
        total_multiplicity: total_multiplicity(&records),
        records: record_docs(p, &records, theta),
        oracle: dense
            .filter(|_| oracle)
            .map(|v| v.into_iter().map(ComplexDoc::from).collect()),
        matched,
        comparison,
    };
    let failed = matched == Some(false);
    Ok(CommandResult {
        exit_code: if failed { EXIT_VERIFICATION } else { EXIT_OK },
        payload: Some(json::to_string(&doc)),
        diagnostics: if failed {
            "closed-form spectrum does not match the dense eigenvalues\n".into()
        } else {
            String::new()
        },
    })
}
