//! `specpot`: spectra, matrices, reconstructed potentials and fits from the
//! command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod validate;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use specpot::basis::BasisCase;
use specpot::fit::{fit_curve, FitModel, FitReport, ModelKind};
use specpot::hamiltonian::{build_sigma, energy_ladder, lowest_eigenvalues, SpectrumLadder};
use specpot::kinetic::{kinetic_matrix, t_oracle_matrix};
use specpot::linalg::SymMatrix;
use specpot::presets::PRESETS;
use specpot::reconstruct::{
    add_orbital, reconstruct_potential, reconstruct_potential_masked, PotentialCurve,
};

use config::{quad_order, CommonArgs, Format, RunConfig};
use output::{csv, dat, emit, g17, json};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(specpot::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(e) => write!(f, "numeric error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<specpot::Error> for CliError {
    fn from(e: specpot::Error) -> Self {
        use specpot::Error as E;
        match e {
            E::Parameter(_) | E::Index { .. } | E::Domain { .. } | E::FlagMismatch(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "specpot",
    version,
    about = "Potential functions from a mixed energy spectrum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound-state energies and the matching eigenvalues of the truncated H
    Spectrum(CommonArgs),
    /// The tridiagonal Σ matrix
    Sigma(CommonArgs),
    /// The kinetic energy matrix
    Kinetic {
        #[command(flatten)]
        common: CommonArgs,
        /// quadrature instead of the closed form
        #[arg(long)]
        oracle: bool,
    },
    /// V(x) on a grid from one column of H - T
    Reconstruct(CommonArgs),
    /// Least-squares fit of the reconstructed curve
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// COULOMB_PLUS_LINEAR, HARMONIC, LOGARITHMIC or MORSE_EXACT
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Run the invariant suites (all presets unless one is chosen); exits 1 if
    /// any check fails
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// print every check
        #[arg(long, short)]
        verbose: bool,
        /// add this amount to Σ₀₀ before checking
        #[arg(long, value_name = "EPS", allow_hyphen_values = true)]
        perturb_sigma: Option<f64>,
    },
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    config: &'a RunConfig,
    ladder: SpectrumLadder,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    config: &'a RunConfig,
    name: &'static str,
    order: usize,
    bandwidth: Option<usize>,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct CurveOut<'a> {
    config: &'a RunConfig,
    curve: PotentialCurve,
    masked: Vec<f64>,
    /// max |V_column - V_0| on the unmasked grid, for column > 0
    locality: Option<f64>,
}

#[derive(Serialize)]
struct FitOut<'a> {
    config: &'a RunConfig,
    report: FitReport,
}

fn spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let ladder = energy_ladder(&p)?;
    let eigenvalues = lowest_eigenvalues(&p, cfg.nmax, ladder.count)?;
    Ok(match cfg.format {
        Format::Json => json(&SpectrumOut {
            config: cfg,
            ladder,
            eigenvalues,
        })?,
        f => {
            let rows = ladder.energies.iter().enumerate().map(|(k, e)| {
                vec![
                    k.to_string(),
                    g17(*e),
                    eigenvalues.get(k).map_or("nan".into(), |v| g17(*v)),
                ]
            });
            let rows: Vec<_> = rows.collect();
            if f == Format::Csv {
                csv("k,E,eigenvalue", rows)
            } else {
                dat("k,E,eigenvalue", rows)
            }
        }
    })
}

fn matrix(cfg: &RunConfig, name: &'static str, m: &SymMatrix) -> Result<String, CliError> {
    Ok(match cfg.format {
        Format::Json => json(&MatrixOut {
            config: cfg,
            name,
            order: m.order(),
            bandwidth: m.bandwidth(),
            rows: m.rows(),
        })?,
        f => {
            let n = m.order();
            let band = m.bandwidth().unwrap_or(n);
            let rows: Vec<_> = (0..n)
                .flat_map(|i| (i..n.min(i + band + 1)).map(move |j| (i, j)))
                .map(|(i, j)| vec![i.to_string(), j.to_string(), g17(m.get(i, j))])
                .collect();
            let header = format!("n,m,{name}");
            if f == Format::Csv {
                csv(&header, rows)
            } else {
                dat(&header, rows)
            }
        }
    })
}

/// The configured curve, masked near nodes of φ_column, with the orbital
/// term when requested.
fn curve(cfg: &RunConfig) -> Result<(PotentialCurve, Vec<f64>, Option<f64>), CliError> {
    let p = cfg.params()?;
    let spec = cfg.basis()?;
    let xs = cfg.grid.xs();
    let (mut curve, masked, locality) = if cfg.column == 0 {
        (
            reconstruct_potential(&p, &spec, cfg.nmax, 0, &xs)?,
            Vec::new(),
            None,
        )
    } else {
        let (c, masked) = reconstruct_potential_masked(&p, &spec, cfg.nmax, cfg.column, &xs)?;
        let base = reconstruct_potential(&p, &spec, cfg.nmax, 0, &c.xs)?;
        let diff =
            c.vs.iter()
                .zip(&base.vs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        (c, masked, Some(diff))
    };
    if cfg.orbital {
        curve = add_orbital(&curve, spec.ell_or_zero())?;
    }
    Ok((curve, masked, locality))
}

fn reconstruct(cfg: &RunConfig) -> Result<String, CliError> {
    let (curve, masked, locality) = curve(cfg)?;
    Ok(match cfg.format {
        Format::Json => json(&CurveOut {
            config: cfg,
            curve,
            masked,
            locality,
        })?,
        f => {
            let rows: Vec<_> = curve
                .xs
                .iter()
                .zip(&curve.vs)
                .map(|(x, v)| vec![g17(*x), g17(*v)])
                .collect();
            if f == Format::Csv {
                csv("x,V", rows)
            } else {
                dat("x,V", rows)
            }
        }
    })
}

fn natural_model(case: BasisCase) -> ModelKind {
    match case {
        BasisCase::CoulombLinear => ModelKind::CoulombPlusLinear,
        BasisCase::Oscillator => ModelKind::Harmonic,
        BasisCase::Log => ModelKind::Logarithmic,
        BasisCase::Morse => ModelKind::MorseExact,
    }
}

fn fit(cfg: &RunConfig, model: Option<ModelKind>) -> Result<String, CliError> {
    let (curve, _, _) = curve(cfg)?;
    let kind = model.unwrap_or_else(|| natural_model(cfg.case));
    let orbital = cfg.orbital.then(|| cfg.ell.unwrap_or(0));
    let report = fit_curve(&curve, &FitModel::new(kind, cfg.lambda, orbital))?;
    Ok(match cfg.format {
        Format::Json => json(&FitOut {
            config: cfg,
            report,
        })?,
        f => {
            let mut rows: Vec<Vec<String>> = kind
                .regressor_names()
                .iter()
                .zip(&report.coefficients)
                .map(|(n, c)| vec![format!("coef[{n}]"), g17(*c)])
                .collect();
            rows.push(vec!["rms_residual".into(), g17(report.rms_residual)]);
            rows.push(vec!["max_residual".into(), g17(report.max_residual)]);
            rows.push(vec!["relative_rms".into(), g17(report.relative_rms)]);
            rows.push(vec!["points".into(), report.points.to_string()]);
            if f == Format::Csv {
                csv("name,value", rows)
            } else {
                dat("name,value", rows)
            }
        }
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (cfg, text) = match cli.command {
        Command::Spectrum(a) => {
            let cfg = RunConfig::resolve(&a)?;
            let t = spectrum(&cfg)?;
            (cfg, t)
        }
        Command::Sigma(a) => {
            let cfg = RunConfig::resolve(&a)?;
            let t = matrix(&cfg, "Sigma", &build_sigma(&cfg.params()?, cfg.nmax)?)?;
            (cfg, t)
        }
        Command::Kinetic { common, oracle } => {
            let cfg = RunConfig::resolve(&common)?;
            let spec = cfg.basis()?;
            let m = if oracle {
                t_oracle_matrix(&spec, cfg.nmax, quad_order(40)?)?
            } else {
                kinetic_matrix(&spec, cfg.nmax)?
            };
            let t = matrix(&cfg, "T", &m)?;
            (cfg, t)
        }
        Command::Reconstruct(a) => {
            let cfg = RunConfig::resolve(&a)?;
            let t = reconstruct(&cfg)?;
            (cfg, t)
        }
        Command::Fit { common, model } => {
            let cfg = RunConfig::resolve(&common)?;
            let t = fit(&cfg, model)?;
            (cfg, t)
        }
        Command::Validate {
            common,
            verbose,
            perturb_sigma,
        } => {
            let cfgs =
                if common.preset.is_none() && common.case.is_none() && common.config.is_none() {
                    PRESETS
                        .iter()
                        .map(|p| {
                            RunConfig::resolve(&CommonArgs {
                                preset: Some(p.name.to_string()),
                                ..common.clone()
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?
                } else {
                    vec![RunConfig::resolve(&common)?]
                };
            let cfg = &cfgs[0];
            let summary = validate::run(&cfgs, perturb_sigma.unwrap_or(0.0))?;
            let text = match cfg.format {
                Format::Json => json(&summary)?,
                _ => validate::render(&summary, verbose),
            };
            emit(&text, cfg.out.as_deref())?;
            return Ok(if summary.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("specpot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
