use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use specpot::basis::{BasisCase, BasisSpec};
use specpot::cdh::PolyParams;
use specpot::presets::{Grid, Preset};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// whitespace-separated columns for gnuplot
    Dat,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dat" | "gnuplot" => Ok(Format::Dat),
            _ => Err(format!("unknown format '{s}' (csv, json, dat)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dat => "dat",
        })
    }
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the preset, then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with any of the flag values (underscored keys)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// fig1..fig4
    #[arg(long)]
    pub preset: Option<String>,
    /// COULOMB_LINEAR, OSCILLATOR, LOG or MORSE
    #[arg(long)]
    pub case: Option<BasisCase>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// polynomial parameter a (default 1 - mu)
    #[arg(long)]
    pub a: Option<f64>,
    /// polynomial parameter b (default 1 - mu)
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// basis index; defaults to the case linkage
    #[arg(long)]
    pub nu: Option<f64>,
    /// truncation order N
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub column: Option<usize>,
    /// add the orbital term l(l+1)/2x² (radial cases)
    #[arg(long)]
    pub orbital: bool,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Contents of a `--config` file. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub case: Option<BasisCase>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub ell: Option<u32>,
    pub gamma: Option<f64>,
    pub nu: Option<f64>,
    pub nmax: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub column: Option<usize>,
    pub orbital: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub case: BasisCase,
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub ell: Option<u32>,
    pub gamma: Option<f64>,
    pub nu: f64,
    pub nmax: usize,
    pub grid: Grid,
    pub column: usize,
    pub orbital: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_ORDER: usize = 100;

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let preset = match args.preset.as_ref().or(file.preset.as_ref()) {
            Some(name) => Some(Preset::by_name(name)?),
            None => None,
        };
        let case = args
            .case
            .or(file.case)
            .or(preset.map(|p| p.case))
            .ok_or_else(|| CliError::Config("need --case or --preset".into()))?;
        // preset shape parameters only carry over when the case is unchanged
        let same_case = preset.filter(|p| p.case == case);
        let lambda = args
            .lambda
            .or(file.lambda)
            .or(preset.map(|p| p.lambda))
            .unwrap_or(1.0);
        let mu = args
            .mu
            .or(file.mu)
            .or(preset.map(|p| p.mu))
            .ok_or_else(|| CliError::Config("need --mu or --preset".into()))?;
        let a = args.a.or(file.a).unwrap_or(1.0 - mu);
        let b = args.b.or(file.b).unwrap_or(1.0 - mu);
        let ell = match args.ell.or(file.ell) {
            Some(l) => Some(l),
            None if case.is_radial() => Some(
                same_case
                    .and_then(|p| p.ell)
                    .ok_or_else(|| CliError::Config(format!("{case} needs --ell")))?,
            ),
            None => None,
        };
        let gamma = match args.gamma.or(file.gamma) {
            Some(g) => Some(g),
            None if case == BasisCase::Log => Some(
                same_case
                    .and_then(|p| p.gamma)
                    .ok_or_else(|| CliError::Config("LOG needs --gamma".into()))?,
            ),
            None => None,
        };

        let params = PolyParams::new(mu, a, b, lambda)?;
        let spec = match args.nu.or(file.nu) {
            Some(nu) => BasisSpec::new(case, lambda, nu, gamma, ell)?,
            None => BasisSpec::for_params(case, &params, ell, gamma)?,
        };

        let default_grid = Grid::default_for(case, lambda);
        let grid = Grid::new(
            args.grid_min.or(file.grid_min).unwrap_or(default_grid.min),
            args.grid_max.or(file.grid_max).unwrap_or(default_grid.max),
            args.grid_points
                .or(file.grid_points)
                .unwrap_or(default_grid.points),
        )?;
        let nmax = args.nmax.or(file.nmax).unwrap_or(DEFAULT_ORDER);
        if nmax == 0 {
            return Err(CliError::Config("--nmax must be positive".into()));
        }
        let column = args.column.or(file.column).unwrap_or(0);
        if column >= nmax {
            return Err(CliError::Config(format!(
                "--column {column} must be below --nmax {nmax}"
            )));
        }
        let orbital = args.orbital || file.orbital.unwrap_or(false);
        if orbital && !case.is_radial() {
            return Err(CliError::Config(format!(
                "--orbital only applies to radial cases, not {case}"
            )));
        }
        Ok(RunConfig {
            preset: preset.map(|p| p.name.to_string()),
            case,
            lambda,
            mu,
            a,
            b,
            ell,
            gamma,
            nu: spec.nu,
            nmax,
            grid,
            column,
            orbital,
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            out: args.out.clone().or(file.out),
        })
    }

    pub fn params(&self) -> Result<PolyParams, CliError> {
        Ok(PolyParams::new(self.mu, self.a, self.b, self.lambda)?)
    }

    pub fn basis(&self) -> Result<BasisSpec, CliError> {
        Ok(BasisSpec::new(
            self.case,
            self.lambda,
            self.nu,
            self.gamma,
            self.ell,
        )?)
    }
}

/// `SPECPOT_QUAD_ORDER`, if set, replaces `default`.
pub fn quad_order(default: usize) -> Result<usize, CliError> {
    match std::env::var("SPECPOT_QUAD_ORDER") {
        Err(_) => Ok(default),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n),
            _ => Err(CliError::Config(format!(
                "SPECPOT_QUAD_ORDER must be an integer >= 2, got '{v}'"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(preset: &str) -> CommonArgs {
        CommonArgs {
            preset: Some(preset.into()),
            ..Default::default()
        }
    }

    #[test]
    fn presets_resolve_with_linkage() {
        let c = RunConfig::resolve(&args("fig1")).unwrap();
        assert_eq!((c.nu, c.ell, c.nmax, c.column), (8.0, Some(3), 100, 0));
        assert_eq!(c.a, 1.0 - c.mu);
        let c = RunConfig::resolve(&args("fig3")).unwrap();
        assert!((c.nu - 9.4).abs() < 1e-12);
        assert_eq!((c.grid.min, c.grid.max, c.grid.points), (0.002, 1.0, 400));
    }

    #[test]
    fn changing_case_drops_preset_shape() {
        let mut a = args("fig1");
        a.case = Some(BasisCase::Morse);
        let c = RunConfig::resolve(&a).unwrap();
        assert_eq!(c.ell, None);
        assert!((c.nu - 7.4).abs() < 1e-12);
        a.case = Some(BasisCase::Log);
        assert!(RunConfig::resolve(&a).is_err());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut a = args("fig1");
        a.nu = Some(3.0);
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = args("fig4");
        a.orbital = true;
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = args("fig4");
        a.column = Some(100);
        assert!(RunConfig::resolve(&a).is_err());
        assert!(RunConfig::resolve(&CommonArgs::default()).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"preset":"fig1","colour":1}"#).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = RunConfig::resolve(&args("fig3")).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }
}
