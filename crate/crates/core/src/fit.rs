//! Linear least-squares fits of reconstructed curves to candidate forms.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::PotentialCurve;

/// Fraction of the grid dropped at each end before fitting.
pub const TRIM_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    /// `c₋₁/x + c₁x + c₀`
    CoulombPlusLinear,
    /// `c₂x² + c₀`
    Harmonic,
    /// `c_L ln(1+λx) + c₀`
    Logarithmic,
    /// `c₂ e^{2λx} + c₁ e^{λx}`
    MorseExact,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::CoulombPlusLinear,
        ModelKind::Harmonic,
        ModelKind::Logarithmic,
        ModelKind::MorseExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::CoulombPlusLinear => "COULOMB_PLUS_LINEAR",
            ModelKind::Harmonic => "HARMONIC",
            ModelKind::Logarithmic => "LOGARITHMIC",
            ModelKind::MorseExact => "MORSE_EXACT",
        }
    }

    pub fn regressor_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::CoulombPlusLinear => &["1/x", "x", "1"],
            ModelKind::Harmonic => &["x^2", "1"],
            ModelKind::Logarithmic => &["ln(1+lambda x)", "1"],
            ModelKind::MorseExact => &["exp(2 lambda x)", "exp(lambda x)"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::Parameter(format!("unknown fit model '{s}'")))
    }
}

/// A model with its fixed parameters. `orbital = Some(ℓ)` means the target
/// curve carries `ℓ(ℓ+1)/2x²`, which is subtracted before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub kind: ModelKind,
    pub lambda: f64,
    pub orbital: Option<u32>,
}

impl FitModel {
    pub fn new(kind: ModelKind, lambda: f64, orbital: Option<u32>) -> Self {
        FitModel {
            kind,
            lambda,
            orbital,
        }
    }

    fn regressors(&self, x: f64) -> Vec<f64> {
        let l = self.lambda;
        match self.kind {
            ModelKind::CoulombPlusLinear => vec![1.0 / x, x, 1.0],
            ModelKind::Harmonic => vec![x * x, 1.0],
            ModelKind::Logarithmic => vec![(l * x).ln_1p(), 1.0],
            ModelKind::MorseExact => vec![(2.0 * l * x).exp(), (l * x).exp()],
        }
    }

    pub fn evaluate(&self, coefficients: &[f64], x: f64) -> f64 {
        let base: f64 = self
            .regressors(x)
            .iter()
            .zip(coefficients)
            .map(|(r, c)| r * c)
            .sum();
        base + self.orbital_term(x)
    }

    fn orbital_term(&self, x: f64) -> f64 {
        self.orbital.map_or(0.0, |l| {
            let l = l as f64;
            0.5 * l * (l + 1.0) / (x * x)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
    pub max_residual: f64,
    /// `rms_residual` divided by the fitted curve's dynamic range.
    pub relative_rms: f64,
    pub grid_range: (f64, f64),
    pub points: usize,
}

/// Ordinary least squares of the trimmed curve against `model` by QR.
pub fn fit_curve(curve: &PotentialCurve, model: &FitModel) -> Result<FitReport> {
    if curve.includes_orbital != model.orbital.is_some() {
        return Err(Error::FlagMismatch(format!(
            "curve {} the orbital term but the model {}",
            if curve.includes_orbital {
                "includes"
            } else {
                "excludes"
            },
            if model.orbital.is_some() {
                "expects it"
            } else {
                "does not"
            }
        )));
    }
    let total = curve.xs.len();
    let cut = (TRIM_FRACTION * total as f64).ceil() as usize;
    let (xs, vs) = if total > 2 * cut {
        (&curve.xs[cut..total - cut], &curve.vs[cut..total - cut])
    } else {
        (&curve.xs[..0], &curve.vs[..0])
    };
    let cols = model.kind.regressor_names().len();
    if xs.len() < 3 * cols {
        return Err(Error::Precondition(format!(
            "{} points after trimming, need at least {}",
            xs.len(),
            3 * cols
        )));
    }
    let rows = xs.len();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, (&x, &v)) in xs.iter().zip(vs).enumerate() {
        for (j, r) in model.regressors(x).into_iter().enumerate() {
            a[(i, j)] = r;
        }
        b[i] = v - model.orbital_term(x);
    }
    // unit-norm columns so the rank test is scale free
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    if norms.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::RankDeficient);
    }
    for (j, n) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / n);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let rmax = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..cols).any(|i| r[(i, i)].abs() <= 1e-10 * rmax) {
        return Err(Error::RankDeficient);
    }
    let qtb = qr.q().transpose() * &b;
    let scaled = r.solve_upper_triangular(&qtb).ok_or(Error::RankDeficient)?;
    let coefficients: Vec<f64> = scaled.iter().zip(&norms).map(|(c, n)| c / n).collect();

    let residuals: Vec<f64> = xs
        .iter()
        .zip(vs)
        .map(|(&x, &v)| v - model.evaluate(&coefficients, x))
        .collect();
    let rms_residual = (residuals.iter().map(|r| r * r).sum::<f64>() / rows as f64).sqrt();
    let max_residual = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
    let range = hi - lo;
    Ok(FitReport {
        model: *model,
        coefficients,
        rms_residual,
        max_residual,
        relative_rms: if range > 0.0 {
            rms_residual / range
        } else {
            f64::INFINITY
        },
        grid_range: (xs[0], xs[rows - 1]),
        points: rows,
    })
}
