//! Named parameter sets `fig1`..`fig4` and default grids.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisCase, BasisSpec};
use crate::cdh::PolyParams;
use crate::error::{Error, Result};
use crate::fit::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: &'static str,
    pub case: BasisCase,
    pub lambda: f64,
    pub mu: f64,
    pub ell: Option<u32>,
    pub gamma: Option<f64>,
    pub model: ModelKind,
}

pub const PRESETS: [Preset; 4] = [
    Preset {
        name: "fig1",
        case: BasisCase::CoulombLinear,
        lambda: 1.0,
        mu: -3.2,
        ell: Some(3),
        gamma: None,
        model: ModelKind::CoulombPlusLinear,
    },
    Preset {
        name: "fig2",
        case: BasisCase::Oscillator,
        lambda: 1.0,
        mu: -4.2,
        ell: Some(2),
        gamma: None,
        model: ModelKind::Harmonic,
    },
    Preset {
        name: "fig3",
        case: BasisCase::Log,
        lambda: 5.0,
        mu: -4.2,
        ell: None,
        gamma: Some(2.0),
        model: ModelKind::Logarithmic,
    },
    Preset {
        name: "fig4",
        case: BasisCase::Morse,
        lambda: 1.0,
        // μ = A + ½ with A = -5.2
        mu: -4.7,
        ell: None,
        gamma: None,
        model: ModelKind::MorseExact,
    },
];

impl Preset {
    pub fn by_name(name: &str) -> Result<Preset> {
        PRESETS
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name.trim()))
            .copied()
            .ok_or_else(|| {
                Error::Parameter(format!("unknown preset '{name}' (expected fig1..fig4)"))
            })
    }

    pub fn poly_params(&self) -> Result<PolyParams> {
        PolyParams::symmetric(self.mu, self.lambda)
    }

    pub fn basis_spec(&self) -> Result<BasisSpec> {
        BasisSpec::for_params(self.case, &self.poly_params()?, self.ell, self.gamma)
    }

    pub fn grid(&self) -> Grid {
        Grid::default_for(self.case, self.lambda)
    }
}

/// Uniform grid `[min, max]` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

pub const DEFAULT_GRID_POINTS: usize = 400;

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Grid> {
        if !(min.is_finite() && max.is_finite() && min < max) || points < 2 {
            return Err(Error::Parameter(format!(
                "grid needs finite min < max and at least 2 points, got [{min}, {max}] x {points}"
            )));
        }
        Ok(Grid { min, max, points })
    }

    pub fn default_for(case: BasisCase, lambda: f64) -> Grid {
        let (lo, hi) = match case {
            BasisCase::CoulombLinear | BasisCase::Oscillator => (0.05, 8.0),
            BasisCase::Log => (0.01, 5.0),
            BasisCase::Morse => (-5.0, 2.0),
        };
        Grid {
            min: lo / lambda,
            max: hi / lambda,
            points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

/// `points` evenly spaced values with both endpoints exact.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        max
                    } else {
                        min + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_consistent() {
        let counts = [4, 5, 5, 5];
        for (p, want) in PRESETS.iter().zip(counts) {
            let pp = p.poly_params().unwrap();
            assert_eq!(pp.bound_state_count(), want);
            assert_eq!(pp.a, 1.0 - p.mu);
            let b = p.basis_spec().unwrap();
            assert_eq!(b.case, p.case);
        }
        assert!((Preset::by_name("fig1").unwrap().basis_spec().unwrap().nu - 8.0).abs() < 1e-15);
        assert!((Preset::by_name("FIG2").unwrap().basis_spec().unwrap().nu - 2.5).abs() < 1e-15);
        assert!((Preset::by_name("fig3").unwrap().basis_spec().unwrap().nu - 9.4).abs() < 1e-12);
        assert!((Preset::by_name("fig4").unwrap().basis_spec().unwrap().nu - 10.4).abs() < 1e-12);
        assert!(Preset::by_name("fig5").is_err());
    }

    #[test]
    fn grids() {
        let g = Grid::default_for(BasisCase::Log, 5.0);
        assert_eq!((g.min, g.max, g.points), (0.002, 1.0, 400));
        let xs = g.xs();
        assert_eq!(xs.len(), 400);
        assert_eq!(*xs.last().unwrap(), 1.0);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(Grid::new(1.0, 1.0, 10).is_err());
    }
}
