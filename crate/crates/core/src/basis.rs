//! Laguerre bases `φ_n(x) = A_n y^α e^{-βy} L_n^ν(y)` for the four coordinate
//! maps `y(x)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cdh::PolyParams;
use crate::error::{Error, Result};
use crate::quadrature::GaussLaguerre;
use crate::specfun::{laguerre, laguerre_sequence, ln_gamma_pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BasisCase {
    /// `y = λx`, 3D radial.
    CoulombLinear,
    /// `y = (λx)²`, 3D radial.
    Oscillator,
    /// `y = γ ln(1+λx)`.
    Log,
    /// `y = e^{λx}` on the whole line.
    Morse,
}

impl BasisCase {
    pub const ALL: [BasisCase; 4] = [
        BasisCase::CoulombLinear,
        BasisCase::Oscillator,
        BasisCase::Log,
        BasisCase::Morse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisCase::CoulombLinear => "COULOMB_LINEAR",
            BasisCase::Oscillator => "OSCILLATOR",
            BasisCase::Log => "LOG",
            BasisCase::Morse => "MORSE",
        }
    }

    /// Radial problems carry an angular momentum `ℓ` and an orbital term.
    pub fn is_radial(self) -> bool {
        matches!(self, BasisCase::CoulombLinear | BasisCase::Oscillator)
    }
}

impl fmt::Display for BasisCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        BasisCase::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| Error::Parameter(format!("unknown basis case '{s}'")))
    }
}

/// A fully specified basis. Construct through [`BasisSpec::new`] or the
/// per-case helpers so that the `(α, β, ν)` linkage is checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub case: BasisCase,
    pub lambda: f64,
    pub nu: f64,
    pub gamma: Option<f64>,
    pub ell: Option<u32>,
    pub two_alpha: f64,
    pub two_beta: f64,
}

/// `y′ = C y^p e^{s y}` written in terms of `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jacobian {
    c: f64,
    p: f64,
    s: f64,
}

impl BasisSpec {
    pub fn new(
        case: BasisCase,
        lambda: f64,
        nu: f64,
        gamma: Option<f64>,
        ell: Option<u32>,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(nu > -1.0 && nu.is_finite()) {
            return Err(Error::Parameter(format!("nu must exceed -1, got {nu}")));
        }
        if case.is_radial() != ell.is_some() {
            return Err(Error::Parameter(format!(
                "{case} {} an angular momentum",
                if case.is_radial() {
                    "needs"
                } else {
                    "does not take"
                }
            )));
        }
        if (case == BasisCase::Log) != gamma.is_some() {
            return Err(Error::Parameter(format!(
                "gamma is required for LOG and only for LOG (case {case})"
            )));
        }
        let (two_alpha, two_beta) = match case {
            BasisCase::CoulombLinear => {
                let l = ell.unwrap_or(0) as f64;
                check_linkage(nu, 2.0 * (l + 1.0), "nu = 2(l+1)")?;
                (nu, 1.0)
            }
            BasisCase::Oscillator => {
                let l = ell.unwrap_or(0) as f64;
                check_linkage(nu, l + 0.5, "nu = l + 1/2")?;
                (nu + 0.5, 1.0)
            }
            BasisCase::Log => {
                let g = gamma.unwrap_or(0.0);
                if !(g > 0.0 && g.is_finite()) {
                    return Err(Error::Parameter(format!("gamma must be positive, got {g}")));
                }
                (nu, 1.0 + 1.0 / g)
            }
            BasisCase::Morse => (nu + 1.0, 1.0),
        };
        let spec = BasisSpec {
            case,
            lambda,
            nu,
            gamma,
            ell,
            two_alpha,
            two_beta,
        };
        spec.check_weight_identity()?;
        Ok(spec)
    }

    pub fn coulomb_linear(lambda: f64, ell: u32) -> Result<Self> {
        Self::new(
            BasisCase::CoulombLinear,
            lambda,
            2.0 * (ell as f64 + 1.0),
            None,
            Some(ell),
        )
    }

    pub fn oscillator(lambda: f64, ell: u32) -> Result<Self> {
        Self::new(
            BasisCase::Oscillator,
            lambda,
            ell as f64 + 0.5,
            None,
            Some(ell),
        )
    }

    pub fn log(lambda: f64, gamma: f64, nu: f64) -> Result<Self> {
        Self::new(BasisCase::Log, lambda, nu, Some(gamma), None)
    }

    pub fn morse(lambda: f64, nu: f64) -> Result<Self> {
        Self::new(BasisCase::Morse, lambda, nu, None, None)
    }

    /// Basis linked to polynomial parameters: λ is shared, LOG and MORSE take
    /// `ν = 1 - 2μ`, the radial cases take ν from `ℓ`.
    pub fn for_params(
        case: BasisCase,
        p: &PolyParams,
        ell: Option<u32>,
        gamma: Option<f64>,
    ) -> Result<Self> {
        let nu = match case {
            BasisCase::CoulombLinear => 2.0 * (ell.unwrap_or(0) as f64 + 1.0),
            BasisCase::Oscillator => ell.unwrap_or(0) as f64 + 0.5,
            BasisCase::Log | BasisCase::Morse => 1.0 - 2.0 * p.mu,
        };
        Self::new(case, p.lambda, nu, gamma, ell)
    }

    pub fn alpha(&self) -> f64 {
        0.5 * self.two_alpha
    }

    pub fn beta(&self) -> f64 {
        0.5 * self.two_beta
    }

    /// Angular momentum, 0 for one-dimensional cases.
    pub fn ell_or_zero(&self) -> u32 {
        self.ell.unwrap_or(0)
    }

    /// `τ = 2/γ` for the LOG case.
    pub fn tau(&self) -> Option<f64> {
        self.gamma.map(|g| 2.0 / g)
    }

    fn jacobian(&self) -> Jacobian {
        let l = self.lambda;
        match self.case {
            BasisCase::CoulombLinear => Jacobian {
                c: l,
                p: 0.0,
                s: 0.0,
            },
            BasisCase::Oscillator => Jacobian {
                c: 2.0 * l,
                p: 0.5,
                s: 0.0,
            },
            BasisCase::Log => {
                let g = self.gamma.unwrap_or(1.0);
                Jacobian {
                    c: g * l,
                    p: 0.0,
                    s: -1.0 / g,
                }
            }
            BasisCase::Morse => Jacobian {
                c: l,
                p: 1.0,
                s: 0.0,
            },
        }
    }

    /// Square of the per-row extra normalization factor (1, 2, γ, 1).
    fn extra_factor_sq(&self) -> f64 {
        match self.case {
            BasisCase::Oscillator => 2.0,
            BasisCase::Log => self.gamma.unwrap_or(1.0),
            _ => 1.0,
        }
    }

    /// `|φ_n|² dx` must reduce to `A_n² y^ν e^{-y} L_n² dy` up to the unit
    /// constant, so `2α - p = ν`, `2β + s = 1` and `extra² λ / C = 1`.
    fn check_weight_identity(&self) -> Result<()> {
        let j = self.jacobian();
        let power = self.two_alpha - j.p;
        let decay = self.two_beta + j.s;
        let constant = self.extra_factor_sq() * self.lambda / j.c;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        if close(power, self.nu) && close(decay, 1.0) && close(constant, 1.0) {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "{} weight identity broken: y^{power} e^(-{decay} y), constant {constant}",
                self.case
            )))
        }
    }

    /// Closed interval of admissible `x`.
    pub fn domain(&self) -> (f64, f64) {
        match self.case {
            BasisCase::Morse => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let (lo, _) = self.domain();
        if x.is_nan() || x < lo || x == f64::INFINITY {
            return Err(Error::Domain { x });
        }
        Ok(())
    }

    pub fn coord_map(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let l = self.lambda;
        Ok(match self.case {
            BasisCase::CoulombLinear => l * x,
            BasisCase::Oscillator => (l * x) * (l * x),
            BasisCase::Log => self.gamma.unwrap_or(1.0) * (l * x).ln_1p(),
            BasisCase::Morse => (l * x).exp(),
        })
    }

    /// `dy/dx`.
    pub fn coord_derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let l = self.lambda;
        Ok(match self.case {
            BasisCase::CoulombLinear => l,
            BasisCase::Oscillator => 2.0 * l * l * x,
            BasisCase::Log => self.gamma.unwrap_or(1.0) * l / (1.0 + l * x),
            BasisCase::Morse => l * (l * x).exp(),
        })
    }

    /// `dy/dx` written as a function of `y`.
    pub fn coord_derivative_y(&self, y: f64) -> f64 {
        let j = self.jacobian();
        j.c * y.powf(j.p) * (j.s * y).exp()
    }

    /// `x(y)` for `y ≥ 0` (`y > 0` for MORSE).
    pub fn inverse_map(&self, y: f64) -> Result<f64> {
        let bad = || {
            Error::Parameter(format!(
                "y = {y} outside the range of the {} map",
                self.case
            ))
        };
        if y.is_nan() || y < 0.0 || (self.case == BasisCase::Morse && y == 0.0) {
            return Err(bad());
        }
        let l = self.lambda;
        Ok(match self.case {
            BasisCase::CoulombLinear => y / l,
            BasisCase::Oscillator => y.sqrt() / l,
            BasisCase::Log => (y / self.gamma.unwrap_or(1.0)).exp_m1() / l,
            BasisCase::Morse => y.ln() / l,
        })
    }

    /// `ln` of the full normalization `√λ · extra · √(n!/Γ(n+ν+1))`.
    pub fn ln_norm(&self, n: usize) -> f64 {
        0.5 * (self.lambda.ln() + self.extra_factor_sq().ln())
            + 0.5 * (ln_gamma_pos(n as f64 + 1.0) - ln_gamma_pos(n as f64 + self.nu + 1.0))
    }

    /// `ln(y^α e^{-βy})`; `-∞` at `y = 0`.
    fn ln_envelope(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return match self.two_alpha {
                a if a > 0.0 => Ok(f64::NEG_INFINITY),
                0.0 => Ok(0.0),
                _ => Err(Error::Domain { x: 0.0 }),
            };
        }
        Ok(self.alpha() * y.ln() - self.beta() * y)
    }

    /// `φ_n` as a function of `y`.
    pub fn eval_basis_y(&self, n: usize, y: f64) -> Result<f64> {
        let env = self.ln_envelope(y)?;
        if env == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok((self.ln_norm(n) + env).exp() * laguerre(n, self.nu, y))
    }

    /// `φ_n(x)`; boundary points return the limiting value 0.
    pub fn eval_basis(&self, n: usize, x: f64) -> Result<f64> {
        if self.case == BasisCase::Morse && x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        self.eval_basis_y(n, self.coord_map(x)?)
    }

    /// `φ_0(x) … φ_{n_max}(x)`.
    pub fn eval_all(&self, n_max: usize, x: f64) -> Result<Vec<f64>> {
        if self.case == BasisCase::Morse && x == f64::NEG_INFINITY {
            return Ok(vec![0.0; n_max + 1]);
        }
        let y = self.coord_map(x)?;
        let env = self.ln_envelope(y)?;
        if env == f64::NEG_INFINITY {
            return Ok(vec![0.0; n_max + 1]);
        }
        Ok(laguerre_sequence(n_max, self.nu, y)
            .into_iter()
            .enumerate()
            .map(|(n, l)| (self.ln_norm(n) + env).exp() * l)
            .collect())
    }

    /// `⟨φ_n|φ_m⟩ = ∫ φ_n φ_m dy/y′` by Gauss-Laguerre quadrature in `y`,
    /// going through [`eval_basis`](Self::eval_basis) and the inverse map.
    pub fn overlap(&self, n: usize, m: usize, order: usize) -> Result<f64> {
        let rule = GaussLaguerre::new(order, self.nu)?;
        let mut acc = 0.0;
        for (&y, &w) in rule.nodes().iter().zip(rule.weights()) {
            let x = self.inverse_map(y)?;
            let f = self.eval_basis(n, x)? * self.eval_basis(m, x)? / self.coord_derivative(x)?;
            // divide out the rule's weight y^ν e^{-y}
            acc += w * f * (y - self.nu * y.ln()).exp();
        }
        Ok(acc)
    }
}

fn check_linkage(nu: f64, want: f64, rule: &str) -> Result<()> {
    if (nu - want).abs() > 1e-12 * want.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "basis linkage {rule} violated: nu = {nu}, expected {want}"
        )));
    }
    Ok(())
}
