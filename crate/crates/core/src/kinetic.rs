//! Kinetic-energy matrices `T_{n,m} = ⟨φ_n|T|φ_m⟩` in closed form for each
//! basis, and a finite-difference quadrature oracle.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisCase, BasisSpec};
use crate::error::{Error, Result};
use crate::lagint::{j_power, FMinusTable};
use crate::linalg::SymMatrix;
use crate::quadrature::{GaussLaguerre, MAX_LAGUERRE_ORDER};
use crate::specfun::ln_gamma_pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KineticMethod {
    Analytic,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticBuild {
    pub spec: BasisSpec,
    pub order: usize,
    pub matrix: SymMatrix,
    pub method: KineticMethod,
}

impl KineticBuild {
    pub fn analytic(spec: &BasisSpec, order: usize) -> Result<Self> {
        Ok(KineticBuild {
            spec: *spec,
            order,
            matrix: kinetic_matrix(spec, order)?,
            method: KineticMethod::Analytic,
        })
    }

    pub fn oracle(spec: &BasisSpec, order: usize, quad_order: usize) -> Result<Self> {
        Ok(KineticBuild {
            spec: *spec,
            order,
            matrix: t_oracle_matrix(spec, order, quad_order)?,
            method: KineticMethod::Oracle,
        })
    }
}

fn require_case(spec: &BasisSpec, case: BasisCase) -> Result<()> {
    if spec.case != case {
        return Err(Error::Parameter(format!(
            "expected a {case} basis, got {}",
            spec.case
        )));
    }
    Ok(())
}

fn require_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::Parameter("matrix order must be positive".into()));
    }
    Ok(())
}

/// Analytic `T` for whichever case `spec` describes.
pub fn kinetic_matrix(spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    match spec.case {
        BasisCase::CoulombLinear => t_coulomb_linear(spec, order),
        BasisCase::Oscillator => t_oscillator(spec, order),
        BasisCase::Log => t_log(spec, order),
        BasisCase::Morse => t_morse(spec, order),
    }
}

pub fn t_coulomb_linear(spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    require_case(spec, BasisCase::CoulombLinear)?;
    require_order(order)?;
    let l = spec.ell_or_zero() as f64;
    if (spec.nu - 2.0 * (l + 1.0)).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "nu = {} breaks nu = 2(l+1)",
            spec.nu
        )));
    }
    let scale = 0.25 * spec.lambda * spec.lambda;
    let width = 2.0 * l + 2.0;
    // ln (n+1)_{2l+2}
    let ln_poch = |n: usize| ln_gamma_pos(n as f64 + 1.0 + width) - ln_gamma_pos(n as f64 + 1.0);
    let q = 2.0 * l + 3.0;
    SymMatrix::from_upper(order, None, |n, m| {
        let v = if n == m {
            0.5 + 2.0 * n as f64 / q
        } else {
            // m > n on the upper triangle
            (0.5 * (ln_poch(n) - ln_poch(m))).exp() * (1.0 + 2.0 * n as f64 / q)
        };
        Ok(scale * v)
    })
}

pub fn t_oscillator(spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    require_case(spec, BasisCase::Oscillator)?;
    require_order(order)?;
    let l = spec.ell_or_zero() as f64;
    if (spec.nu - (l + 0.5)).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "nu = {} breaks nu = l + 1/2",
            spec.nu
        )));
    }
    let scale = 0.5 * spec.lambda * spec.lambda;
    SymMatrix::from_upper(order, Some(1), |n, m| {
        let nf = n as f64;
        let v = if n == m {
            2.0 * nf + l + 1.5
        } else {
            ((nf + 1.0) * (nf + l + 1.5)).sqrt()
        };
        debug_assert!(m <= n + 1);
        Ok(scale * v)
    })
}

pub fn t_log(spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    require_case(spec, BasisCase::Log)?;
    require_order(order)?;
    let nu = spec.nu;
    if !(nu > 1.0) {
        return Err(Error::Precondition(format!(
            "LOG kinetic matrix needs nu > 1, got {nu}"
        )));
    }
    let gamma = spec
        .gamma
        .ok_or_else(|| Error::Parameter("LOG basis without gamma".into()))?;
    let tau = 2.0 / gamma;
    let f0 = FMinusTable::new(nu, 0, tau, order)?;
    let f1 = FMinusTable::new(nu, 1, tau, order)?;
    let f2 = FMinusTable::new(nu, 2, tau, order)?;
    let c0 = -0.25 * (1.0 + 0.5 * tau) * (1.0 + 1.5 * tau);
    let half = |n: usize, m: usize| -> f64 {
        let mf = m as f64;
        let mut v = c0 * f0.get(n, m)
            + (1.0 + tau) * (mf + 0.5 * nu) * f1.get(n, m)
            + 0.5 * (2.0 * mf + nu - 0.5 * nu * nu) * f2.get(n, m);
        if m > 0 {
            v -= (mf * (mf + nu)).sqrt() * (tau * f1.get(n, m - 1) + f2.get(n, m - 1));
        }
        v
    };
    let scale = 0.25 * (gamma * spec.lambda).powi(2);
    SymMatrix::from_upper(order, None, |n, m| Ok(scale * (half(n, m) + half(m, n))))
}

pub fn t_morse(spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    require_case(spec, BasisCase::Morse)?;
    require_order(order)?;
    let nu = spec.nu;
    // J² from a size N+2 truncation is exact on the leading N×N block
    let j2 = j_power(nu, 2, order + 2)?;
    let scale = 0.25 * spec.lambda * spec.lambda;
    SymMatrix::from_upper(order, Some(2), |n, m| {
        let nf = n as f64;
        let mut v = -0.5 * j2.get(n, m);
        if n == m {
            v += (2.0 * nf + nu + 1.0).powi(2) + 0.5 * (1.0 - nu * nu);
        } else if m == n + 1 {
            v -= (2.0 * nf + nu + 2.0) * ((nf + 1.0) * (nf + nu + 1.0)).sqrt();
        }
        Ok(scale * v)
    })
}

/// Offsets and weights of the 8th-order central first-derivative stencil.
const STENCIL: [(f64, f64); 8] = [
    (-4.0, 1.0 / 280.0),
    (-3.0, -4.0 / 105.0),
    (-2.0, 1.0 / 5.0),
    (-1.0, -4.0 / 5.0),
    (1.0, 4.0 / 5.0),
    (2.0, -1.0 / 5.0),
    (3.0, 4.0 / 105.0),
    (4.0, -1.0 / 280.0),
];

/// One quadrature pass over all `n, m < size`: returns the matrix and the
/// absolute integrand mass used as the stability scale.
fn oracle_pass(spec: &BasisSpec, size: usize, quad_order: usize) -> Result<(Vec<f64>, f64)> {
    // (dφ/dy)² y′ ~ y^{2α-2+p} e^{-(2β-s)y}; the orbital term has the same shape
    let (p, s) = match spec.case {
        BasisCase::CoulombLinear => (0.0, 0.0),
        BasisCase::Oscillator => (0.5, 0.0),
        BasisCase::Log => (0.0, -1.0 / spec.gamma.unwrap_or(1.0)),
        BasisCase::Morse => (1.0, 0.0),
    };
    let q = spec.two_alpha - 2.0 + p;
    let c = spec.two_beta - s;
    let rule = GaussLaguerre::new(quad_order, q)?;
    let ell = spec.ell_or_zero() as f64;
    let orbital = 0.5 * ell * (ell + 1.0);
    let mut acc = vec![0.0; size * size];
    let mut mass = 0.0;
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let y = t / c;
        let h = 1e-3 * y.min(1.0);
        let mut dphi = vec![0.0; size];
        for &(off, coef) in &STENCIL {
            let vals = spec.eval_all(size - 1, spec.inverse_map(y + off * h)?)?;
            for (d, v) in dphi.iter_mut().zip(vals) {
                *d += coef * v;
            }
        }
        for d in dphi.iter_mut() {
            *d /= h;
        }
        let x = spec.inverse_map(y)?;
        let yp = spec.coord_derivative(x)?;
        let phi = if orbital != 0.0 {
            spec.eval_all(size - 1, x)?
        } else {
            Vec::new()
        };
        // ∫ g(y) dy = (1/c) ∫ t^q e^{-t} [g(t/c) / (t^q e^{-t})] dt
        let jac = w / c * (t - q * t.ln()).exp();
        for n in 0..size {
            for m in 0..size {
                let mut g = 0.5 * dphi[n] * dphi[m] * yp;
                if orbital != 0.0 {
                    g += orbital * phi[n] * phi[m] / (x * x * yp);
                }
                let v = jac * g;
                acc[n * size + m] += v;
                mass += v.abs();
            }
        }
    }
    Ok((acc, mass / (size * size) as f64))
}

/// Quadrature estimate of `T` for `n, m < size`, doubling the Gauss-Laguerre
/// order from `quad_order` until successive passes agree to `1e-10`.
pub fn t_oracle_matrix(spec: &BasisSpec, size: usize, quad_order: usize) -> Result<SymMatrix> {
    require_order(size)?;
    let mut ord = quad_order.clamp(2, MAX_LAGUERRE_ORDER);
    let (mut prev, _) = oracle_pass(spec, size, ord)?;
    while ord < MAX_LAGUERRE_ORDER {
        ord = (2 * ord).min(MAX_LAGUERRE_ORDER);
        let (next, mass) = oracle_pass(spec, size, ord)?;
        let stable = next
            .iter()
            .zip(&prev)
            .all(|(a, b)| (a - b).abs() <= 1e-10 * a.abs().max(mass));
        if stable {
            // average the two triangles so the result is exactly symmetric
            return SymMatrix::from_upper(size, None, |n, m| {
                Ok(0.5 * (next[n * size + m] + next[m * size + n]))
            });
        }
        prev = next;
    }
    Err(Error::Convergence(format!(
        "kinetic oracle for {} at size {size}",
        spec.case
    )))
}

/// Single oracle entry `⟨φ_n|T|φ_m⟩`.
pub fn t_oracle(spec: &BasisSpec, n: usize, m: usize, quad_order: usize) -> Result<f64> {
    Ok(t_oracle_matrix(spec, n.max(m) + 1, quad_order)?.get(n, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_specs() -> Vec<BasisSpec> {
        vec![
            BasisSpec::coulomb_linear(1.0, 3).unwrap(),
            BasisSpec::oscillator(1.0, 2).unwrap(),
            BasisSpec::log(5.0, 2.0, 9.4).unwrap(),
            BasisSpec::morse(1.0, 10.4).unwrap(),
        ]
    }

    fn compare(analytic: &SymMatrix, oracle: &SymMatrix, size: usize, tol: f64) {
        let top = (0..size)
            .flat_map(|n| (0..size).map(move |m| (n, m)))
            .map(|(n, m)| analytic.get(n, m).abs())
            .fold(0.0, f64::max);
        for n in 0..size {
            for m in 0..size {
                let (a, o) = (analytic.get(n, m), oracle.get(n, m));
                // zero by structure, up to cancellation roundoff
                if a.abs() <= 1e-12 * top {
                    assert!(o.abs() <= tol * top, "({n},{m}) structural zero vs {o}");
                } else {
                    assert!(((a - o) / a).abs() <= tol, "({n},{m}): {a} vs {o}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let cl = t_coulomb_linear(&fig_specs()[0], 4).unwrap();
        assert!((cl.get(0, 0) - 0.125).abs() < 1e-15);
        let osc = t_oscillator(&fig_specs()[1], 4).unwrap();
        assert!((osc.get(0, 0) - 1.75).abs() < 1e-15);
        assert!((osc.get(1, 0) - 0.5 * 3.5f64.sqrt()).abs() < 1e-15);
        let nu = 10.4;
        let morse = t_morse(&fig_specs()[3], 4).unwrap();
        let j2 = (nu + 1.0) * (nu + 1.0) + (nu + 1.0);
        let want = 0.25 * (-0.5 * j2 + (nu + 1.0) * (nu + 1.0) + 0.5 * (1.0 - nu * nu));
        assert!((morse.get(0, 0) - want).abs() < 1e-13);
        assert!(morse.get(1, 0).abs() < 1e-13);
    }

    #[test]
    fn builders_reject_wrong_case() {
        let specs = fig_specs();
        assert!(t_oscillator(&specs[0], 3).is_err());
        assert!(t_morse(&specs[2], 3).is_err());
        let mut bad = specs[0];
        bad.nu = 7.0;
        assert!(t_coulomb_linear(&bad, 3).is_err());
        assert!(t_log(&BasisSpec::log(1.0, 2.0, 0.8).unwrap(), 3).is_err());
    }

    #[test]
    fn bandwidth_and_symmetry() {
        for spec in fig_specs() {
            let b = KineticBuild::analytic(&spec, 12).unwrap();
            assert!(b.matrix.is_symmetric());
            assert!(b.matrix.respects_band());
            let want = match spec.case {
                BasisCase::Oscillator => Some(1),
                BasisCase::Morse => Some(2),
                _ => None,
            };
            assert_eq!(b.matrix.bandwidth(), want);
        }
    }

    #[test]
    fn analytic_matches_oracle() {
        let tols = [1e-8, 1e-10, 1e-7, 1e-9];
        let sizes = [9, 9, 7, 9];
        for ((spec, tol), size) in fig_specs().into_iter().zip(tols).zip(sizes) {
            let a = kinetic_matrix(&spec, size).unwrap();
            let o = t_oracle_matrix(&spec, size, 40).unwrap();
            compare(&a, &o, size, tol);
        }
    }

    #[test]
    fn oracle_without_orbital_term() {
        let spec = BasisSpec::coulomb_linear(1.0, 0).unwrap();
        let a = t_coulomb_linear(&spec, 5).unwrap();
        let o = t_oracle_matrix(&spec, 5, 40).unwrap();
        compare(&a, &o, 5, 1e-8);
        let single = t_oracle(&spec, 3, 1, 40).unwrap();
        assert!(((single - a.get(3, 1)) / a.get(3, 1)).abs() < 1e-8);
    }

    #[test]
    fn lambda_scaling() {
        for spec in fig_specs() {
            let mut scaled = spec;
            scaled.lambda *= 3.0;
            let a = kinetic_matrix(&spec, 6).unwrap();
            let b = kinetic_matrix(&scaled, 6).unwrap();
            for (x, y) in a.entries().iter().zip(b.entries()) {
                assert!((y - 9.0 * x).abs() <= 1e-14 * y.abs());
            }
        }
    }

    #[test]
    fn large_log_matrix_is_finite() {
        let t = t_log(&fig_specs()[2], 200).unwrap();
        assert!(t.entries().iter().all(|v| v.is_finite()));
        assert!(t.is_symmetric());
    }
}
