//! Potential reconstruction `V(x) ≈ Σ_m φ_m(x) V_{m,c} / φ_c(x)` from one
//! column of `V = H - T`, plus bound-state wavefunctions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisCase, BasisSpec};
use crate::cdh::{eval_discrete, weight_discrete, PolyParams};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, energy_ladder};
use crate::kinetic::kinetic_matrix;
use crate::linalg::SymMatrix;
use crate::specfun::{laguerre_sequence, pairwise_sum};

/// Relative threshold below which `|φ_c(x)|` counts as a node.
pub const NODE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialCurve {
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
    pub case: BasisCase,
    pub params: PolyParams,
    pub basis: BasisSpec,
    pub order: usize,
    pub column: usize,
    pub includes_orbital: bool,
}

fn check_linkage(p: &PolyParams, spec: &BasisSpec) -> Result<()> {
    if p.lambda != spec.lambda {
        return Err(Error::Parameter(format!(
            "polynomial lambda {} differs from basis lambda {}",
            p.lambda, spec.lambda
        )));
    }
    Ok(())
}

/// `V = H - T` truncated to `order`.
pub fn potential_matrix(p: &PolyParams, spec: &BasisSpec, order: usize) -> Result<SymMatrix> {
    check_linkage(p, spec)?;
    build_hamiltonian(p, order)?.sub(&kinetic_matrix(spec, order)?)
}

fn check_grid(spec: &BasisSpec, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Parameter("empty grid".into()));
    }
    if !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Parameter("grid must be strictly increasing".into()));
    }
    let (lo, hi) = spec.domain();
    if let Some(&x) = xs.iter().find(|&&x| !(x > lo && x < hi)) {
        return Err(Error::Domain { x });
    }
    Ok(())
}

/// `V(x)` at one point from column `column` of `v`.
fn point_value(spec: &BasisSpec, v: &SymMatrix, column: usize, x: f64) -> Result<f64> {
    let order = v.order();
    let y = spec.coord_map(x)?;
    let lag = laguerre_sequence(order - 1, spec.nu, y);
    // φ_m/φ_c = (A_m/A_c) L_m/L_c; the envelope y^α e^{-βy} cancels
    let ln_ac = spec.ln_norm(column);
    let lc = lag[column];
    let terms: Vec<f64> = (0..order)
        .map(|m| (spec.ln_norm(m) - ln_ac).exp() * lag[m] / lc * v.get(m, column))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `|φ_c(x_i)| < NODE_THRESHOLD · max_i |φ_c(x_i)|` for each grid point.
/// Column 0 is nodeless in every basis and is never masked.
pub fn node_mask(spec: &BasisSpec, column: usize, xs: &[f64]) -> Result<Vec<bool>> {
    if column == 0 {
        return Ok(vec![false; xs.len()]);
    }
    let phi: Vec<f64> = xs
        .iter()
        .map(|&x| spec.eval_basis(column, x).map(f64::abs))
        .collect::<Result<_>>()?;
    let top = phi.iter().copied().fold(0.0, f64::max);
    Ok(phi.iter().map(|&f| f < NODE_THRESHOLD * top).collect())
}

/// Reconstruction from an already assembled potential matrix.
pub fn reconstruct_from_matrix(
    p: &PolyParams,
    spec: &BasisSpec,
    v: &SymMatrix,
    column: usize,
    xs: &[f64],
) -> Result<PotentialCurve> {
    check_linkage(p, spec)?;
    if column >= v.order() {
        return Err(Error::Index {
            index: column,
            max: v.order() - 1,
        });
    }
    check_grid(spec, xs)?;
    let mask = node_mask(spec, column, xs)?;
    if let Some(i) = mask.iter().position(|&m| m) {
        return Err(Error::NodeProximity { column, x: xs[i] });
    }
    let vs = xs
        .par_iter()
        .map(|&x| point_value(spec, v, column, x))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(i) = vs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Convergence(format!(
            "non-finite potential at x = {}",
            xs[i]
        )));
    }
    Ok(PotentialCurve {
        xs: xs.to_vec(),
        vs,
        case: spec.case,
        params: *p,
        basis: *spec,
        order: v.order(),
        column,
        includes_orbital: false,
    })
}

pub fn reconstruct_potential(
    p: &PolyParams,
    spec: &BasisSpec,
    order: usize,
    column: usize,
    xs: &[f64],
) -> Result<PotentialCurve> {
    let v = potential_matrix(p, spec, order)?;
    reconstruct_from_matrix(p, spec, &v, column, xs)
}

/// Like [`reconstruct_potential`] but drops grid points near nodes of
/// `φ_column`; returns the curve and the dropped abscissae.
pub fn reconstruct_potential_masked(
    p: &PolyParams,
    spec: &BasisSpec,
    order: usize,
    column: usize,
    xs: &[f64],
) -> Result<(PotentialCurve, Vec<f64>)> {
    check_grid(spec, xs)?;
    let mask = node_mask(spec, column, xs)?;
    let kept: Vec<f64> = xs
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| !m)
        .map(|(&x, _)| x)
        .collect();
    let dropped: Vec<f64> = xs
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(&x, _)| x)
        .collect();
    if kept.is_empty() {
        return Err(Error::NodeProximity { column, x: xs[0] });
    }
    let v = potential_matrix(p, spec, order)?;
    check_linkage(p, spec)?;
    let vs = kept
        .par_iter()
        .map(|&x| point_value(spec, &v, column, x))
        .collect::<Result<Vec<f64>>>()?;
    Ok((
        PotentialCurve {
            xs: kept,
            vs,
            case: spec.case,
            params: *p,
            basis: *spec,
            order,
            column,
            includes_orbital: false,
        },
        dropped,
    ))
}

/// Adds `ℓ(ℓ+1)/2x²`.
pub fn add_orbital(curve: &PotentialCurve, ell: u32) -> Result<PotentialCurve> {
    if curve.includes_orbital {
        return Err(Error::FlagMismatch("orbital term already included".into()));
    }
    if !curve.case.is_radial() {
        return Err(Error::Parameter(format!(
            "{} is not a radial problem",
            curve.case
        )));
    }
    if let Some(&x) = curve.xs.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Domain { x });
    }
    let c = 0.5 * ell as f64 * (ell as f64 + 1.0);
    let mut out = curve.clone();
    for (v, x) in out.vs.iter_mut().zip(&curve.xs) {
        *v += c / (x * x);
    }
    out.includes_orbital = true;
    Ok(out)
}

/// Max `|a - b|` between two curves on the same grid.
pub fn max_deviation(a: &PotentialCurve, b: &PotentialCurve) -> Result<f64> {
    if a.xs != b.xs {
        return Err(Error::Parameter("curves are on different grids".into()));
    }
    Ok(a.vs
        .iter()
        .zip(&b.vs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub k: usize,
    pub energy: f64,
    /// `√ω_k P_n(z_k²)` for `n < N`.
    pub amplitudes: Vec<f64>,
    /// `|√ω_k P_{N-1}(z_k²)|`.
    pub tail: f64,
}

/// Bound state `k` and `ψ_k` sampled on `xs`.
pub fn bound_state(
    p: &PolyParams,
    spec: &BasisSpec,
    k: usize,
    order: usize,
    xs: &[f64],
) -> Result<(BoundState, Vec<f64>)> {
    check_linkage(p, spec)?;
    if order == 0 {
        return Err(Error::Parameter("truncation order must be positive".into()));
    }
    let ladder = energy_ladder(p)?;
    if k >= ladder.count {
        return Err(Error::Index {
            index: k,
            max: ladder.count - 1,
        });
    }
    let w = weight_discrete(p, k)?.sqrt();
    let amplitudes = (0..order)
        .map(|n| Ok(w * eval_discrete(p, n, k)?))
        .collect::<Result<Vec<f64>>>()?;
    let psi = xs
        .par_iter()
        .map(|&x| {
            let phi = spec.eval_all(order - 1, x)?;
            let terms: Vec<f64> = phi.iter().zip(&amplitudes).map(|(f, a)| f * a).collect();
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    let tail = amplitudes[order - 1].abs();
    Ok((
        BoundState {
            k,
            energy: ladder.energies[k],
            amplitudes,
            tail,
        },
        psi,
    ))
}
