//! The tridiagonal Σ matrix, `H = ½λ²Σ` and the bound-state energy ladder.

use serde::{Deserialize, Serialize};

use crate::cdh::PolyParams;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Bound-state energies `E_k`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLadder {
    pub energies: Vec<f64>,
    pub count: usize,
}

pub fn build_sigma(p: &PolyParams, order: usize) -> Result<SymMatrix> {
    if order == 0 {
        return Err(Error::Parameter("matrix order must be positive".into()));
    }
    SymMatrix::from_upper(order, Some(1), |i, j| {
        if i == j {
            Ok(p.diagonal(i))
        } else {
            p.off_diagonal(i)
        }
    })
}

pub fn build_hamiltonian(p: &PolyParams, order: usize) -> Result<SymMatrix> {
    Ok(build_sigma(p, order)?.scaled(0.5 * p.lambda * p.lambda))
}

/// `E_k = -½λ²(k+μ)²` for `k = 0..=floor(-μ)`.
pub fn energy_ladder(p: &PolyParams) -> Result<SpectrumLadder> {
    let kmax = p
        .max_bound_index()
        .ok_or_else(|| Error::Parameter("no bound states in the continuous regime".into()))?;
    let energies: Vec<f64> = (0..=kmax)
        .map(|k| {
            let t = k as f64 + p.mu;
            -0.5 * p.lambda * p.lambda * t * t
        })
        .collect();
    Ok(SpectrumLadder {
        count: energies.len(),
        energies,
    })
}

/// Lowest `count` eigenvalues of `H` at truncation `order`.
pub fn lowest_eigenvalues(p: &PolyParams, order: usize, count: usize) -> Result<Vec<f64>> {
    let mut ev = build_hamiltonian(p, order)?.tridiagonal_eigenvalues()?;
    ev.truncate(count);
    Ok(ev)
}

/// Largest `|eigenvalue - E_k|` over the bound states at truncation `order`.
pub fn ladder_deviation(p: &PolyParams, order: usize) -> Result<f64> {
    let ladder = energy_ladder(p)?;
    let ev = lowest_eigenvalues(p, order, ladder.count)?;
    if ev.len() < ladder.count {
        return Err(Error::Parameter(format!(
            "order {order} smaller than the {} bound states",
            ladder.count
        )));
    }
    Ok(ev
        .iter()
        .zip(&ladder.energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
