//! Gauss-Laguerre and Gauss-Legendre rules computed by Newton iteration on
//! the polynomial roots.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_pos;

/// Largest supported Gauss-Laguerre order; the orthonormal recursion used to
/// locate roots overflows beyond this.
pub const MAX_LAGUERRE_ORDER: usize = 160;

/// Generalized Gauss-Laguerre rule for `∫_0^∞ y^α e^{-y} f(y) dy`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Orthonormal Laguerre values `q_0..q_{n}` at `y` with derivative of `q_n`.
fn orthonormal_laguerre(n: usize, alpha: f64, y: f64) -> (f64, f64, f64) {
    // returns (q_n, q_n', Σ_{j<n} q_j²)
    let mut q_prev = 0.0;
    let mut q = 1.0;
    let mut dq_prev = 0.0;
    let mut dq = 0.0;
    let mut sumsq = 0.0;
    for j in 0..n {
        sumsq += q * q;
        let jf = j as f64;
        let b_next = ((jf + 1.0) * (jf + alpha + 1.0)).sqrt();
        let b_cur = (jf * (jf + alpha)).sqrt();
        let diag = 2.0 * jf + alpha + 1.0;
        let q_next = ((diag - y) * q - b_cur * q_prev) / b_next;
        let dq_next = ((diag - y) * dq - q - b_cur * dq_prev) / b_next;
        q_prev = q;
        q = q_next;
        dq_prev = dq;
        dq = dq_next;
    }
    (q, dq, sumsq)
}

impl GaussLaguerre {
    pub fn new(order: usize, alpha: f64) -> Result<Self> {
        if order == 0 || order > MAX_LAGUERRE_ORDER {
            return Err(Error::Parameter(format!(
                "Gauss-Laguerre order {order} outside 1..={MAX_LAGUERRE_ORDER}"
            )));
        }
        if !(alpha > -1.0) {
            return Err(Error::Parameter(format!(
                "Gauss-Laguerre alpha {alpha} <= -1"
            )));
        }
        let n = order;
        let nf = n as f64;
        let ln_mu0 = ln_gamma_pos(alpha + 1.0);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = 0.0;
        for i in 0..n {
            // initial guesses after Stroud & Secrest
            z = match i {
                0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
                1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                        * (z - nodes[i - 2])
                        / (1.0 + 0.3 * alpha)
                }
            };
            let mut converged = false;
            for _ in 0..100 {
                let (q, dq, _) = orthonormal_laguerre(n, alpha, z);
                let step = q / dq;
                z -= step;
                if step.abs() <= 1e-12 * z.abs() {
                    // one polishing step
                    let (q, dq, _) = orthonormal_laguerre(n, alpha, z);
                    z -= q / dq;
                    converged = true;
                    break;
                }
            }
            if !converged || !(z > 0.0) || (i > 0 && z <= nodes[i - 1]) {
                return Err(Error::Convergence(format!(
                    "Gauss-Laguerre root {i} of order {n} (alpha = {alpha})"
                )));
            }
            let (_, _, sumsq) = orthonormal_laguerre(n, alpha, z);
            nodes.push(z);
            weights.push((ln_mu0 - sumsq.ln()).exp());
        }
        Ok(GaussLaguerre {
            alpha,
            nodes,
            weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i f(y_i) ≈ ∫_0^∞ y^α e^{-y} f(y) dy`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| w * f(y))
            .sum()
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Parameter(
                "Gauss-Legendre order must be positive".into(),
            ));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
                }
                dp = nf * (z * p1 - p2) / (z * z - 1.0);
                let step = p1 / dp;
                z -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
    }
}
