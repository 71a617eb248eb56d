//! Orthonormal continuous dual Hahn polynomials `S_n^μ(z²; a, b)`.
//!
//! The polynomial argument is always passed as `s = z²`; negative `s`
//! corresponds to imaginary `z`, which is where the discrete part of the
//! orthogonality measure lives when `μ < 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::specfun::{
    hyp_terminating, ln_gamma_modulus, ln_gamma_pos, log_gamma, pochhammer, terminating_sum,
    SignedLog,
};

/// Polynomial parameters `(μ, a, b)` plus the inverse length scale `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyParams {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

/// Shape of the orthogonality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `μ < 0`, `μ + a > 0`, `μ + b > 0`: continuum plus finitely many mass points.
    Mixed,
    /// `μ, a, b > 0`: purely continuous on `z ≥ 0`.
    Continuous,
}

impl PolyParams {
    pub fn new(mu: f64, a: f64, b: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(mu.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::Parameter("non-finite polynomial parameter".into()));
        }
        if mu < 0.0 {
            if mu == mu.floor() {
                return Err(Error::Parameter(format!(
                    "-mu must not be an integer, got mu = {mu}"
                )));
            }
            if !(mu + a > 0.0 && mu + b > 0.0) {
                return Err(Error::Parameter(format!(
                    "mixed regime needs mu + a > 0 and mu + b > 0 (mu = {mu}, a = {a}, b = {b})"
                )));
            }
        } else if mu == 0.0 {
            return Err(Error::Parameter(
                "mu = 0 puts a mass point on the band edge".into(),
            ));
        } else if !(a > 0.0 && b > 0.0) {
            return Err(Error::Parameter(format!(
                "continuous regime needs a, b > 0 (a = {a}, b = {b})"
            )));
        }
        Ok(PolyParams { mu, a, b, lambda })
    }

    /// `a = b = 1 - μ`.
    pub fn symmetric(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(mu, 1.0 - mu, 1.0 - mu, lambda)
    }

    pub fn regime(&self) -> Regime {
        if self.mu < 0.0 {
            Regime::Mixed
        } else {
            Regime::Continuous
        }
    }

    /// Largest bound-state index `floor(-μ)`, if any.
    pub fn max_bound_index(&self) -> Option<usize> {
        match self.regime() {
            Regime::Mixed => Some((-self.mu).floor() as usize),
            Regime::Continuous => None,
        }
    }

    pub fn bound_state_count(&self) -> usize {
        self.max_bound_index().map_or(0, |k| k + 1)
    }

    /// Diagonal recursion coefficient `a_n`.
    pub fn diagonal(&self, n: usize) -> f64 {
        let nf = n as f64;
        let (mu, a, b) = (self.mu, self.a, self.b);
        (nf + mu + a) * (nf + mu + b) + nf * (nf + a + b - 1.0) - mu * mu
    }

    /// Off-diagonal recursion coefficient `b_n`, the `(n, n+1)` entry.
    pub fn off_diagonal(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let (mu, a, b) = (self.mu, self.a, self.b);
        let radicand = (nf + 1.0) * (nf + a + b) * (nf + mu + a) * (nf + mu + b);
        if !(radicand > 0.0) {
            return Err(Error::Radicand {
                context: "recursion off-diagonal",
                value: radicand,
            });
        }
        Ok(-radicand.sqrt())
    }

    fn check_bound_index(&self, k: usize) -> Result<()> {
        match self.max_bound_index() {
            Some(max) if k <= max => Ok(()),
            Some(max) => Err(Error::Index { index: k, max }),
            None => Err(Error::Parameter(
                "no discrete spectrum in the continuous regime".into(),
            )),
        }
    }
}

/// `P_0(s) … P_{n_max}(s)` from the symmetric three-term recursion.
pub fn eval_recursion(p: &PolyParams, n_max: usize, s: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return Ok(out);
    }
    let mut b_prev = 0.0;
    for n in 0..n_max {
        let b_n = p.off_diagonal(n)?;
        let prev = if n == 0 { 0.0 } else { out[n - 1] };
        let next = ((s - p.diagonal(n)) * out[n] - b_prev * prev) / b_n;
        out.push(next);
        b_prev = b_n;
    }
    Ok(out)
}

/// Square root of `(μ+a)_n (μ+b)_n / (n! (a+b)_n)`.
fn ln_prefactor(p: &PolyParams, n: usize) -> Result<f64> {
    let radicand = pochhammer(p.mu + p.a, n) * pochhammer(p.mu + p.b, n)
        / (pochhammer(1.0, n) * pochhammer(p.a + p.b, n));
    if radicand.sign <= 0 {
        return Err(Error::Radicand {
            context: "orthonormal prefactor",
            value: radicand.to_f64(),
        });
    }
    Ok(0.5 * radicand.logmag)
}

fn snap_to_nonpositive_integer(x: f64) -> f64 {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= 1e-10 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `S_n^μ(s; a, b)` from the terminating `₃F₂` at unit argument, `s = z²`.
pub fn eval_hypergeometric(p: &PolyParams, n: usize, s: f64) -> Result<f64> {
    let pref = ln_prefactor(p, n)?.exp();
    let (mu, a, b) = (p.mu, p.a, p.b);
    let nf = n as f64;
    let sum = if s >= 0.0 {
        // (μ+iz)_j (μ-iz)_j = ∏ ((μ+i)² + z²)
        terminating_sum(n, |j| {
            let jf = j as f64;
            (jf - nf) * ((mu + jf) * (mu + jf) + s) / ((mu + a + jf) * (mu + b + jf) * (jf + 1.0))
        })
    } else {
        let w = (-s).sqrt();
        let up = snap_to_nonpositive_integer(mu + w);
        let down = snap_to_nonpositive_integer(mu - w);
        hyp_terminating(&[-nf, up, down], &[mu + a, mu + b], 1.0)?
    };
    Ok(pref * sum)
}

/// `S_n^μ(z_k²; a, b)` at the `k`-th discrete point, where the `₃F₂`
/// terminates after `min(n, k) + 1` terms.
pub fn eval_discrete(p: &PolyParams, n: usize, k: usize) -> Result<f64> {
    p.check_bound_index(k)?;
    let pref = ln_prefactor(p, n)?.exp();
    let kf = k as f64;
    let sum = hyp_terminating(
        &[-(n as f64), -kf, 2.0 * p.mu + kf],
        &[p.mu + p.a, p.mu + p.b],
        1.0,
    )?;
    Ok(pref * sum)
}

/// Continuous weight `ρ(z)` for `z > 0`.
pub fn weight_continuous(p: &PolyParams, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Parameter(format!(
            "continuous weight needs z > 0, got {z}"
        )));
    }
    let (mu, a, b) = (p.mu, p.a, p.b);
    let ln_num = ln_gamma_modulus(mu, z) + ln_gamma_modulus(a, z) + ln_gamma_modulus(b, z)
        - ln_gamma_modulus(0.0, 2.0 * z);
    let ln_den =
        (2.0 * PI).ln() + ln_gamma_pos(mu + a) + ln_gamma_pos(mu + b) + ln_gamma_pos(a + b);
    Ok((2.0 * ln_num - ln_den).exp())
}

/// Discrete weight `ω(z_k)`.
pub fn weight_discrete(p: &PolyParams, k: usize) -> Result<f64> {
    p.check_bound_index(k)?;
    let (mu, a, b) = (p.mu, p.a, p.b);
    let kf = k as f64;
    let gammas =
        log_gamma(a - mu)? * log_gamma(b - mu)? / (log_gamma(a + b)? * log_gamma(1.0 - 2.0 * mu)?);
    let bracket = SignedLog::from_f64(kf + mu)
        * pochhammer(mu + a, k)
        * pochhammer(mu + b, k)
        * pochhammer(1.0 - kf - 2.0 * mu, k)
        / (pochhammer(a - mu - kf, k) * pochhammer(b - mu - kf, k) * pochhammer(1.0, k));
    let omega = SignedLog::from_f64(-2.0) * gammas * bracket;
    if omega.sign != 1 {
        return Err(Error::Positivity {
            k,
            value: omega.to_f64(),
        });
    }
    Ok(omega.to_f64())
}

/// Discrete spectrum `z_k² = -(k+μ)²`, `k = 0..=floor(-μ)`.
pub fn spectrum_points(p: &PolyParams) -> Result<Vec<f64>> {
    let kmax = p
        .max_bound_index()
        .ok_or_else(|| Error::Parameter("no discrete spectrum in the continuous regime".into()))?;
    Ok((0..=kmax)
        .map(|k| {
            let t = k as f64 + p.mu;
            -t * t
        })
        .collect())
}

/// Continuous and discrete parts of `⟨P_n, P_m⟩` under the full measure.
pub fn orthogonality_terms(
    p: &PolyParams,
    n: usize,
    m: usize,
    quad_order: usize,
) -> Result<(f64, f64)> {
    const PANEL: f64 = 1.0;
    const MAX_Z: f64 = 2000.0;
    let rule = GaussLegendre::new(quad_order)?;
    let top = n.max(m);
    let integrand = |z: f64| -> Result<f64> {
        let vals = eval_recursion(p, top, z * z)?;
        Ok(weight_continuous(p, z)? * vals[n] * vals[m])
    };
    let mut continuous = 0.0;
    let mut lo = 0.0;
    let mut prev_abs = f64::INFINITY;
    loop {
        let half = 0.5 * PANEL;
        let mid = lo + half;
        let mut panel = 0.0;
        let mut abs_panel = 0.0;
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let v = half * w * integrand(mid + half * t)?;
            panel += v;
            abs_panel += v.abs();
        }
        continuous += panel;
        // ρ decays like e^{-πz}, so once panels shrink below the threshold
        // the remaining tail is a few panels' worth
        if abs_panel < 1e-15 && abs_panel < prev_abs && lo > 1.0 {
            break;
        }
        prev_abs = abs_panel;
        lo += PANEL;
        if lo > MAX_Z {
            return Err(Error::Convergence(format!(
                "continuous orthogonality integral for (n, m) = ({n}, {m})"
            )));
        }
    }
    let discrete = match p.max_bound_index() {
        None => 0.0,
        Some(kmax) => {
            let mut acc = 0.0;
            for k in 0..=kmax {
                acc += weight_discrete(p, k)? * eval_discrete(p, n, k)? * eval_discrete(p, m, k)?;
            }
            acc
        }
    };
    Ok((continuous, discrete))
}

/// `|∫ρ P_n P_m dz + Σ_k ω_k P_n(z_k²) P_m(z_k²) - δ_{nm}|`.
pub fn orthogonality_residual(
    p: &PolyParams,
    n: usize,
    m: usize,
    quad_order: usize,
) -> Result<f64> {
    let (c, d) = orthogonality_terms(p, n, m, quad_order)?;
    let delta = if n == m { 1.0 } else { 0.0 };
    Ok((c + d - delta).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> PolyParams {
        PolyParams::symmetric(-4.2, 1.0).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(PolyParams::symmetric(-4.0, 1.0).is_err());
        assert!(PolyParams::new(-4.2, 3.0, 5.2, 1.0).is_err());
        assert!(PolyParams::new(-4.2, 5.2, 5.2, 0.0).is_err());
        assert!(PolyParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PolyParams::new(0.5, -1.0, 1.0, 1.0).is_err());
        assert_eq!(
            PolyParams::new(0.5, 1.0, 2.0, 1.0).unwrap().regime(),
            Regime::Continuous
        );
        assert_eq!(fig2().bound_state_count(), 5);
        assert_eq!(
            PolyParams::symmetric(-0.5, 1.0)
                .unwrap()
                .bound_state_count(),
            1
        );
    }

    #[test]
    fn recursion_first_terms() {
        let p = fig2();
        for s in [-7.0, 0.0, 3.3] {
            assert_eq!(eval_recursion(&p, 0, s).unwrap(), vec![1.0]);
        }
        // P_1(0) = (0 - Σ00) / Σ01, with Σ00 = (μ+a)(μ+b) - μ², Σ01 = -√((a+b)(μ+a)(μ+b))
        let (mu, a, b) = (-4.2f64, 5.2f64, 5.2f64);
        let s00 = (mu + a) * (mu + b) - mu * mu;
        let s01 = -((a + b) * (mu + a) * (mu + b)).sqrt();
        let p1 = eval_recursion(&p, 1, 0.0).unwrap()[1];
        assert!((p1 - (0.0 - s00) / s01).abs() < 1e-14);
    }

    #[test]
    fn hypergeometric_zero_degree_is_one() {
        let p = fig2();
        for s in [-20.0, -1.0, 0.0, 1.69, 50.0] {
            assert!((eval_hypergeometric(&p, 0, s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hypergeometric_matches_recursion() {
        let p = fig2();
        let s = 1.3 * 1.3;
        let r = eval_recursion(&p, 3, s).unwrap()[3];
        let h = eval_hypergeometric(&p, 3, s).unwrap();
        assert!(((r - h) / r).abs() <= 1e-10);
        // at a discrete point
        let z1 = spectrum_points(&p).unwrap()[1];
        let r = eval_recursion(&p, 2, z1).unwrap()[2];
        let h = eval_hypergeometric(&p, 2, z1).unwrap();
        let d = eval_discrete(&p, 2, 1).unwrap();
        assert!(((r - h) / r).abs() <= 1e-10);
        assert!(((r - d) / r).abs() <= 1e-10);
    }

    #[test]
    fn recursion_and_hypergeometric_agree_on_random_points() {
        let p = fig2();
        // fixed pseudo-random points in [-30, 30]
        let mut state = 0x2545_f491_u64;
        for _ in 0..12 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let s = -30.0 + 60.0 * ((state >> 11) as f64 / (1u64 << 53) as f64);
            let rec = eval_recursion(&p, 8, s).unwrap();
            for (n, r) in rec.iter().enumerate() {
                let h = eval_hypergeometric(&p, n, s).unwrap();
                assert!(
                    (r - h).abs() <= 1e-10 * r.abs().max(1.0),
                    "n = {n}, s = {s}: {r} vs {h}"
                );
            }
        }
    }

    #[test]
    fn recursion_output_has_degree_n() {
        let p = fig2();
        let nodes: Vec<f64> = (0..9).map(|i| -20.0 + 5.0 * i as f64).collect();
        let held_out = 7.3;
        for n in 1..=8 {
            let vals: Vec<f64> = nodes[..=n]
                .iter()
                .map(|&s| eval_recursion(&p, n, s).unwrap()[n])
                .collect();
            // Lagrange interpolation through n+1 points
            let interp: f64 = (0..=n)
                .map(|i| {
                    let li: f64 = (0..=n)
                        .filter(|&j| j != i)
                        .map(|j| (held_out - nodes[j]) / (nodes[i] - nodes[j]))
                        .product();
                    vals[i] * li
                })
                .sum();
            let direct = eval_recursion(&p, n, held_out).unwrap()[n];
            assert!((interp - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn continuous_weight_behaviour() {
        let p = fig2();
        for i in 1..=100 {
            assert!(weight_continuous(&p, 0.1 * i as f64).unwrap() > 0.0);
        }
        assert!(weight_continuous(&p, 10.0).unwrap() < weight_continuous(&p, 5.0).unwrap());
        assert!(weight_continuous(&p, 0.0).is_err());
    }

    #[test]
    fn discrete_weights() {
        let p = fig2();
        let w: Vec<f64> = (0..=4).map(|k| weight_discrete(&p, k).unwrap()).collect();
        assert!(w.iter().all(|&v| v > 0.0));
        assert!(w.iter().sum::<f64>() < 1.0);
        assert_eq!(
            weight_discrete(&p, 5),
            Err(Error::Index { index: 5, max: 4 })
        );
    }

    #[test]
    fn spectrum_formula() {
        assert_eq!(
            spectrum_points(&PolyParams::symmetric(-3.2, 1.0).unwrap())
                .unwrap()
                .len(),
            4
        );
        let z = spectrum_points(&PolyParams::symmetric(-4.7, 1.0).unwrap()).unwrap();
        assert!((z[0] + 22.09).abs() < 1e-12);
        assert!(z.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0));
        assert!(spectrum_points(&PolyParams::new(0.5, 1.0, 1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn low_order_orthonormality() {
        let p = fig2();
        assert!(orthogonality_residual(&p, 0, 0, 24).unwrap() <= 1e-8);
        assert!(orthogonality_residual(&p, 0, 1, 24).unwrap() <= 1e-8);
        // dropping the mass points breaks it
        let (c, _) = orthogonality_terms(&p, 0, 0, 24).unwrap();
        assert!((c - 1.0).abs() > 0.5);
    }

    #[test]
    fn continuous_regime_has_no_mass_points() {
        let p = PolyParams::new(0.7, 1.3, 2.1, 1.0).unwrap();
        let (_, d) = orthogonality_terms(&p, 1, 1, 24).unwrap();
        assert_eq!(d, 0.0);
        assert!(orthogonality_residual(&p, 1, 1, 24).unwrap() <= 1e-10);
    }
}
