//! Laguerre integrals
//! `F±_{n,m}(k, τ) = A_n A_m ∫_0^∞ y^{ν±k} e^{-(1+τ)y} L_n^ν(y) L_m^ν(y) dy`
//! with `A_n = √(n!/Γ(n+ν+1))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::quadrature::{GaussLaguerre, MAX_LAGUERRE_ORDER};
use crate::specfun::{
    hyp_terminating, laguerre, ln_gamma_pos, ln_poch_over_factorial, ln_positive_terminating_sum,
    poch_over_factorial,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// One member of the integral family, independent of `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralKey {
    pub sign: Sign,
    pub k: usize,
    pub tau: f64,
    pub nu: f64,
}

impl IntegralKey {
    pub fn new(sign: Sign, k: usize, tau: f64, nu: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Precondition(format!(
                "tau must be finite and >= 0, got {tau}"
            )));
        }
        match sign {
            Sign::Plus if tau != 0.0 => {
                return Err(Error::Precondition(
                    "F+ is only defined here for tau = 0".into(),
                ))
            }
            Sign::Plus if !(nu > -1.0) => {
                return Err(Error::Precondition(format!("F+ needs nu > -1, got {nu}")))
            }
            Sign::Minus => check_minus(nu, k)?,
            _ => {}
        }
        Ok(IntegralKey { sign, k, tau, nu })
    }

    /// Closed-form value.
    pub fn evaluate(&self, n: usize, m: usize) -> Result<f64> {
        match self.sign {
            Sign::Plus => f_plus(self.nu, self.k, n, m, n.max(m) + self.k + 1),
            Sign::Minus => f_minus(self.nu, self.k, self.tau, n, m),
        }
    }

    pub fn oracle(&self, n: usize, m: usize, order: usize) -> Result<f64> {
        quad_oracle(self.nu, self.sign, self.k, self.tau, n, m, order)
    }
}

fn check_minus(nu: f64, k: usize) -> Result<()> {
    if !(nu > k as f64 - 1.0) {
        return Err(Error::Precondition(format!(
            "F- with k = {k} needs nu > k - 1, got nu = {nu}"
        )));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Precondition(format!(
            "tau must be finite and >= 0, got {tau}"
        )));
    }
    Ok(())
}

fn ln_a(n: usize, nu: f64) -> f64 {
    0.5 * (ln_gamma_pos(n as f64 + 1.0) - ln_gamma_pos(n as f64 + nu + 1.0))
}

/// Tridiagonal `J` with diagonal `2n+ν+1` and off-diagonal `-√((n+1)(n+ν+1))`.
pub fn j_matrix(nu: f64, order: usize) -> Result<SymMatrix> {
    if !(nu > -1.0) {
        return Err(Error::Parameter(format!("J needs nu > -1, got {nu}")));
    }
    if order == 0 {
        return Err(Error::Parameter("matrix order must be positive".into()));
    }
    SymMatrix::from_upper(order, Some(1), |i, j| {
        let n = i as f64;
        Ok(if i == j {
            2.0 * n + nu + 1.0
        } else {
            -((n + 1.0) * (n + nu + 1.0)).sqrt()
        })
    })
}

/// `J^k` truncated to `order`; entries with `max(n, m) ≤ order - 1 - k` are exact.
pub fn j_power(nu: f64, k: usize, order: usize) -> Result<SymMatrix> {
    let j = j_matrix(nu, order)?;
    let mut cols: Vec<Vec<f64>> = (0..order)
        .map(|m| (0..order).map(|n| if n == m { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..k {
        for col in cols.iter_mut() {
            *col = tridiag_matvec(&j, col);
        }
    }
    SymMatrix::from_upper(order, Some(k), |n, m| Ok(cols[m][n]))
}

fn tridiag_matvec(j: &SymMatrix, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = j.get(i, i) * v[i];
            if i > 0 {
                acc += j.get(i, i - 1) * v[i - 1];
            }
            if i + 1 < n {
                acc += j.get(i, i + 1) * v[i + 1];
            }
            acc
        })
        .collect()
}

/// `F+_{n,m}(k, 0) = (J^k)_{n,m}` from a truncation of size `order`.
pub fn f_plus(nu: f64, k: usize, n: usize, m: usize, order: usize) -> Result<f64> {
    if n.max(m) + k + 1 > order {
        return Err(Error::Margin {
            n,
            m,
            k,
            needed: n.max(m) + k,
            order,
        });
    }
    let j = j_matrix(nu, order)?;
    let mut v: Vec<f64> = (0..order).map(|i| if i == m { 1.0 } else { 0.0 }).collect();
    for _ in 0..k {
        v = tridiag_matvec(&j, &v);
    }
    Ok(v[n])
}

/// Which closed form a table is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FMinusForm {
    /// `k = τ = 0`: the identity.
    Identity,
    /// General `τ > 0`, double `₂F₁` sum (Pfaff-transformed, all terms positive).
    General,
    /// `τ = 0`, `k ≥ 1`: Gauss-summed form.
    TauZero,
    /// `k = 0`, `τ > 0`.
    KZero,
}

impl FMinusForm {
    pub fn select(k: usize, tau: f64) -> Self {
        match (k, tau == 0.0) {
            (0, true) => FMinusForm::Identity,
            (_, true) => FMinusForm::TauZero,
            (0, false) => FMinusForm::KZero,
            _ => FMinusForm::General,
        }
    }
}

/// All `F-_{n,m}(k, τ)` for `n, m < size`.
///
/// Every closed form is `A_n A_m C Σ_j a_j e^{h(n,j) + h(m,j)}` with positive
/// summands, so the table stores `h` once and sums each entry in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FMinusTable {
    pub nu: f64,
    pub k: usize,
    pub tau: f64,
    pub form: FMinusForm,
    matrix: SymMatrix,
}

impl FMinusTable {
    pub fn new(nu: f64, k: usize, tau: f64, size: usize) -> Result<Self> {
        Self::with_form(FMinusForm::select(k, tau), nu, k, tau, size)
    }

    pub fn with_form(form: FMinusForm, nu: f64, k: usize, tau: f64, size: usize) -> Result<Self> {
        check_minus(nu, k)?;
        check_tau(tau)?;
        if size == 0 {
            return Err(Error::Parameter("table size must be positive".into()));
        }
        let kf = k as f64;
        match form {
            FMinusForm::Identity if k != 0 || tau != 0.0 => {
                return Err(Error::Precondition(
                    "identity form needs k = 0 and tau = 0".into(),
                ))
            }
            FMinusForm::TauZero if tau != 0.0 || k == 0 => {
                return Err(Error::Precondition(
                    "tau = 0 form needs tau = 0 and k >= 1".into(),
                ))
            }
            FMinusForm::KZero if k != 0 || tau == 0.0 => {
                return Err(Error::Precondition(
                    "k = 0 form needs k = 0 and tau > 0".into(),
                ))
            }
            FMinusForm::General if tau == 0.0 => {
                return Err(Error::Precondition("general form needs tau > 0".into()))
            }
            _ => {}
        }
        if form == FMinusForm::Identity {
            let matrix = SymMatrix::from_upper(size, Some(0), |_, _| Ok(1.0))?;
            return Ok(FMinusTable {
                nu,
                k,
                tau,
                form,
                matrix,
            });
        }

        let lt = (1.0 + tau).ln();
        let p = nu - kf + 1.0;
        let ln_pref = match form {
            FMinusForm::TauZero => ln_gamma_pos(p),
            _ => ln_gamma_pos(p) - p * lt,
        };
        let ln_aj: Vec<f64> = (0..size).map(|j| ln_poch_over_factorial(p, j)).collect();
        // h[n][j] for j ≤ n
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(size);
        for n in 0..size {
            let row = (0..=n)
                .map(|j| {
                    let np = n - j;
                    let c = j as f64 + nu + 1.0;
                    match form {
                        FMinusForm::TauZero => ln_poch_over_factorial(kf, np),
                        FMinusForm::KZero => {
                            ln_poch_over_factorial(c, np) + np as f64 * tau.ln() - n as f64 * lt
                        }
                        _ => {
                            // ₂F₁(-N′, b; c; z) = (1-z)^{N′} ₂F₁(-N′, c-b; c; z/(z-1)),
                            // z = 1/(1+τ), c - b = k, z/(z-1) = -1/τ
                            let ln_f = np as f64 * (tau.ln() - lt)
                                + ln_positive_terminating_sum(np, |i| {
                                    let fi = i as f64;
                                    (np as f64 - fi) * (kf + fi) / ((c + fi) * (fi + 1.0) * tau)
                                });
                            ln_poch_over_factorial(c, np) + ln_f - j as f64 * lt
                        }
                    }
                })
                .collect();
            h.push(row);
        }
        let ln_norm: Vec<f64> = (0..size).map(|n| ln_a(n, nu)).collect();
        let matrix = SymMatrix::from_upper(size, None, |n, m| {
            let lo = n.min(m);
            let terms: Vec<f64> = (0..=lo).map(|j| ln_aj[j] + h[n][j] + h[m][j]).collect();
            let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
            Ok((ln_norm[n] + ln_norm[m] + ln_pref + top + s.ln()).exp())
        })?;
        Ok(FMinusTable {
            nu,
            k,
            tau,
            form,
            matrix,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.order()
    }

    /// `F-_{n,m}`; entries with an index of `-1` (from `m - 1` shifts) are zero.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.matrix.get(n, m)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }
}

/// `F-_{n,m}(k, τ)`, dispatching to the appropriate closed form.
pub fn f_minus(nu: f64, k: usize, tau: f64, n: usize, m: usize) -> Result<f64> {
    Ok(FMinusTable::new(nu, k, tau, n.max(m) + 1)?.get(n, m))
}

/// General double-sum form, `τ > 0`.
pub fn f_minus_general(nu: f64, k: usize, tau: f64, n: usize, m: usize) -> Result<f64> {
    Ok(FMinusTable::with_form(FMinusForm::General, nu, k, tau, n.max(m) + 1)?.get(n, m))
}

/// `τ = 0`, `k ≥ 1`.
pub fn f_minus_tau_zero(nu: f64, k: usize, n: usize, m: usize) -> Result<f64> {
    Ok(FMinusTable::with_form(FMinusForm::TauZero, nu, k, 0.0, n.max(m) + 1)?.get(n, m))
}

/// `k = 0`, `τ > 0`.
pub fn f_minus_k_zero(nu: f64, tau: f64, n: usize, m: usize) -> Result<f64> {
    Ok(FMinusTable::with_form(FMinusForm::KZero, nu, 0, tau, n.max(m) + 1)?.get(n, m))
}

/// The double `₂F₁` sum evaluated literally, with each `₂F₁` at `1/(1+τ)` as
/// a terminating series in plain arithmetic. Accurate only for small `n, m`.
pub fn f_minus_general_direct(nu: f64, k: usize, tau: f64, n: usize, m: usize) -> Result<f64> {
    check_minus(nu, k)?;
    check_tau(tau)?;
    let kf = k as f64;
    let p = nu - kf + 1.0;
    let z = 1.0 / (1.0 + tau);
    let mut sum = 0.0;
    for j in 0..=n.min(m) {
        let c = j as f64 + nu + 1.0;
        let b = p + j as f64;
        let fn_ = hyp_terminating(&[-((n - j) as f64), b], &[c], z)?;
        let fm = hyp_terminating(&[-((m - j) as f64), b], &[c], z)?;
        sum += poch_over_factorial(p, j)
            * poch_over_factorial(c, n - j)
            * poch_over_factorial(c, m - j)
            * z.powi(2 * j as i32)
            * fn_
            * fm;
    }
    Ok((ln_a(n, nu) + ln_a(m, nu) + ln_gamma_pos(p)).exp() * z.powf(p) * sum)
}

/// Gauss-Laguerre estimate of the defining integral, doubling the order from
/// `order` until two successive estimates agree to `1e-12` of the absolute
/// integrand mass.
pub fn quad_oracle(
    nu: f64,
    sign: Sign,
    k: usize,
    tau: f64,
    n: usize,
    m: usize,
    order: usize,
) -> Result<f64> {
    check_tau(tau)?;
    let q = match sign {
        Sign::Plus => nu + k as f64,
        Sign::Minus => nu - k as f64,
    };
    if !(q > -1.0) {
        return Err(Error::Precondition(format!("integrand exponent {q} <= -1")));
    }
    let scale = 1.0 + tau;
    let ln_pref = ln_a(n, nu) + ln_a(m, nu) - (q + 1.0) * scale.ln();
    let estimate = |ord: usize| -> Result<(f64, f64)> {
        let rule = GaussLaguerre::new(ord, q)?;
        let mut sum = 0.0;
        let mut mass = 0.0;
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let y = t / scale;
            let v = w * laguerre(n, nu, y) * laguerre(m, nu, y);
            sum += v;
            mass += v.abs();
        }
        let pref = ln_pref.exp();
        Ok((pref * sum, pref * mass))
    };
    let mut ord = order.clamp(1, MAX_LAGUERRE_ORDER);
    let (mut prev, _) = estimate(ord)?;
    while ord < MAX_LAGUERRE_ORDER {
        ord = (2 * ord).min(MAX_LAGUERRE_ORDER);
        let (next, mass) = estimate(ord)?;
        if (next - prev).abs() <= 1e-12 * mass {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Convergence(format!(
        "quadrature oracle for F(k = {k}, tau = {tau}) at ({n}, {m})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn j_matrix_entries() {
        let j = j_matrix(3.0, 5).unwrap();
        assert_eq!(j.get(0, 0), 4.0);
        assert_eq!(j.get(0, 1), -(4f64).sqrt());
        assert_eq!(j.bandwidth(), Some(1));
        assert!(j_matrix(-1.0, 3).is_err());
    }

    #[test]
    fn f_plus_examples() {
        assert_eq!(f_plus(2.5, 0, 3, 3, 5).unwrap(), 1.0);
        assert_eq!(f_plus(2.5, 0, 2, 3, 5).unwrap(), 0.0);
        assert_eq!(f_plus(3.0, 1, 2, 2, 5).unwrap(), 8.0);
        let j = j_matrix(2.5, 6).unwrap();
        for n in 0..5 {
            for m in 0..5 {
                assert_eq!(f_plus(2.5, 1, n, m, 6).unwrap(), j.get(n, m));
            }
        }
        let q = quad_oracle(2.5, Sign::Plus, 2, 0.0, 0, 0, 8).unwrap();
        assert!(rel(f_plus(2.5, 2, 0, 0, 4).unwrap(), q) <= 1e-10);
        assert!(matches!(f_plus(2.5, 2, 3, 0, 5), Err(Error::Margin { .. })));
    }

    #[test]
    fn j_power_matches_f_plus() {
        let p = j_power(4.0, 2, 10).unwrap();
        assert_eq!(p.bandwidth(), Some(2));
        for n in 0..7 {
            for m in 0..7 {
                assert!((p.get(n, m) - f_plus(4.0, 2, n, m, 10).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f_minus_examples() {
        assert_eq!(f_minus(2.5, 0, 0.0, 2, 2).unwrap(), 1.0);
        assert_eq!(f_minus(2.5, 0, 0.0, 2, 1).unwrap(), 0.0);
        assert!(rel(f_minus(2.5, 1, 0.0, 0, 0).unwrap(), 0.4) <= 1e-14);
        let got = f_minus(3.2, 2, 0.5, 1, 2).unwrap();
        let want = quad_oracle(3.2, Sign::Minus, 2, 0.5, 1, 2, 8).unwrap();
        assert!(rel(got, want) <= 1e-8);
        assert!(matches!(
            f_minus(0.5, 2, 0.5, 0, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dispatch_selects_forms() {
        assert_eq!(FMinusForm::select(0, 0.0), FMinusForm::Identity);
        assert_eq!(FMinusForm::select(2, 0.0), FMinusForm::TauZero);
        assert_eq!(FMinusForm::select(0, 1.0), FMinusForm::KZero);
        assert_eq!(FMinusForm::select(1, 1.0), FMinusForm::General);
        assert!(f_minus_general(3.0, 1, 0.0, 1, 1).is_err());
    }

    #[test]
    fn direct_general_reduces_to_special_forms() {
        for nu in [2.5, 3.2, 10.4] {
            for n in 0..=6 {
                for m in 0..=6 {
                    for k in 1..=2 {
                        let d = f_minus_general_direct(nu, k, 0.0, n, m).unwrap();
                        let tz = f_minus_tau_zero(nu, k, n, m).unwrap();
                        assert!(
                            (d - tz).abs() <= 1e-12 * tz.abs().max(1.0),
                            "tau=0 {nu} {k} {n} {m}"
                        );
                    }
                    for tau in [0.5, 1.0] {
                        let d = f_minus_general_direct(nu, 0, tau, n, m).unwrap();
                        let kz = f_minus_k_zero(nu, tau, n, m).unwrap();
                        assert!(
                            (d - kz).abs() <= 1e-12 * kz.abs().max(1.0),
                            "k=0 {nu} {tau} {n} {m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pfaff_form_matches_direct_sum() {
        for (nu, k, tau) in [(3.2, 1, 0.5), (10.4, 2, 1.0), (9.4, 2, 1.0), (2.5, 1, 2.0)] {
            for n in 0..=6 {
                for m in 0..=6 {
                    let a = f_minus_general(nu, k, tau, n, m).unwrap();
                    let b = f_minus_general_direct(nu, k, tau, n, m).unwrap();
                    assert!(rel(a, b) <= 1e-11, "{nu} {k} {tau} {n} {m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn oracle_properties() {
        for n in 0..5 {
            for m in 0..5 {
                let d = quad_oracle(3.2, Sign::Minus, 0, 0.0, n, m, 8).unwrap();
                assert!((d - if n == m { 1.0 } else { 0.0 }).abs() <= 1e-12);
                let j = quad_oracle(3.2, Sign::Plus, 1, 0.0, n, m, 8).unwrap();
                assert!((j - f_plus(3.2, 1, n, m, 8).unwrap()).abs() <= 1e-12);
                let a = quad_oracle(10.4, Sign::Minus, 2, 1.0, n, m, 8).unwrap();
                let b = quad_oracle(10.4, Sign::Minus, 2, 1.0, m, n, 8).unwrap();
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn large_table_stays_finite_and_symmetric() {
        let t = FMinusTable::new(9.4, 2, 1.0, 201).unwrap();
        assert!(t.matrix().is_symmetric());
        assert!(t
            .matrix()
            .entries()
            .iter()
            .all(|v| v.is_finite() && *v > 0.0));
        // spot check a high entry against quadrature
        let q = quad_oracle(9.4, Sign::Minus, 2, 1.0, 40, 37, 64).unwrap();
        assert!(rel(t.get(40, 37), q) <= 1e-8);
    }

    #[test]
    fn integral_key_invariants() {
        assert!(IntegralKey::new(Sign::Plus, 1, 0.5, 2.0).is_err());
        assert!(IntegralKey::new(Sign::Minus, 3, 0.5, 1.5).is_err());
        let key = IntegralKey::new(Sign::Minus, 2, 1.0, 9.4).unwrap();
        let v = key.evaluate(3, 4).unwrap();
        assert!(rel(v, key.oracle(3, 4, 8).unwrap()) <= 1e-8);
        let plus = IntegralKey::new(Sign::Plus, 2, 0.0, 2.5).unwrap();
        assert!(rel(plus.evaluate(1, 3).unwrap(), plus.oracle(1, 3, 8).unwrap()) <= 1e-10);
    }

    proptest! {
        #[test]
        fn f_minus_is_symmetric(n in 0usize..12, m in 0usize..12, k in 0usize..3, tau in 0.0f64..3.0, nu in 2.0f64..12.0) {
            let a = f_minus(nu, k, tau, n, m).unwrap();
            let b = f_minus(nu, k, tau, m, n).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
