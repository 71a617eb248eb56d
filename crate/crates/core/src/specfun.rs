//! Scalar special functions: log-Gamma with sign, rising factorials in
//! signed-log form, terminating hypergeometric sums and Laguerre polynomials.

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(logmag)`.
///
/// Products and quotients of Gamma functions and Pochhammer symbols overflow
/// `f64` long before the final ratios do, so they are carried in this form and
/// only converted back at the outermost expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub sign: i8,
    pub logmag: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        logmag: 0.0,
    };
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, logmag: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                logmag,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                logmag: x.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.logmag.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn recip(self) -> Self {
        debug_assert!(self.sign != 0, "reciprocal of zero");
        SignedLog {
            sign: self.sign,
            logmag: -self.logmag,
        }
    }

    pub fn powf(self, p: f64) -> Self {
        debug_assert!(self.sign >= 0, "real power of a negative value");
        if self.sign == 0 {
            return Self::ZERO;
        }
        SignedLog {
            sign: 1,
            logmag: self.logmag * p,
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * rhs.sign,
            logmag: self.logmag + rhs.logmag,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Sign and logarithm of `Γ(x)`; valid for negative non-integer `x`.
pub fn log_gamma(x: f64) -> Result<SignedLog> {
    if is_nonpositive_integer(x) || x.is_nan() {
        return Err(Error::Pole(x));
    }
    let (lg, sign) = libm::lgamma_r(x);
    Ok(SignedLog::new(sign as i8, lg))
}

/// `ln Γ(x)` for `x > 0`.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma_r(x).0
}

// B_{2k} / (2k (2k-1)) for k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `ln |Γ(x + iy)|`.
///
/// The argument is shifted upward with `Γ(z) = Γ(z+m) / ∏(z+j)` until
/// `Re z >= 15`, then the Stirling series is summed through `z^-15`; the
/// truncation error there is below `1e-20`. Returns `+inf` at poles.
pub fn ln_gamma_modulus(x: f64, y: f64) -> f64 {
    if y == 0.0 && is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    let mut shift_sum = 0.0;
    let mut re = x;
    while re < 15.0 {
        shift_sum += 0.5 * (re * re + y * y).ln();
        re += 1.0;
    }
    let z = Complex64::new(re, y);
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = zinv;
    for c in STIRLING {
        corr += pow * c;
        pow *= zinv2;
    }
    let lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr;
    lg.re - shift_sum
}

/// Rising factorial `(a)_n = a (a+1) … (a+n-1)` with exact sign tracking.
pub fn pochhammer(a: f64, n: usize) -> SignedLog {
    let mut sign: i8 = 1;
    let mut logmag = 0.0;
    for j in 0..n {
        let f = a + j as f64;
        if f == 0.0 {
            return SignedLog::ZERO;
        }
        if f < 0.0 {
            sign = -sign;
        }
        logmag += f.abs().ln();
    }
    SignedLog { sign, logmag }
}

/// `(a)_n / n!` evaluated as `∏_{m=1}^{n} (1 + (a-1)/m)`.
pub fn poch_over_factorial(a: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, m| acc * (1.0 + (a - 1.0) / m as f64))
}

/// `ln((a)_n / n!)` for `a > 0`.
pub(crate) fn ln_poch_over_factorial(a: f64, n: usize) -> f64 {
    debug_assert!(a > 0.0);
    (1..=n).map(|m| (1.0 + (a - 1.0) / m as f64).ln()).sum()
}

/// Sum of `terms + 1` terms `t_0 = 1`, `t_{j+1} = t_j * ratio(j)`.
pub(crate) fn terminating_sum(terms: usize, mut ratio: impl FnMut(usize) -> f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..terms {
        term *= ratio(j);
        sum += term;
    }
    sum
}

/// Natural log of a terminating sum whose term ratios are all positive.
///
/// The running sum is rescaled whenever it grows past `1e200`, so sums far
/// outside the `f64` range are handled.
pub(crate) fn ln_positive_terminating_sum(
    terms: usize,
    mut ratio: impl FnMut(usize) -> f64,
) -> f64 {
    const BIG: f64 = 1e200;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for j in 0..terms {
        let r = ratio(j);
        debug_assert!(r >= 0.0);
        term *= r;
        sum += term;
        if sum > BIG {
            sum /= BIG;
            term /= BIG;
            ln_scale += BIG.ln();
        }
    }
    sum.ln() + ln_scale
}

/// Terminating generalized hypergeometric sum
/// `Σ_{j=0}^{n} [∏(num)_j / ∏(den)_j] x^j / j!`.
///
/// At least one numerator parameter must be a non-positive integer `-n`; the
/// series stops at the first such parameter. Terms are built from their
/// successive ratios.
pub fn hyp_terminating(num: &[f64], den: &[f64], x: f64) -> Result<f64> {
    let n = num
        .iter()
        .filter(|&&p| is_nonpositive_integer(p))
        .map(|&p| (-p) as usize)
        .min()
        .ok_or_else(|| Error::Parameter("no non-positive integer numerator parameter".into()))?;
    for &d in den {
        if is_nonpositive_integer(d) && ((-d) as usize) < n {
            return Err(Error::DenominatorPole {
                param: d,
                term: (-d) as usize,
            });
        }
    }
    Ok(terminating_sum(n, |j| {
        let jf = j as f64;
        let up: f64 = num.iter().map(|p| p + jf).product();
        let down: f64 = den.iter().map(|q| q + jf).product();
        up / down * x / (jf + 1.0)
    }))
}

/// `L_n^ν(y)` by upward recursion in the degree.
pub fn laguerre(n: usize, nu: f64, y: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + nu + 1.0 - y) * cur - (kf + nu) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0^ν(y), …, L_{n_max}^ν(y)]`.
pub fn laguerre_sequence(n_max: usize, nu: f64, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(nu + 1.0 - y);
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + nu + 1.0 - y) * out[k] - (kf + nu) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Pairwise (cascade) summation.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn log_gamma_small_integers() {
        let g1 = log_gamma(1.0).unwrap();
        assert_eq!(g1.sign, 1);
        assert!(g1.logmag.abs() < 1e-15);
        let g5 = log_gamma(5.0).unwrap();
        assert_eq!(g5.sign, 1);
        assert!((g5.logmag - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_negative_matches_reflection() {
        // Γ(x) = π / (sin(πx) Γ(1-x)), Γ(5.5) from the half-integer product
        let x = -4.5;
        let mut gamma_1mx = PI.sqrt();
        let mut a = 0.5;
        while a < 5.5 {
            gamma_1mx *= a;
            a += 1.0;
        }
        let expected = PI / ((PI * x).sin() * gamma_1mx);
        let got = log_gamma(x).unwrap().to_f64();
        assert!(rel(got, expected) <= 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn log_gamma_rejects_poles() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert_eq!(log_gamma(x), Err(Error::Pole(x)));
        }
    }

    #[test]
    fn gamma_modulus_closed_forms() {
        for y in [0.1, 0.7, 1.3, 4.0, 9.5] {
            // |Γ(iy)|² = π / (y sinh πy)
            let want = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert!((ln_gamma_modulus(0.0, y) - want).abs() < 1e-12);
            // |Γ(1/2 + iy)|² = π / cosh πy
            let want = 0.5 * (PI / (PI * y).cosh()).ln();
            assert!((ln_gamma_modulus(0.5, y) - want).abs() < 1e-12);
            // |Γ(1 + iy)|² = πy / sinh πy
            let want = 0.5 * (PI * y / (PI * y).sinh()).ln();
            assert!((ln_gamma_modulus(1.0, y) - want).abs() < 1e-12);
        }
        for x in [-4.2, 0.3, 5.2, 17.5] {
            assert!((ln_gamma_modulus(x, 0.0) - log_gamma(x).unwrap().logmag).abs() < 1e-12);
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(3.7, 0), SignedLog::ONE);
        let mut fact = 1.0;
        for n in 1..15 {
            fact *= n as f64;
            assert!(rel(pochhammer(1.0, n).to_f64(), fact) < 1e-14);
        }
        let direct = (-3.2f64) * (-2.2) * (-1.2) * (-0.2);
        let p = pochhammer(-3.2, 4);
        assert_eq!(p.sign, 1);
        assert!(rel(p.to_f64(), direct) < 1e-14);
        let p3 = pochhammer(-3.2, 3);
        assert_eq!(p3.sign, -1);
        assert!(pochhammer(-2.0, 5).is_zero());
    }

    #[test]
    fn poch_over_factorial_matches_ratio() {
        for (a, n) in [(2.5, 7usize), (1.0, 10), (2.0, 6), (-0.3, 5)] {
            let want = pochhammer(a, n).to_f64() / pochhammer(1.0, n).to_f64();
            assert!(rel(poch_over_factorial(a, n), want) < 1e-13);
        }
    }

    #[test]
    fn hypergeometric_zero_degree() {
        assert_eq!(hyp_terminating(&[-0.0, 3.3], &[1.7], 0.4).unwrap(), 1.0);
    }

    #[test]
    fn hypergeometric_b_equals_c() {
        // ₂F₁(-n, b; b; z) = (1-z)^n
        for n in 0..12 {
            let z = 0.37;
            let got = hyp_terminating(&[-(n as f64), 4.1], &[4.1], z).unwrap();
            assert!(rel(got, (1.0 - z).powi(n)) < 1e-12);
        }
    }

    #[test]
    fn hypergeometric_gauss_theorem() {
        // ₂F₁(-n, b; c; 1) = (c-b)_n / (c)_n
        for n in 0..10usize {
            let (b, c) = (2.3, 6.9);
            let got = hyp_terminating(&[-(n as f64), b], &[c], 1.0).unwrap();
            let want = (pochhammer(c - b, n) / pochhammer(c, n)).to_f64();
            assert!(rel(got, want) < 1e-12);
        }
    }

    #[test]
    fn hypergeometric_errors() {
        assert!(matches!(
            hyp_terminating(&[1.5, 2.0], &[3.0], 0.5),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            hyp_terminating(&[-4.0, 2.0], &[-2.0], 0.5),
            Err(Error::DenominatorPole { .. })
        ));
        // a denominator pole beyond the termination point is harmless
        assert!(hyp_terminating(&[-2.0, 2.0], &[-3.0], 0.5).is_ok());
    }

    fn laguerre_series(n: usize, nu: f64, y: f64) -> f64 {
        let lg = |x: f64| log_gamma(x).unwrap();
        (0..=n)
            .map(|k| {
                let c = (lg(n as f64 + nu + 1.0)
                    / (lg((n - k) as f64 + 1.0) * lg(nu + k as f64 + 1.0)))
                .to_f64();
                let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
                sgn * c * y.powi(k as i32) / lg(k as f64 + 1.0).to_f64()
            })
            .sum()
    }

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 3.3, 8.0), 1.0);
        assert!((laguerre(1, 3.3, 8.0) - (3.3 + 1.0 - 8.0)).abs() < 1e-15);
        let got = laguerre(5, 2.5, 3.7);
        let want = laguerre_series(5, 2.5, 3.7);
        assert!(rel(got, want) < 1e-12, "{got} vs {want}");
        let seq = laguerre_sequence(5, 2.5, 3.7);
        assert_eq!(seq[5], got);
    }

    fn fd1(f: impl Fn(f64) -> f64, y: f64, h: f64) -> f64 {
        (-f(y + 2.0 * h) + 8.0 * f(y + h) - 8.0 * f(y - h) + f(y - 2.0 * h)) / (12.0 * h)
    }

    fn fd2(f: impl Fn(f64) -> f64, y: f64, h: f64) -> f64 {
        (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h) - f(y - 2.0 * h))
            / (12.0 * h * h)
    }

    proptest! {
        #[test]
        fn laguerre_three_term_identity(n in 1usize..=20, nu in -0.9f64..12.0, y in 0.01f64..50.0) {
            let l = laguerre_sequence(n + 1, nu, y);
            let terms = [
                (2.0 * n as f64 + nu + 1.0) * l[n],
                (n as f64 + nu) * l[n - 1],
                (n as f64 + 1.0) * l[n + 1],
            ];
            let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            let rhs = terms[0] - terms[1] - terms[2];
            prop_assert!((y * l[n] - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn laguerre_derivative_identity(n in 1usize..=10, nu in -0.5f64..8.0, y in 0.5f64..30.0) {
            let h = 1e-3 * y.max(1.0);
            let d = fd1(|t| laguerre(n, nu, t), y, h);
            let rhs = n as f64 * laguerre(n, nu, y) - (n as f64 + nu) * laguerre(n - 1, nu, y);
            let scale = (n as f64 * laguerre(n, nu, y)).abs()
                .max(((n as f64 + nu) * laguerre(n - 1, nu, y)).abs());
            prop_assert!((y * d - rhs).abs() <= 1e-6 * scale);
        }

        #[test]
        fn laguerre_differential_equation(n in 0usize..=10, nu in -0.5f64..8.0, y in 0.5f64..30.0) {
            let h = 1e-3 * y.max(1.0);
            let f = |t| laguerre(n, nu, t);
            let d1 = fd1(f, y, h);
            let d2 = fd2(f, y, h);
            let terms = [y * d2, (nu + 1.0 - y) * d1, n as f64 * f(y)];
            let scale = terms.iter().fold(1e-300f64, |m, t| m.max(t.abs()));
            prop_assert!((terms[0] + terms[1] + terms[2]).abs() <= 1e-6 * scale);
        }

        #[test]
        fn pochhammer_splits(a in -12.0f64..12.0, n in 0usize..30, m in 0usize..30) {
            let whole = pochhammer(a, n + m);
            let parts = pochhammer(a, n) * pochhammer(a + n as f64, m);
            prop_assert_eq!(whole.sign, parts.sign);
            if !whole.is_zero() {
                prop_assert!((whole.logmag - parts.logmag).abs() <= 1e-12 * whole.logmag.abs().max(1.0));
            }
        }

        #[test]
        fn signed_log_product(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let p = (SignedLog::from_f64(x) * SignedLog::from_f64(y)).to_f64();
            prop_assert!((p - x * y).abs() <= 1e-13 * (x * y).abs());
        }
    }
}
