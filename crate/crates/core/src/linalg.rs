//! Dense symmetric matrices with an optional declared bandwidth, and a Sturm
//! bisection eigensolver for the symmetric tridiagonal case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric `order × order` matrix, stored densely in row-major order.
///
/// `bandwidth` is `Some(0)` for diagonal, `Some(1)` for tridiagonal and so on;
/// `None` means dense. Entries outside the declared band are always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    order: usize,
    bandwidth: Option<usize>,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize, bandwidth: Option<usize>) -> Self {
        SymMatrix {
            order,
            bandwidth,
            entries: vec![0.0; order * order],
        }
    }

    /// Build from a closure evaluated on the upper triangle within the band.
    pub fn from_upper(
        order: usize,
        bandwidth: Option<usize>,
        mut f: impl FnMut(usize, usize) -> Result<f64>,
    ) -> Result<Self> {
        let mut m = Self::zeros(order, bandwidth);
        for i in 0..order {
            let last = match bandwidth {
                Some(b) => (i + b).min(order - 1),
                None => order - 1,
            };
            for j in i..=last {
                let v = f(i, j)?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    ///
    /// # Panics
    /// If the entry lies outside the declared band and `value != 0`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if let Some(b) = self.bandwidth {
            assert!(
                i.abs_diff(j) <= b || value == 0.0,
                "entry ({i}, {j}) outside bandwidth {b}"
            );
        }
        self.entries[i * self.order + j] = value;
        self.entries[j * self.order + i] = value;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.order.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymMatrix {
            order: self.order,
            bandwidth: self.bandwidth,
            entries: self.entries.iter().map(|v| factor * v).collect(),
        }
    }

    /// `self - other`; the result's band is the wider of the two.
    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::Parameter(format!(
                "order mismatch {} vs {}",
                self.order, other.order
            )));
        }
        let bandwidth = match (self.bandwidth, other.bandwidth) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Ok(SymMatrix {
            order: self.order,
            bandwidth,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn respects_band(&self) -> bool {
        match self.bandwidth {
            None => true,
            Some(b) => (0..self.order)
                .all(|i| (0..self.order).all(|j| i.abs_diff(j) <= b || self.get(i, j) == 0.0)),
        }
    }

    /// Diagonal and first super-diagonal.
    pub fn tridiagonal_parts(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.bandwidth.is_none_or(|b| b > 1) {
            return Err(Error::Parameter("matrix is not tridiagonal".into()));
        }
        let diag = (0..self.order).map(|i| self.get(i, i)).collect();
        let off = (0..self.order.saturating_sub(1))
            .map(|i| self.get(i, i + 1))
            .collect();
        Ok((diag, off))
    }

    /// All eigenvalues in ascending order (tridiagonal matrices only).
    pub fn tridiagonal_eigenvalues(&self) -> Result<Vec<f64>> {
        let (d, e) = self.tridiagonal_parts()?;
        Ok(tridiagonal_eigenvalues(&d, &e))
    }
}

/// Number of eigenvalues strictly less than `x` (Sturm sequence count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off`, ascending, by bisection on the Sturm count.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r =
            if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let span = (hi - lo).max(1.0);
    lo -= 1e-9 * span;
    hi += 1e-9 * span;
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            while b - a > 2.0 * f64::EPSILON * (a.abs() + b.abs()) + f64::MIN_POSITIVE {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                if sturm_count(diag, off, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_keeps_symmetry_and_band() {
        let mut m = SymMatrix::zeros(4, Some(1));
        m.set(0, 1, 2.0);
        m.set(2, 2, -1.0);
        assert!(m.is_symmetric());
        assert!(m.respects_band());
        assert_eq!(m.get(1, 0), 2.0);
    }

    #[test]
    #[should_panic]
    fn set_outside_band_panics() {
        let mut m = SymMatrix::zeros(4, Some(1));
        m.set(0, 2, 1.0);
    }

    #[test]
    fn bisection_matches_known_spectrum() {
        // tridiag(-1, 2, -1) of order n: 2 - 2 cos(kπ/(n+1))
        let n = 30;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = tridiagonal_eigenvalues(&d, &e);
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn bisection_on_diagonal_matrix() {
        let ev = tridiagonal_eigenvalues(&[3.0, -1.0, 2.0], &[0.0, 0.0]);
        assert_eq!(ev.len(), 3);
        assert!(
            (ev[0] + 1.0).abs() < 1e-14
                && (ev[1] - 2.0).abs() < 1e-14
                && (ev[2] - 3.0).abs() < 1e-14
        );
    }
}
