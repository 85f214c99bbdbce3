//! Dense Hermitian matrices and their spectra.
//!
//! Eigenvalues are computed with a cyclic complex Jacobi scheme. Each
//! rotation first removes the phase of the pivot element and then applies an
//! ordinary real plane rotation, so the iteration is the familiar symmetric
//! Jacobi method lifted to the unitary group.

use num_complex::Complex64;
use std::ops::Sub;

use crate::error::{Error, Result};

/// Tolerance used when validating `entry(k, l) == conj(entry(l, k))`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Sweeps stop once the off-diagonal Frobenius norm drops below this value
/// (scaled by the matrix norm when that exceeds one).
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major entries, checking Hermiticity and then
    /// symmetrizing away the rounding residue.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut asymmetry: f64 = 0.0;
        for k in 0..dim {
            for l in k..dim {
                let d = (entries[k * dim + l] - entries[l * dim + k].conj()).norm();
                asymmetry = asymmetry.max(d);
            }
        }
        if asymmetry > HERMITIAN_TOLERANCE || asymmetry.is_nan() {
            return Err(Error::NotHermitian { asymmetry });
        }
        let mut m = HermitianMatrix { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                entries.push(f(k, l));
            }
        }
        Self::from_row_major(dim, entries)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |k, l| {
            if k == l {
                Complex64::new(values[k], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Rank-one projector `|v><v|` (not normalized).
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        Self::from_fn(v.len(), |k, l| v[k] * v[l].conj())
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for k in 0..n {
            self.entries[k * n + k].im = 0.0;
            for l in (k + 1)..n {
                let avg = 0.5 * (self.entries[k * n + l] + self.entries[l * n + k].conj());
                self.entries[k * n + l] = avg;
                self.entries[l * n + k] = avg.conj();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim)
            .map(|k| self.entries[k * self.dim + k].re)
            .sum()
    }

    /// Returns a copy scaled to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t.abs() > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "cannot normalize matrix with trace {t}"
            )));
        }
        Ok(self.scaled(1.0 / t))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            for l in 0..n {
                entries[l * n + k] = self.entries[k * n + l];
            }
        }
        HermitianMatrix { dim: n, entries }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(HermitianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(HermitianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n)
            .all(|k| (0..n).all(|l| k == l || self.entries[k * n + l] == Complex64::new(0.0, 0.0)))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        if self.is_diagonal() {
            let mut d: Vec<f64> = (0..n).map(|k| self.entries[k * n + k].re).collect();
            d.sort_by(f64::total_cmp);
            return Ok(d);
        }
        let mut a = self.entries.clone();
        let threshold = OFF_DIAGONAL_TOLERANCE * self.frobenius_norm().max(1.0);
        let mut off = off_diagonal_norm(&a, n);
        for _ in 0..MAX_SWEEPS {
            if off <= threshold {
                let mut d: Vec<f64> = (0..n).map(|k| a[k * n + k].re).collect();
                d.sort_by(f64::total_cmp);
                return Ok(d);
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    rotate(&mut a, n, p, q);
                }
            }
            off = off_diagonal_norm(&a, n);
        }
        if off <= threshold {
            let mut d: Vec<f64> = (0..n).map(|k| a[k * n + k].re).collect();
            d.sort_by(f64::total_cmp);
            return Ok(d);
        }
        Err(Error::EigenNotConverged {
            off_norm: off,
            sweeps: MAX_SWEEPS,
        })
    }

    /// Trace norm `sum |lambda_i|`.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|x| x.abs()).sum())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

impl Sub for &HermitianMatrix {
    type Output = Result<HermitianMatrix>;

    fn sub(self, rhs: Self) -> Self::Output {
        self.try_sub(rhs)
    }
}

/// Singular values of a real `rows × cols` matrix given as columns, by
/// one-sided (Hestenes) Jacobi. Small singular values keep full relative
/// accuracy, unlike the square roots of `AᵀA` eigenvalues. Returns
/// `min(rows, cols)` values in descending order.
pub fn singular_values(mut columns: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let cols = columns.len();
    if let Some(rows) = columns.first().map(Vec::len) {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: bad.len(),
            });
        }
    }
    let rows = columns.first().map_or(0, Vec::len);
    if cols > rows {
        columns = (0..rows)
            .map(|r| columns.iter().map(|c| c[r]).collect())
            .collect();
    }
    let cols = columns.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let tolerance = columns.first().map_or(1, Vec::len).max(1) as f64 * f64::EPSILON;
    // Columns this small are rounding residue of a rank deficiency.
    let frob_sq: f64 = columns.iter().map(|c| dot(c, c)).sum();
    let negligible = tolerance * tolerance * frob_sq;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0_f64;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = dot(&columns[i], &columns[i]);
                let beta = dot(&columns[j], &columns[j]);
                let gamma = dot(&columns[i], &columns[j]);
                if gamma == 0.0 || alpha <= negligible || beta <= negligible {
                    continue;
                }
                let cosine = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                worst = worst.max(cosine);
                if cosine <= tolerance {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (xi, yj) = (*x, *y);
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if worst <= tolerance {
            let mut sv: Vec<f64> = columns.iter().map(|c| dot(c, c).sqrt()).collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            return Ok(sv);
        }
    }
    Err(Error::EigenNotConverged {
        off_norm: worst,
        sweeps: MAX_SWEEPS,
    })
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..n {
        for l in 0..n {
            if k != l {
                s += a[k * n + l].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]` and `a[q][p]`.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();

    // A <- A U with U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on (p, q).
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q] * phase_conj;
        a[k * n + p] = akp * c - akq * s;
        a[k * n + q] = akp * s + akq * c;
    }
    // A <- U^dagger A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k] * phase;
        a[p * n + k] = apk * c - aqk * s;
        a[q * n + k] = apk * s + aqk * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn singular_values_of_small_matrices() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5).
        let sv = singular_values(vec![vec![3.0, 4.0], vec![0.0, 5.0]]).unwrap();
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-14);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-14);
        // Rank-deficient rectangular case: 3 columns in R^2.
        let sv = singular_values(vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!((sv[1] - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(sv.len(), 2);
        // Rank one: the dependent column shrinks to rounding level.
        let sv = singular_values(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert!((sv[0] - 70f64.sqrt()).abs() < 1e-13);
        assert!(sv[1].abs() < 1e-13);
        assert!(singular_values(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn pauli_y_spectrum() {
        let m =
            HermitianMatrix::from_row_major(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
                .unwrap();
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!((ev[1] - 1.0).abs() < 1e-14);
        assert!((m.trace_norm().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_matches_characteristic_polynomial() {
        // [[a, b], [b*, d]] has eigenvalues (a+d)/2 +- sqrt(((a-d)/2)^2 + |b|^2)
        let (a, d, b) = (0.3, -1.2, c(0.4, -0.7));
        let m = HermitianMatrix::from_row_major(2, vec![c(a, 0.), b, b.conj(), c(d, 0.)]).unwrap();
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let ev = m.eigenvalues().unwrap();
        assert!((ev[0] - (mid - rad)).abs() < 1e-14);
        assert!((ev[1] - (mid + rad)).abs() < 1e-14);
    }

    #[test]
    fn known_spectrum_under_unitary_conjugation() {
        // U diag(lambda) U^dagger with U a product of complex Givens rotations.
        let lambdas = [-0.9, -0.1, 0.0, 0.25, 0.5, 1.75];
        let n = lambdas.len();
        let mut u = vec![c(0., 0.); n * n];
        for k in 0..n {
            u[k * n + k] = c(1., 0.);
        }
        let mut seed = 0.37_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                seed = (seed * 7.13 + 0.21).fract();
                let angle = seed * 3.0;
                let phi = seed * 5.0;
                let (s, co) = angle.sin_cos();
                let e = Complex64::from_polar(1.0, phi);
                for k in 0..n {
                    let ukp = u[k * n + p];
                    let ukq = u[k * n + q];
                    u[k * n + p] = ukp * co - ukq * e.conj() * s;
                    u[k * n + q] = ukp * e * s + ukq * co;
                }
            }
        }
        let m = HermitianMatrix::from_fn(n, |k, l| {
            (0..n)
                .map(|j| u[k * n + j] * lambdas[j] * u[l * n + j].conj())
                .sum()
        })
        .unwrap();
        let ev = m.eigenvalues().unwrap();
        for (got, want) in ev.iter().zip(lambdas.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let err =
            HermitianMatrix::from_row_major(2, vec![c(1., 0.), c(0., 1.), c(0., 1.), c(1., 0.)])
                .unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn subtraction_requires_matching_dimensions() {
        let a = HermitianMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let b = HermitianMatrix::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            (&a - &b).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }
}
