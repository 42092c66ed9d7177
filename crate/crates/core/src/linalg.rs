//! Dense complex vector/matrix primitives shared by every module.
//!
//! All dimensions in this problem are tiny (at most 2N with N ~ 16), so
//! everything is dense `nalgebra` storage over `Complex64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Tolerance policy used by all structural checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// State normalization.
    pub eps_norm: f64,
    /// Hermiticity deviation.
    pub eps_herm: f64,
    /// Slack below zero allowed for eigenvalues of PSD operators.
    pub eps_psd: f64,
    /// Unitarity deviation (max-norm of M†M − I).
    pub eps_unitary: f64,
    /// Probability bookkeeping slack.
    pub eps_prob: f64,
    /// Absolute tolerance for grouping coefficient magnitudes.
    pub eps_group: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_norm: 1e-10,
            eps_herm: 1e-10,
            eps_psd: 1e-10,
            eps_unitary: 1e-10,
            eps_prob: 1e-10,
            eps_group: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps_norm,
            self.eps_herm,
            self.eps_psd,
            self.eps_unitary,
            self.eps_prob,
            self.eps_group,
        ];
        if all.iter().any(|&e| e < 0.0 || !e.is_finite()) {
            return Err(Error::ContractViolation(
                "tolerances must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Discrete Fourier transform on `n` modes: entry (k,l) = e^{2πikl/n}/√n.
pub fn dft_matrix(n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::InvalidDimension("DFT order must be >= 1".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(CMat::from_fn(n, n, |k, l| {
        Complex64::from_polar(scale, TAU * (k * l % n) as f64 / n as f64)
    }))
}

/// Inverse DFT, i.e. the adjoint of [`dft_matrix`].
pub fn inverse_dft_matrix(n: usize) -> Result<CMat> {
    Ok(dft_matrix(n)?.adjoint())
}

/// Max-norm of the entrywise difference.
pub fn max_norm_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_norm_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deviation of M from its own adjoint, in max-norm.
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    max_norm_diff(m, &m.adjoint())
}

/// Deviation of M†M from the identity, in max-norm.
pub fn unitarity_deviation(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    max_norm_diff(&gram, &CMat::identity(m.nrows(), m.ncols()))
}

pub fn is_unitary(m: &CMat, eps: f64) -> bool {
    m.is_square() && unitarity_deviation(m) <= eps
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat, tol: &Tolerances) -> Result<Vec<f64>> {
    let dev = hermiticity_deviation(m);
    if dev > tol.eps_herm {
        return Err(Error::NotHermitian(dev));
    }
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Positive-semidefiniteness check via eigenvalues: all >= −eps_psd.
///
/// Rejects non-Hermitian input with a structural error, distinct from a
/// plain "not PSD" answer.
pub fn check_positive(m: &CMat, tol: &Tolerances) -> Result<bool> {
    let vals = hermitian_eigenvalues(m, tol)?;
    Ok(vals.first().map_or(true, |&v| v >= -tol.eps_psd))
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat, tol: &Tolerances) -> Result<f64> {
    let vals = hermitian_eigenvalues(m, tol)?;
    vals.into_iter()
        .next()
        .ok_or_else(|| Error::InvalidDimension("empty matrix".into()))
}

/// Matrix-vector product with an explicit dimension check.
pub fn apply(m: &CMat, v: &CVec) -> Result<CVec> {
    if m.ncols() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, vector has length {}",
            m.nrows(),
            m.ncols(),
            v.len()
        )));
    }
    Ok(m * v)
}

/// Kronecker product, left factor major: (a ⊗ b)[(i·p + k), (j·q + l)] = a[i,j]·b[k,l].
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Support-restricted (pseudo)inverse of a Hermitian PSD matrix.
///
/// Eigenvalues at or below `cutoff` are treated as exact zeros. Returns the
/// pseudoinverse together with the projector onto the support.
pub fn support_pinv(m: &CMat, cutoff: f64, tol: &Tolerances) -> Result<(CMat, CMat)> {
    let dev = hermiticity_deviation(m);
    if dev > tol.eps_herm {
        return Err(Error::NotHermitian(dev));
    }
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut pinv = CMat::zeros(n, n);
    let mut proj = CMat::zeros(n, n);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cutoff {
            let v = eig.eigenvectors.column(i);
            let outer = &v * v.adjoint();
            pinv += &outer * Complex64::new(1.0 / lam, 0.0);
            proj += outer;
        }
    }
    Ok((pinv, proj))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
