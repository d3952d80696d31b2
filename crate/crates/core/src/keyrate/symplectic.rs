use nalgebra::DMatrix;

use super::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Symplectic eigenvalues below `1 - UNPHYSICAL_TOLERANCE` are rejected.
pub const UNPHYSICAL_TOLERANCE: f64 = 1e-4;

/// Block-diagonal symplectic form `⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Moduli of the eigenvalues of `i Omega M`, one per pair, ascending, with no
/// physicality check (used for partially transposed matrices).
///
/// Computed as square roots of the doubly degenerate spectrum of the symmetric
/// matrix `M^{1/2} Omega^T M Omega M^{1/2}`, which is similar to `-(Omega M)^2`.
pub fn symplectic_spectrum(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let m = cov.matrix();
    let n = cov.modes().len();
    let (vals, vecs) = symmetric_eigen(m);
    if vals[0] <= 0.0 {
        return Err(Error::Unphysical(vals[0]));
    }
    let root = &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| v.sqrt()),
    )) * vecs.transpose();
    let omega = symplectic_form(n);
    let inner = &root * omega.transpose() * m * &omega * &root;
    let inner = (&inner + inner.transpose()) * 0.5;
    let (sq, _) = symmetric_eigen(&inner);
    if sq.len() < 2 * n {
        return Err(Error::EigenFailure);
    }
    Ok((0..n)
        .map(|k| (0.5 * (sq[2 * k] + sq[2 * k + 1])).max(0.0).sqrt())
        .collect())
}

/// Symplectic eigenvalues of a physical covariance matrix, ascending.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let nus = symplectic_spectrum(cov)?;
    match nus.first() {
        Some(&nu) if nu < 1.0 - UNPHYSICAL_TOLERANCE => Err(Error::Unphysical(nu)),
        _ => Ok(nus),
    }
}
