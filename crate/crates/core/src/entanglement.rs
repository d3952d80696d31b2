//! Logarithmic negativity, computed either exactly from a Fock-basis density
//! operator or from a two-mode covariance matrix, and heralded entanglement
//! rates. Logarithms are base 2 throughout (ebits).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::keyrate::{symplectic_eigenvalues, CovarianceMatrix};
use crate::linalg::hermitian_eigenvalues;

/// Eigenvalues smaller than this in magnitude are dropped from the trace norm.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativityPath {
    FockExact,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    pub e_n: f64,
    pub path: NegativityPath,
    /// `||rho^{T_B}||_1` of the normalized operator; Fock path only.
    pub trace_norm: Option<f64>,
}

/// `log2 ||rho^{T_B}||_1` for a two-mode operator, transposing the second mode.
///
/// The operator is normalized by its trace first, so truncated states with a
/// nonzero leak are handled consistently.
pub fn log_negativity(rho: &DensityOperator) -> Result<NegativityResult> {
    if rho.modes().len() != 2 {
        return Err(Error::ModeCount {
            expected: 2,
            found: rho.modes().len(),
        });
    }
    let scale = rho.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let herm = rho.hermiticity_error();
    if herm > 1e-10 * scale.max(1.0) {
        return Err(Error::NotHermitian(herm));
    }
    let rho = rho.normalized();
    let pt = rho.partial_transpose(&[rho.modes()[1]])?;
    let trace_norm: f64 = hermitian_eigenvalues(pt.matrix())
        .iter()
        .map(|x| x.abs())
        .filter(|&x| x >= EIGENVALUE_FLOOR)
        .sum();
    Ok(NegativityResult {
        e_n: trace_norm.log2().max(0.0),
        path: NegativityPath::FockExact,
        trace_norm: Some(trace_norm),
    })
}

/// Log-negativity of a two-mode Gaussian state from its covariance matrix:
/// flip the momentum of the second mode and sum `-log2` of the symplectic
/// eigenvalues below one.
pub fn log_negativity_gaussian(cov: &CovarianceMatrix) -> Result<NegativityResult> {
    if cov.modes().len() != 2 {
        return Err(Error::ModeCount {
            expected: 2,
            found: cov.modes().len(),
        });
    }
    // physical validity of the untransposed matrix
    symplectic_eigenvalues(cov)?;
    let flip = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    let transposed = CovarianceMatrix::new_unchecked(
        cov.modes().to_vec(),
        &flip * cov.matrix() * &flip,
    );
    let nus = crate::keyrate::symplectic_spectrum(&transposed)?;
    let e_n = nus.iter().map(|&nu| (-nu.log2()).max(0.0)).sum();
    Ok(NegativityResult {
        e_n,
        path: NegativityPath::Gaussian,
        trace_norm: None,
    })
}

/// Success-probability-weighted entanglement `P_s * E_N`.
pub fn entanglement_rate(e_n: f64, success_probability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&success_probability) {
        return Err(Error::InvalidParameter {
            name: "success_probability",
            value: success_probability,
            domain: "[0, 1]",
        });
    }
    Ok(success_probability * e_n)
}
