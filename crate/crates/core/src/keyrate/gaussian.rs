//! Closed-form Gaussian pipeline for the TMSV-only scenario: covariance
//! matrices are built and propagated symplectically with no Fock simulation.

use nalgebra::{DMatrix, DVector};

use super::{key_rate_from_covariance, CovarianceMatrix, KeyRateBreakdown};
use crate::error::Result;
use crate::fock::ModeLabel;
use crate::optics::{eve_squeezing, squeezing_from_db, transmissivity_from_loss_db};

/// Covariance of `sum (-tanh r)^n / cosh r |n, n>`:
/// `[cosh 2r I, -sinh 2r Z; -sinh 2r Z, cosh 2r I]`.
pub fn tmsv_covariance(r: f64) -> DMatrix<f64> {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    DMatrix::from_row_slice(4, 4, &[
        c, 0.0, -s, 0.0,
        0.0, c, 0.0, s,
        -s, 0.0, c, 0.0,
        0.0, s, 0.0, c,
    ])
}

/// Symplectic matrix of the transmissivity-`t` splitter on modes `(i, j)` of
/// an `n`-mode system: `a_i -> sqrt(t) a_i + sqrt(1-t) a_j`,
/// `a_j -> -sqrt(1-t) a_i + sqrt(t) a_j`.
pub fn beam_splitter_symplectic(n: usize, i: usize, j: usize, t: f64) -> DMatrix<f64> {
    let (c, s) = (t.sqrt(), (1.0 - t).sqrt());
    let mut sym = DMatrix::identity(2 * n, 2 * n);
    for x in 0..2 {
        sym[(2 * i + x, 2 * i + x)] = c;
        sym[(2 * i + x, 2 * j + x)] = s;
        sym[(2 * j + x, 2 * i + x)] = -s;
        sym[(2 * j + x, 2 * j + x)] = c;
    }
    sym
}

/// Joint covariance over `A, B, E, F` after sending `B` through Eve's
/// entangling-cloner channel.
pub fn tmsv_channel_covariance(
    squeezing_db: f64,
    loss_db: f64,
    eve_variance: f64,
) -> Result<CovarianceMatrix> {
    let mut m = DMatrix::zeros(8, 8);
    m.view_mut((0, 0), (4, 4))
        .copy_from(&tmsv_covariance(squeezing_from_db(squeezing_db)));
    m.view_mut((4, 4), (4, 4))
        .copy_from(&tmsv_covariance(eve_squeezing(eve_variance)?));
    let s = beam_splitter_symplectic(4, 1, 2, transmissivity_from_loss_db(loss_db));
    let m = &s * m * s.transpose();
    use ModeLabel::*;
    CovarianceMatrix::new(vec![A, B, E, F], m, DVector::zeros(8))
}

pub fn tmsv_key_rate(squeezing_db: f64, loss_db: f64, eve_variance: f64) -> Result<KeyRateBreakdown> {
    let joint = tmsv_channel_covariance(squeezing_db, loss_db, eve_variance)?;
    key_rate_from_covariance(&joint, 1.0, 1.0, 0.0)
}
