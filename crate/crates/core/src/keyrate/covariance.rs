use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Ladder, ModeLabel, Monomial, MultiModeState};

/// Quadrature covariance matrix `V_ij = <{dx_i, dx_j}>` over `(q_1, p_1, ..., q_N, p_N)`
/// with `q = (a + a^+)/sqrt2`, `p = (a - a^+)/(i sqrt2)`; vacuum is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: Vec<ModeLabel>,
    matrix: DMatrix<f64>,
    mean: DVector<f64>,
}

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

impl CovarianceMatrix {
    pub fn new(modes: Vec<ModeLabel>, matrix: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        let n = 2 * modes.len();
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        if matrix.nrows() != n || matrix.ncols() != n || mean.len() != n {
            return Err(Error::Config(format!(
                "covariance of shape {}x{} for {} modes",
                matrix.nrows(),
                matrix.ncols(),
                modes.len()
            )));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE * matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(CovarianceMatrix { modes, matrix, mean })
    }

    /// Zero-mean covariance without validation, for internal transforms.
    pub(crate) fn new_unchecked(modes: Vec<ModeLabel>, matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        CovarianceMatrix {
            modes,
            matrix,
            mean: DVector::zeros(n),
        }
    }

    pub fn vacuum(modes: &[ModeLabel]) -> Self {
        let n = 2 * modes.len();
        CovarianceMatrix {
            modes: modes.to_vec(),
            matrix: DMatrix::identity(n, n),
            mean: DVector::zeros(n),
        }
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    fn position(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(Error::UnknownMode(mode))
    }

    /// The 2x2 block `<{dx_a, dx_b}>` for quadratures of modes `a` (rows) and `b`.
    pub fn block(&self, a: ModeLabel, b: ModeLabel) -> Result<DMatrix<f64>> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        Ok(self.matrix.view((2 * i, 2 * j), (2, 2)).into_owned())
    }

    /// Sub-matrix over the listed modes, in that order.
    pub fn select(&self, modes: &[ModeLabel]) -> Result<CovarianceMatrix> {
        let idx: Vec<usize> = modes
            .iter()
            .map(|&m| self.position(m))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flat_map(|k| [2 * k, 2 * k + 1])
            .collect();
        let n = idx.len();
        Ok(CovarianceMatrix {
            modes: modes.to_vec(),
            matrix: DMatrix::from_fn(n, n, |r, c| self.matrix[(idx[r], idx[c])]),
            mean: DVector::from_fn(n, |r, _| self.mean[idx[r]]),
        })
    }

    /// Scalar of a single-mode block `V I`, checking the form.
    pub fn local_variance(&self, mode: ModeLabel, tol: f64) -> Result<f64> {
        let b = self.block(mode, mode)?;
        let dev = (b[(0, 0)] - b[(1, 1)]).abs().max(b[(0, 1)].abs());
        if dev > tol * b[(0, 0)].abs().max(1.0) {
            return Err(Error::NotStandardForm(dev));
        }
        Ok(0.5 * (b[(0, 0)] + b[(1, 1)]))
    }

    /// Scalar `c` of a cross block of the form `c I` (`flip = false`) or
    /// `c Z` (`flip = true`).
    pub fn cross_scalar(&self, a: ModeLabel, b: ModeLabel, flip: bool, tol: f64) -> Result<f64> {
        let blk = self.block(a, b)?;
        let sign = if flip { -1.0 } else { 1.0 };
        let dev = (blk[(0, 0)] - sign * blk[(1, 1)])
            .abs()
            .max(blk[(0, 1)].abs())
            .max(blk[(1, 0)].abs());
        let scale = blk.amax().max(1.0);
        if dev > tol * scale {
            return Err(Error::NotStandardForm(dev));
        }
        Ok(0.5 * (blk[(0, 0)] + sign * blk[(1, 1)]))
    }
}

/// Extracts means and symmetrized second moments of the listed modes.
///
/// Only normal-ordered moments `<a_i a_j>` and `<a_i^+ a_j>` are evaluated
/// on the state, which is exact for a truncated state vector; the remaining
/// orderings follow from `[a, a^+] = 1`.
pub fn covariance_matrix(state: &MultiModeState, modes: &[ModeLabel]) -> Result<CovarianceMatrix> {
    let n = modes.len();
    if n == 0 {
        return Err(Error::EmptyModes);
    }
    let first: Vec<Complex64> = modes
        .iter()
        .map(|&m| state.expectation(&Monomial::new(vec![Ladder::annihilate(m)])))
        .collect::<Result<_>>()?;
    let mut pair = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut number = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in i..n {
            let aa = state.expectation(&Monomial::new(vec![
                Ladder::annihilate(modes[i]),
                Ladder::annihilate(modes[j]),
            ]))?;
            pair[(i, j)] = aa;
            pair[(j, i)] = aa;
            let nij = state.expectation(&Monomial::new(vec![
                Ladder::create(modes[i]),
                Ladder::annihilate(modes[j]),
            ]))?;
            number[(i, j)] = nij;
            number[(j, i)] = nij.conj();
        }
    }

    let h = std::f64::consts::FRAC_1_SQRT_2;
    // coefficient of a in q and p
    let coeff = [Complex64::new(h, 0.0), Complex64::new(0.0, -h)];
    let mut mean = DVector::zeros(2 * n);
    for i in 0..n {
        for (x, u) in coeff.iter().enumerate() {
            mean[2 * i + x] = 2.0 * (u * first[i]).re;
        }
    }
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            for (x, ux) in coeff.iter().enumerate() {
                for (y, uy) in coeff.iter().enumerate() {
                    let s = 2.0 * ux * uy * pair[(i, j)]
                        + 2.0 * ux.conj() * uy.conj() * pair[(i, j)].conj()
                        + ux * uy.conj() * (2.0 * number[(j, i)] + delta)
                        + ux.conj() * uy * (2.0 * number[(i, j)] + delta);
                    let r = 2 * i + x;
                    let c = 2 * j + y;
                    matrix[(r, c)] = s.re - 2.0 * mean[r] * mean[c];
                }
            }
        }
    }
    // symmetrize away rounding
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    CovarianceMatrix::new(modes.to_vec(), matrix, mean)
}
