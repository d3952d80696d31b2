use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{strides_for, ModeLabel, Monomial};
use crate::error::{Error, Result};

/// Operator on a subset of modes, stored as a dense square matrix whose
/// row/column index is the row-major multi-index over `modes`.
///
/// Also used for partially transposed operators, which are Hermitian but
/// not necessarily positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    modes: Vec<ModeLabel>,
    cutoffs: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn from_matrix(
        modes: &[ModeLabel],
        cutoffs: &[usize],
        matrix: DMatrix<Complex64>,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        let dim: usize = cutoffs.iter().map(|c| c + 1).product();
        if modes.len() != cutoffs.len() || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Config(format!(
                "operator of shape {}x{} does not match dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityOperator {
            modes: modes.to_vec(),
            cutoffs: cutoffs.to_vec(),
            matrix,
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn normalized(&self) -> DensityOperator {
        let tr = self.trace().re;
        DensityOperator {
            matrix: self.matrix.map(|z| z / tr),
            ..self.clone()
        }
    }

    fn position(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(Error::UnknownMode(mode))
    }

    /// Transposes the bra/ket indices of the listed modes.
    pub fn partial_transpose(&self, transpose: &[ModeLabel]) -> Result<DensityOperator> {
        let mut axes = Vec::with_capacity(transpose.len());
        for m in transpose {
            let k = self.position(*m)?;
            if !axes.contains(&k) {
                axes.push(k);
            }
        }
        if axes.is_empty() || axes.len() == self.modes.len() {
            return Err(Error::InvalidTransposeSet);
        }
        let dims: Vec<usize> = self.cutoffs.iter().map(|c| c + 1).collect();
        let strides = strides_for(&dims);
        let n = self.dim();
        // index contribution of the transposed modes
        let part = |idx: usize| -> usize {
            axes.iter()
                .map(|&k| ((idx / strides[k]) % dims[k]) * strides[k])
                .sum()
        };
        let parts: Vec<usize> = (0..n).map(part).collect();
        let matrix = DMatrix::from_fn(n, n, |row, col| {
            let (pr, pc) = (parts[row], parts[col]);
            self.matrix[(row - pr + pc, col - pc + pr)]
        });
        Ok(DensityOperator {
            matrix,
            ..self.clone()
        })
    }

    /// Traces out every mode not in `keep`.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::EmptyModes);
        }
        let mut kept_axes = Vec::with_capacity(keep.len());
        for (k, m) in keep.iter().enumerate() {
            if keep[..k].contains(m) {
                return Err(Error::DuplicateMode(*m));
            }
            kept_axes.push(self.position(*m)?);
        }
        let dims: Vec<usize> = self.cutoffs.iter().map(|c| c + 1).collect();
        let strides = strides_for(&dims);
        let kept_dims: Vec<usize> = kept_axes.iter().map(|&k| dims[k]).collect();
        let kept_strides = strides_for(&kept_dims);
        let split = |idx: usize| -> (usize, usize) {
            let mut kept = 0;
            let mut rest = idx;
            for (j, &k) in kept_axes.iter().enumerate() {
                let digit = (idx / strides[k]) % dims[k];
                kept += digit * kept_strides[j];
                rest -= digit * strides[k];
            }
            (kept, rest)
        };
        let n = self.dim();
        let split_idx: Vec<(usize, usize)> = (0..n).map(split).collect();
        let out_dim: usize = kept_dims.iter().product();
        let mut matrix = DMatrix::zeros(out_dim, out_dim);
        for row in 0..n {
            let (kr, rr) = split_idx[row];
            for col in 0..n {
                let (kc, rc) = split_idx[col];
                if rr == rc {
                    matrix[(kr, kc)] += self.matrix[(row, col)];
                }
            }
        }
        let cutoffs: Vec<usize> = kept_axes.iter().map(|&k| self.cutoffs[k]).collect();
        DensityOperator::from_matrix(keep, &cutoffs, matrix)
    }

    /// `Tr(rho M) / Tr(rho)`.
    pub fn expectation(&self, monomial: &Monomial) -> Result<Complex64> {
        let positions = monomial
            .0
            .iter()
            .map(|op| self.position(op.mode))
            .collect::<Result<Vec<_>>>()?;
        let dims: Vec<usize> = self.cutoffs.iter().map(|c| c + 1).collect();
        let strides = strides_for(&dims);
        let mut occupation = vec![0usize; dims.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..self.dim() {
            for (axis, occ) in occupation.iter_mut().enumerate() {
                *occ = (col / strides[axis]) % dims[axis];
            }
            if let Some(coeff) = monomial.act_on_basis(&positions, &self.cutoffs, &mut occupation) {
                let target: usize = occupation.iter().zip(&strides).map(|(n, s)| n * s).sum();
                // (rho M)_{col,col} = rho_{col,target} M_{target,col}
                acc += self.matrix[(col, target)] * coeff;
            }
        }
        Ok(acc / self.trace())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Ladder, MultiModeState};
    use crate::optics::tmsv;
    use nalgebra::SymmetricEigen;
    use ModeLabel::*;

    fn bell() -> MultiModeState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[0] = Complex64::new(h, 0.0);
        amps[3] = Complex64::new(h, 0.0);
        MultiModeState::from_amplitudes(&[A, B], &[1, 1], amps, 0.0).unwrap()
    }

    #[test]
    fn trace_of_product_vacuum() {
        let s = MultiModeState::vacuum(&[A, B], &[3, 3]).unwrap();
        let rho = s.partial_trace(&[A]).unwrap();
        assert_eq!(rho.dim(), 4);
        assert_eq!(rho.matrix()[(0, 0)], Complex64::new(1.0, 0.0));
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_tmsv_is_thermal() {
        let r: f64 = 0.7;
        let psi = tmsv(r, 40).unwrap();
        let rho = psi.partial_trace(&[A]).unwrap();
        let lambda = r.tanh();
        for n in 0..=40 {
            let expect = lambda.powi(2 * n as i32) / r.cosh().powi(2);
            assert!((rho.matrix()[(n, n)].re - expect).abs() < 1e-14);
            if n > 0 {
                assert!(rho.matrix()[(n, n - 1)].norm() < 1e-15);
            }
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bell_partial_transpose_has_negative_half() {
        let rho = bell().density().unwrap();
        let pt = rho.partial_transpose(&[B]).unwrap();
        let eig = SymmetricEigen::new(pt.matrix().clone()).eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + 0.5).abs() < 1e-14);
        assert!((pt.trace() - rho.trace()).norm() < 1e-15);
    }

    #[test]
    fn partial_transpose_rejects_all_or_none() {
        let rho = bell().density().unwrap();
        assert_eq!(rho.partial_transpose(&[]), Err(Error::InvalidTransposeSet));
        assert_eq!(
            rho.partial_transpose(&[A, B]),
            Err(Error::InvalidTransposeSet)
        );
    }

    #[test]
    fn product_state_stays_positive_under_transpose() {
        let amps_a = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let amps_b = vec![Complex64::new(0.8, 0.0), Complex64::new(0.36, 0.48)];
        let a = MultiModeState::from_amplitudes(&[A], &[1], amps_a, 0.0).unwrap();
        let b = MultiModeState::from_amplitudes(&[B], &[1], amps_b, 0.0).unwrap();
        let rho = a.tensor(&b).unwrap().density().unwrap();
        let pt = rho.partial_transpose(&[B]).unwrap();
        let eig = SymmetricEigen::new(pt.matrix().clone()).eigenvalues;
        assert!(eig.iter().all(|&x| x > -1e-14));
    }

    #[test]
    fn density_trace_matches_state_trace() {
        let psi = tmsv(0.4, 15).unwrap();
        let rho = psi.density().unwrap();
        let rho_a = rho.partial_trace(&[A]).unwrap();
        let direct = psi.partial_trace(&[A]).unwrap();
        assert!((rho_a.matrix() - direct.matrix()).camax() < 1e-14);
    }

    #[test]
    fn density_expectation_agrees_with_state() {
        let psi = tmsv(0.4, 15).unwrap();
        let rho = psi.density().unwrap();
        let m = Monomial::new(vec![Ladder::annihilate(A), Ladder::annihilate(B)]);
        let x = psi.expectation(&m).unwrap();
        let y = rho.expectation(&m).unwrap();
        assert!((x - y).norm() < 1e-13);
    }
}
