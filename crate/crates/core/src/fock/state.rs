use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{permute_axes, strides_for, DensityOperator, ModeLabel, Monomial};
use crate::error::{Error, Result};
use crate::optics::BSKernel;

/// Pure state over labeled, individually truncated bosonic modes.
///
/// Amplitudes are stored row-major with the last mode varying fastest. The
/// amplitudes are not renormalized after truncation: for states built from
/// normalized inputs by unitary steps, `norm_sqr() + norm_leak()` stays 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    modes: Vec<ModeLabel>,
    cutoffs: Vec<usize>,
    amplitudes: Vec<Complex64>,
    norm_leak: f64,
}

fn validate_modes(modes: &[ModeLabel], cutoffs: &[usize]) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::EmptyModes);
    }
    if modes.len() != cutoffs.len() {
        return Err(Error::Config(format!(
            "{} modes but {} cutoffs",
            modes.len(),
            cutoffs.len()
        )));
    }
    for (k, m) in modes.iter().enumerate() {
        if modes[..k].contains(m) {
            return Err(Error::DuplicateMode(*m));
        }
        if cutoffs[k] < 1 {
            return Err(Error::InvalidCutoff {
                mode: *m,
                cutoff: cutoffs[k],
            });
        }
    }
    Ok(())
}

impl MultiModeState {
    /// The all-modes vacuum `|0...0>`.
    pub fn vacuum(modes: &[ModeLabel], cutoffs: &[usize]) -> Result<Self> {
        validate_modes(modes, cutoffs)?;
        let dim: usize = cutoffs.iter().map(|c| c + 1).product();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(MultiModeState {
            modes: modes.to_vec(),
            cutoffs: cutoffs.to_vec(),
            amplitudes,
            norm_leak: 0.0,
        })
    }

    /// A Fock basis state with the given per-mode occupations.
    pub fn basis(modes: &[ModeLabel], cutoffs: &[usize], occupation: &[usize]) -> Result<Self> {
        let mut state = Self::vacuum(modes, cutoffs)?;
        if occupation.len() != modes.len() {
            return Err(Error::Config("occupation length mismatch".into()));
        }
        if let Some(&n) = occupation.iter().zip(cutoffs).find(|(n, c)| n > c).map(|(n, _)| n) {
            return Err(Error::InvalidParameter {
                name: "occupation",
                value: n as f64,
                domain: "[0, cutoff]",
            });
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        let idx = state.flat_index(occupation);
        state.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(
        modes: &[ModeLabel],
        cutoffs: &[usize],
        amplitudes: Vec<Complex64>,
        norm_leak: f64,
    ) -> Result<Self> {
        validate_modes(modes, cutoffs)?;
        let dim: usize = cutoffs.iter().map(|c| c + 1).product();
        if amplitudes.len() != dim {
            return Err(Error::Config(format!(
                "expected {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        if !(norm_leak >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "norm_leak",
                value: norm_leak,
                domain: "[0, inf)",
            });
        }
        Ok(MultiModeState {
            modes: modes.to_vec(),
            cutoffs: cutoffs.to_vec(),
            amplitudes,
            norm_leak,
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cutoffs.iter().map(|c| c + 1).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Cumulative probability discarded by truncation clamps.
    pub fn norm_leak(&self) -> f64 {
        self.norm_leak
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn position(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(Error::UnknownMode(mode))
    }

    pub fn contains(&self, mode: ModeLabel) -> bool {
        self.modes.contains(&mode)
    }

    pub fn cutoff_of(&self, mode: ModeLabel) -> Result<usize> {
        Ok(self.cutoffs[self.position(mode)?])
    }

    pub fn flat_index(&self, occupation: &[usize]) -> usize {
        let strides = strides_for(&self.dims());
        occupation.iter().zip(&strides).map(|(n, s)| n * s).sum()
    }

    /// Amplitude of the basis state with the given occupations (in mode order).
    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        self.amplitudes[self.flat_index(occupation)]
    }

    /// Outer product; mode order is `self` then `other`.
    pub fn tensor(&self, other: &MultiModeState) -> Result<MultiModeState> {
        if let Some(m) = other.modes.iter().find(|m| self.modes.contains(m)) {
            return Err(Error::DuplicateMode(*m));
        }
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for &x in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|&y| x * y));
        }
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.extend_from_slice(&other.cutoffs);
        let leak = self.norm_leak + other.norm_leak - self.norm_leak * other.norm_leak;
        Ok(MultiModeState {
            modes,
            cutoffs,
            amplitudes,
            norm_leak: leak,
        })
    }

    /// Applies a two-mode photon-number-conserving kernel to `(mode_i, mode_j)`.
    ///
    /// The kernel's first mode is `mode_i`. Output components whose photon
    /// number in either mode would exceed that mode's cutoff are dropped and
    /// their probability added to `norm_leak`.
    pub fn apply_two_mode_kernel(
        &self,
        kernel: &BSKernel,
        mode_i: ModeLabel,
        mode_j: ModeLabel,
    ) -> Result<MultiModeState> {
        if mode_i == mode_j {
            return Err(Error::SameMode(mode_i));
        }
        let p = self.position(mode_i)?;
        let q = self.position(mode_j)?;
        let (ci, cj) = (self.cutoffs[p], self.cutoffs[q]);
        if kernel.cutoff_i() != ci || kernel.cutoff_j() != cj {
            return Err(Error::KernelCutoffMismatch {
                kernel_i: kernel.cutoff_i(),
                kernel_j: kernel.cutoff_j(),
                mode_i: ci,
                mode_j: cj,
            });
        }
        let dims = self.dims();
        let strides = strides_for(&dims);
        let (sp, sq) = (strides[p], strides[q]);

        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; self.amplitudes.len()];
        let mut leak = 0.0;
        let mut input = vec![zero; ci + cj + 1];
        let mut output = vec![zero; ci + cj + 1];

        for base in 0..self.amplitudes.len() {
            if (base / sp) % dims[p] != 0 || (base / sq) % dims[q] != 0 {
                continue;
            }
            for n in 0..=(ci + cj) {
                let k_lo = n.saturating_sub(cj);
                let k_hi = n.min(ci);
                let mut any = false;
                for k in k_lo..=k_hi {
                    let z = self.amplitudes[base + k * sp + (n - k) * sq];
                    input[k] = z;
                    any |= z != zero;
                }
                if !any {
                    continue;
                }
                let block = kernel.block(n);
                for (k_out, slot) in output.iter_mut().enumerate().take(n + 1) {
                    let mut acc = zero;
                    for k in k_lo..=k_hi {
                        acc += input[k] * block[(k_out, k)];
                    }
                    *slot = acc;
                }
                for (k_out, z) in output.iter().enumerate().take(n + 1) {
                    if k_out >= k_lo && k_out <= k_hi {
                        out[base + k_out * sp + (n - k_out) * sq] = *z;
                    } else {
                        leak += z.norm_sqr();
                    }
                }
            }
        }
        Ok(MultiModeState {
            modes: self.modes.clone(),
            cutoffs: self.cutoffs.clone(),
            amplitudes: out,
            norm_leak: self.norm_leak + leak,
        })
    }

    /// Multiplies every component by `phase(n)`, where `n` is the photon
    /// number in `mode`. Unit-modulus phases give a local unitary.
    pub fn apply_diagonal(
        &self,
        mode: ModeLabel,
        phase: impl Fn(usize) -> Complex64,
    ) -> Result<MultiModeState> {
        let p = self.position(mode)?;
        let dims = self.dims();
        let stride = strides_for(&dims)[p];
        let factors: Vec<Complex64> = (0..dims[p]).map(phase).collect();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, &z)| z * factors[(idx / stride) % dims[p]])
            .collect();
        Ok(MultiModeState {
            amplitudes,
            ..self.clone()
        })
    }

    /// Phase-space rotation `exp(i phi n)` on one mode.
    pub fn rotate(&self, mode: ModeLabel, phi: f64) -> Result<MultiModeState> {
        self.apply_diagonal(mode, |n| Complex64::from_polar(1.0, phi * n as f64))
    }

    /// Unnormalized projection of `mode` onto `|n>`; the mode is removed.
    pub fn project(&self, mode: ModeLabel, n: usize) -> Result<MultiModeState> {
        let p = self.position(mode)?;
        if self.modes.len() == 1 {
            return Err(Error::EmptyModes);
        }
        if n > self.cutoffs[p] {
            return Err(Error::InvalidParameter {
                name: "projection photon number",
                value: n as f64,
                domain: "[0, cutoff]",
            });
        }
        let dims = self.dims();
        let stride = strides_for(&dims)[p];
        let block = stride * dims[p];
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() / dims[p]);
        for outer in (0..self.amplitudes.len()).step_by(block) {
            let start = outer + n * stride;
            amplitudes.extend_from_slice(&self.amplitudes[start..start + stride]);
        }
        let mut modes = self.modes.clone();
        modes.remove(p);
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.remove(p);
        Ok(MultiModeState {
            modes,
            cutoffs,
            amplitudes,
            norm_leak: self.norm_leak,
        })
    }

    pub fn relabel(&self, from: ModeLabel, to: ModeLabel) -> Result<MultiModeState> {
        let p = self.position(from)?;
        if from != to && self.contains(to) {
            return Err(Error::DuplicateMode(to));
        }
        let mut out = self.clone();
        out.modes[p] = to;
        Ok(out)
    }

    /// Reorders the tensor axes so the modes appear in `order`.
    pub fn reorder(&self, order: &[ModeLabel]) -> Result<MultiModeState> {
        if order.len() != self.modes.len() {
            return Err(Error::ModeCount {
                expected: self.modes.len(),
                found: order.len(),
            });
        }
        let axes = order
            .iter()
            .map(|&m| self.position(m))
            .collect::<Result<Vec<_>>>()?;
        let amplitudes = permute_axes(&self.amplitudes, &self.dims(), &axes);
        Ok(MultiModeState {
            modes: order.to_vec(),
            cutoffs: axes.iter().map(|&k| self.cutoffs[k]).collect(),
            amplitudes,
            norm_leak: self.norm_leak,
        })
    }

    pub fn scaled(&self, factor: f64) -> MultiModeState {
        MultiModeState {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
            ..self.clone()
        }
    }

    /// Rescales to unit amplitude norm and clears the leak ledger.
    pub fn normalized(&self) -> MultiModeState {
        let norm = self.norm_sqr().sqrt();
        let mut out = self.scaled(1.0 / norm);
        out.norm_leak = 0.0;
        out
    }

    /// `<self|other>`; both states must share modes and cutoffs in the same order.
    pub fn inner(&self, other: &MultiModeState) -> Result<Complex64> {
        if self.modes != other.modes || self.cutoffs != other.cutoffs {
            return Err(Error::Config("inner product of differently shaped states".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// `|<self|other>|^2 / (<self|self><other|other>)`
    pub fn fidelity(&self, other: &MultiModeState) -> Result<f64> {
        let overlap = self.inner(other)?;
        Ok(overlap.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Photon-number distribution of one mode, normalized by the state norm.
    pub fn photon_distribution(&self, mode: ModeLabel) -> Result<Vec<f64>> {
        let p = self.position(mode)?;
        let dims = self.dims();
        let stride = strides_for(&dims)[p];
        let mut probs = vec![0.0; dims[p]];
        for (idx, z) in self.amplitudes.iter().enumerate() {
            probs[(idx / stride) % dims[p]] += z.norm_sqr();
        }
        let total = self.norm_sqr();
        probs.iter_mut().for_each(|x| *x /= total);
        Ok(probs)
    }

    /// `<monomial>` under the normalized state.
    ///
    /// Creation operators acting on a mode's top Fock level map out of the
    /// truncated space and contribute nothing.
    pub fn expectation(&self, monomial: &Monomial) -> Result<Complex64> {
        let positions = monomial
            .0
            .iter()
            .map(|op| self.position(op.mode))
            .collect::<Result<Vec<_>>>()?;
        let dims = self.dims();
        let strides = strides_for(&dims);
        let mut occupation = vec![0usize; dims.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &z) in self.amplitudes.iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            for (axis, occ) in occupation.iter_mut().enumerate() {
                *occ = (idx / strides[axis]) % dims[axis];
            }
            if let Some(coeff) = monomial.act_on_basis(&positions, &self.cutoffs, &mut occupation) {
                let target: usize = occupation.iter().zip(&strides).map(|(n, s)| n * s).sum();
                acc += self.amplitudes[target].conj() * z * coeff;
            }
        }
        Ok(acc / self.norm_sqr())
    }

    /// Reduced density operator on `keep` (in the given order).
    ///
    /// The result is not renormalized: its trace is the state's squared norm.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::EmptyModes);
        }
        let mut axes = Vec::with_capacity(self.modes.len());
        for (k, m) in keep.iter().enumerate() {
            if keep[..k].contains(m) {
                return Err(Error::DuplicateMode(*m));
            }
            axes.push(self.position(*m)?);
        }
        let kept_dim: usize = axes.iter().map(|&k| self.cutoffs[k] + 1).product();
        let rest: Vec<usize> = (0..self.modes.len()).filter(|k| !axes.contains(k)).collect();
        axes.extend(rest);
        let data = permute_axes(&self.amplitudes, &self.dims(), &axes);
        let rest_dim = data.len() / kept_dim;
        let psi = DMatrix::from_row_slice(kept_dim, rest_dim, &data);
        let matrix = &psi * psi.adjoint();
        DensityOperator::from_matrix(
            keep,
            &keep
                .iter()
                .map(|m| self.cutoff_of(*m))
                .collect::<Result<Vec<_>>>()?,
            matrix,
        )
    }

    /// `|psi><psi|` over all modes.
    pub fn density(&self) -> Result<DensityOperator> {
        self.partial_trace(&self.modes.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Ladder;
    use crate::optics::{bs_kernel, tmsv};
    use ModeLabel::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_has_unit_amplitude_at_origin() {
        let s = MultiModeState::vacuum(&[B], &[20]).unwrap();
        assert_eq!(s.amplitudes().len(), 21);
        assert_eq!(s.amplitude(&[0]), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.norm_leak(), 0.0);
        let s = MultiModeState::vacuum(&[C, CPrime], &[2, 2]).unwrap();
        assert_eq!(s.amplitude(&[0, 0]), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn vacuum_rejects_bad_input() {
        assert_eq!(MultiModeState::vacuum(&[], &[]), Err(Error::EmptyModes));
        assert_eq!(
            MultiModeState::vacuum(&[A, A], &[2, 2]),
            Err(Error::DuplicateMode(A))
        );
        assert!(matches!(
            MultiModeState::vacuum(&[A], &[0]),
            Err(Error::InvalidCutoff { .. })
        ));
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = MultiModeState::vacuum(&[A], &[3]).unwrap();
        let cst = MultiModeState::basis(&[C], &[2], &[1]).unwrap();
        let joint = a.tensor(&cst).unwrap();
        assert_eq!(joint.modes(), &[A, C]);
        assert_eq!(joint.amplitude(&[0, 1]), c(1.0));
        assert!((joint.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(a.tensor(&a), Err(Error::DuplicateMode(A)));
    }

    #[test]
    fn tensor_norm_is_multiplicative() {
        let s1 = MultiModeState::from_amplitudes(&[A], &[1], vec![c(0.5), c(0.5)], 0.0).unwrap();
        let s2 = MultiModeState::from_amplitudes(&[B], &[1], vec![c(1.0), c(2.0)], 0.0).unwrap();
        let t = s1.tensor(&s2).unwrap();
        assert!((t.norm_sqr() - s1.norm_sqr() * s2.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn tensor_then_trace_recovers_tmsv() {
        let psi = tmsv(0.4, 12).unwrap();
        let rho = psi.density().unwrap();
        let joint = psi
            .tensor(&MultiModeState::vacuum(&[EPrime], &[5]).unwrap())
            .unwrap();
        let back = joint.partial_trace(&[A, B]).unwrap();
        let diff = (back.matrix() - rho.matrix()).camax();
        assert!(diff < 1e-12, "diff {diff}");
    }

    #[test]
    fn identity_kernel_leaves_state_unchanged() {
        let psi = tmsv(0.3, 8).unwrap();
        let k = bs_kernel(1.0, 8, 8).unwrap();
        let out = psi.apply_two_mode_kernel(&k, A, B).unwrap();
        for (x, y) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn balanced_kernel_on_single_photon() {
        let s = MultiModeState::basis(&[A, B], &[2, 2], &[1, 0]).unwrap();
        let k = bs_kernel(0.5, 2, 2).unwrap();
        let out = s.apply_two_mode_kernel(&k, A, B).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[1, 0]) - c(h)).norm() < 1e-14);
        assert!((out.amplitude(&[0, 1]) - c(-h)).norm() < 1e-14);
    }

    #[test]
    fn kernel_keeps_vacuum() {
        let s = MultiModeState::vacuum(&[A, B, C], &[3, 3, 2]).unwrap();
        for t in [0.0, 0.2, 0.5, 0.9] {
            let k = bs_kernel(t, 3, 2).unwrap();
            let out = s.apply_two_mode_kernel(&k, B, C).unwrap();
            assert_eq!(out.amplitude(&[0, 0, 0]), c(1.0));
            assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_errors() {
        let s = MultiModeState::vacuum(&[A, B], &[3, 3]).unwrap();
        let k = bs_kernel(0.5, 3, 2).unwrap();
        assert!(matches!(
            s.apply_two_mode_kernel(&k, A, B),
            Err(Error::KernelCutoffMismatch { .. })
        ));
        let k = bs_kernel(0.5, 3, 3).unwrap();
        assert_eq!(s.apply_two_mode_kernel(&k, A, A), Err(Error::SameMode(A)));
        assert_eq!(
            s.apply_two_mode_kernel(&k, A, D),
            Err(Error::UnknownMode(D))
        );
    }

    #[test]
    fn clamped_components_go_to_leak() {
        // |2,0> through a balanced splitter into a mode with cutoff 1
        let s = MultiModeState::basis(&[A, B], &[2, 1], &[2, 0]).unwrap();
        let k = bs_kernel(0.5, 2, 1).unwrap();
        let out = s.apply_two_mode_kernel(&k, A, B).unwrap();
        // |0,2> carries probability 1/4 and does not fit
        assert!((out.norm_leak() - 0.25).abs() < 1e-14);
        assert!((out.norm_sqr() + out.norm_leak() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn number_expectations() {
        let one = MultiModeState::basis(&[A], &[3], &[1]).unwrap();
        let n = one.expectation(&Monomial::number(A)).unwrap();
        assert!((n - c(1.0)).norm() < 1e-15);

        let r: f64 = 0.5;
        let psi = tmsv(r, 40).unwrap();
        for m in [A, B] {
            let n = psi.expectation(&Monomial::number(m)).unwrap();
            assert!((n.re - r.sinh().powi(2)).abs() < 1e-12);
        }
        let ab = psi
            .expectation(&Monomial::new(vec![Ladder::annihilate(A), Ladder::annihilate(B)]))
            .unwrap();
        assert!((ab.re + r.cosh() * r.sinh()).abs() < 1e-12);
    }

    #[test]
    fn creation_on_top_level_is_dropped() {
        let top = MultiModeState::basis(&[A], &[2], &[2]).unwrap();
        let m = Monomial::new(vec![Ladder::annihilate(A), Ladder::create(A)]);
        assert_eq!(top.expectation(&m).unwrap(), c(0.0));
    }

    #[test]
    fn projection_removes_mode() {
        let s = MultiModeState::basis(&[A, B, C], &[2, 2, 1], &[1, 2, 1]).unwrap();
        let p = s.project(C, 1).unwrap();
        assert_eq!(p.modes(), &[A, B]);
        assert_eq!(p.amplitude(&[1, 2]), c(1.0));
        let p0 = s.project(C, 0).unwrap();
        assert_eq!(p0.norm_sqr(), 0.0);
    }

    #[test]
    fn reorder_moves_axes() {
        let s = MultiModeState::basis(&[A, B, C], &[2, 3, 1], &[1, 2, 1]).unwrap();
        let r = s.reorder(&[C, A, B]).unwrap();
        assert_eq!(r.cutoffs(), &[1, 2, 3]);
        assert_eq!(r.amplitude(&[1, 1, 2]), c(1.0));
    }

    #[test]
    fn photon_distribution_of_tmsv_is_thermal() {
        let r: f64 = 0.3;
        let psi = tmsv(r, 30).unwrap();
        let lambda = r.tanh();
        let probs = psi.photon_distribution(B).unwrap();
        for (n, p) in probs.iter().enumerate().take(10) {
            let expect = lambda.powi(2 * n as i32) / r.cosh().powi(2);
            assert!((p - expect).abs() < 1e-14);
        }
    }
}
