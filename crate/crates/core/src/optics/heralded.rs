use serde::{Deserialize, Serialize};

use super::bs_kernel;
use crate::error::{Error, Result};
use crate::fock::{ModeLabel, MultiModeState};

/// Success probabilities below this are treated as a failed herald.
pub const HERALD_THRESHOLD: f64 = 1e-12;

/// Detector pattern that announced success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Herald {
    /// Scissors: one click on the signal detector, none on the ancilla detector.
    Scissors10,
    /// Scissors: no click on the signal detector, one on the ancilla detector.
    Scissors01,
    /// Subtraction: one photon on the tap detector.
    Subtracted1,
}

/// Post-selected state of a heralded operation.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedOutcome {
    /// Normalized conditional state (`norm_leak` cleared).
    pub state: MultiModeState,
    /// Total success probability over all accepted detector patterns.
    pub success_probability: f64,
    /// Pattern whose conditional state is reported; other accepted patterns
    /// are mapped onto it by a deterministic local correction.
    pub branch: Herald,
    pub branch_probabilities: Vec<(Herald, f64)>,
    /// Truncation loss of the input relative to `success_probability`: an
    /// upper bound on the probability error of the conditional state.
    pub truncation_leak: f64,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            domain: "(0, 1)",
        })
    }
}

/// Quantum scissors on `mode`.
///
/// A single photon in `C` and vacuum in `C'` meet on a splitter of
/// transmissivity `kappa`; `C` then meets `mode` on a balanced splitter and
/// both are measured. Acceptance is exactly one click in total. The surviving
/// port `C'` is relabeled to `mode`, truncated to `span{|0>, |1>}` with gain
/// `g = sqrt((1-kappa)/kappa)`.
///
/// With these splitter conventions the `Scissors01` pattern yields
/// `a0|0> + g a1|1>` and `Scissors10` yields `a0|0> - g a1|1>`; the latter is
/// mapped onto the former by `|1> -> -|1>` so both patterns count toward the
/// success probability.
pub fn quantum_scissors(
    state: &MultiModeState,
    mode: ModeLabel,
    kappa: f64,
    ancilla_cutoffs: (usize, usize),
) -> Result<HeraldedOutcome> {
    check_kappa(kappa)?;
    let (cut_c, cut_cp) = ancilla_cutoffs;
    let mode_cutoff = state.cutoff_of(mode)?;
    let input_norm = state.norm_sqr();

    let ancilla =
        MultiModeState::basis(&[ModeLabel::C, ModeLabel::CPrime], &[cut_c, cut_cp], &[1, 0])?;
    let joint = state.tensor(&ancilla)?;
    let joint = joint.apply_two_mode_kernel(
        &bs_kernel(kappa, cut_c, cut_cp)?,
        ModeLabel::C,
        ModeLabel::CPrime,
    )?;
    let joint = joint.apply_two_mode_kernel(&bs_kernel(0.5, mode_cutoff, cut_c)?, mode, ModeLabel::C)?;

    let branch_01 = joint.project(mode, 0)?.project(ModeLabel::C, 1)?;
    let branch_10 = joint.project(mode, 1)?.project(ModeLabel::C, 0)?;
    let p01 = branch_01.norm_sqr() / input_norm;
    let p10 = branch_10.norm_sqr() / input_norm;
    let success = p01 + p10;
    if !(success >= HERALD_THRESHOLD) {
        return Err(Error::HeraldFailure {
            probability: success,
        });
    }

    // canonical branch with the sign-corrected other branch folded in
    let flipped = branch_10.apply_diagonal(ModeLabel::CPrime, |n| {
        num_complex::Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    })?;
    debug_assert!({
        let overlap = branch_01.inner(&flipped).map(|z| z.re).unwrap_or(0.0);
        success < 1e-8 || (overlap - branch_01.norm_sqr()).abs() < 1e-9 * input_norm
    });

    let mut order: Vec<ModeLabel> = state.modes().to_vec();
    let out = branch_01.relabel(ModeLabel::CPrime, mode)?;
    order.retain(|m| out.contains(*m));
    let out = out.reorder(&order)?.normalized();

    Ok(HeraldedOutcome {
        state: out,
        success_probability: success,
        branch: Herald::Scissors01,
        branch_probabilities: vec![(Herald::Scissors01, p01), (Herald::Scissors10, p10)],
        truncation_leak: state.norm_leak() / success,
    })
}

/// Photon subtraction on `mode`: tap with a vacuum-fed splitter of
/// transmissivity `kappa` into `D` and post-select one photon there.
pub fn photon_subtract(
    state: &MultiModeState,
    mode: ModeLabel,
    kappa: f64,
    tap_cutoff: usize,
) -> Result<HeraldedOutcome> {
    check_kappa(kappa)?;
    let mode_cutoff = state.cutoff_of(mode)?;
    let input_norm = state.norm_sqr();
    let tap = MultiModeState::vacuum(&[ModeLabel::D], &[tap_cutoff])?;
    let joint = state
        .tensor(&tap)?
        .apply_two_mode_kernel(&bs_kernel(kappa, mode_cutoff, tap_cutoff)?, mode, ModeLabel::D)?;
    let branch = joint.project(ModeLabel::D, 1)?;
    let success = branch.norm_sqr() / input_norm;
    if !(success >= HERALD_THRESHOLD) {
        return Err(Error::HeraldFailure {
            probability: success,
        });
    }
    Ok(HeraldedOutcome {
        state: branch.normalized(),
        success_probability: success,
        branch: Herald::Subtracted1,
        branch_probabilities: vec![(Herald::Subtracted1, success)],
        truncation_leak: state.norm_leak() / success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{gain_from_kappa, kappa_from_gain, tmsv};
    use num_complex::Complex64;
    use ModeLabel::*;

    fn qubit(a0: f64, a1: f64) -> MultiModeState {
        let n = (a0 * a0 + a1 * a1).sqrt();
        let amps = vec![Complex64::new(a0 / n, 0.0), Complex64::new(a1 / n, 0.0), Complex64::new(0.0, 0.0)];
        MultiModeState::from_amplitudes(&[B], &[2], amps, 0.0).unwrap()
    }

    #[test]
    fn scissors_amplifies_qubit_input() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for g in [0.5, 1.0, 2.0] {
            let out = quantum_scissors(&qubit(h, h), B, kappa_from_gain(g), (2, 2)).unwrap();
            let n = (1.0 + g * g).sqrt();
            assert!((out.state.amplitude(&[0]).re - 1.0 / n).abs() < 1e-12);
            assert!((out.state.amplitude(&[1]).re - g / n).abs() < 1e-12);
            assert!(out.state.amplitude(&[2]).norm() < 1e-15);
            assert!((out.state.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scissors_on_vacuum_gives_vacuum() {
        let vac = MultiModeState::vacuum(&[B], &[4]).unwrap();
        for kappa in [0.05, 0.5, 0.9] {
            let out = quantum_scissors(&vac, B, kappa, (2, 2)).unwrap();
            assert!((out.state.amplitude(&[0]).norm() - 1.0).abs() < 1e-12);
            // vacuum input heralds with probability kappa
            assert!((out.success_probability - kappa).abs() < 1e-12);
        }
    }

    #[test]
    fn scissors_branches_are_equiprobable() {
        let psi = tmsv(0.6, 12).unwrap();
        let out = quantum_scissors(&psi, B, 0.3, (2, 2)).unwrap();
        let (p01, p10) = (out.branch_probabilities[0].1, out.branch_probabilities[1].1);
        assert!((p01 - p10).abs() < 1e-14);
        assert_eq!(out.state.modes(), &[A, B]);
        assert_eq!(out.state.cutoff_of(B).unwrap(), 2);
    }

    #[test]
    fn scissors_output_is_truncated() {
        let psi = tmsv(1.0, 15).unwrap();
        let out = quantum_scissors(&psi, B, 0.05, (2, 2)).unwrap();
        let probs = out.state.photon_distribution(B).unwrap();
        assert!(probs[2] < 1e-12);
    }

    #[test]
    fn scissors_gain_reported_by_kappa() {
        assert!((gain_from_kappa(0.2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn subtraction_on_vacuum_fails() {
        let vac = MultiModeState::vacuum(&[A, B], &[3, 3]).unwrap();
        assert!(matches!(
            photon_subtract(&vac, B, 0.9, 2),
            Err(Error::HeraldFailure { .. })
        ));
    }

    #[test]
    fn subtraction_probability_on_tmsv() {
        let r: f64 = 0.5;
        let kappa = 0.9;
        let out = photon_subtract(&tmsv(r, 60).unwrap(), B, kappa, 2).unwrap();
        let l2 = r.tanh().powi(2);
        let expect = (1.0 - kappa) * l2 / (r.cosh().powi(2) * (1.0 - kappa * l2).powi(2));
        assert!((out.success_probability - expect).abs() < 1e-12);
        assert!((out.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_kappa() {
        let vac = MultiModeState::vacuum(&[B], &[3]).unwrap();
        assert!(quantum_scissors(&vac, B, 0.0, (2, 2)).is_err());
        assert!(photon_subtract(&vac, B, 1.0, 2).is_err());
    }
}
