use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{ModeLabel, MultiModeState};

/// Two-mode squeezed vacuum `sum_n (-tanh r)^n / cosh r |n, n>` on `(A, B)`,
/// both truncated at `cutoff`.
pub fn tmsv(r: f64, cutoff: usize) -> Result<MultiModeState> {
    tmsv_on(r, (ModeLabel::A, cutoff), (ModeLabel::B, cutoff))
}

/// Two-mode squeezed vacuum on arbitrary labeled modes.
///
/// Amplitudes are the exact coefficients up to `min(cutoffs)`; the discarded
/// tail `tanh(r)^(2(N+1))` is recorded in `norm_leak` rather than
/// renormalized into the kept components.
pub fn tmsv_on(
    r: f64,
    (mode_1, cutoff_1): (ModeLabel, usize),
    (mode_2, cutoff_2): (ModeLabel, usize),
) -> Result<MultiModeState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "squeezing r",
            value: r,
            domain: "[0, inf)",
        });
    }
    let lambda = r.tanh();
    let n_max = cutoff_1.min(cutoff_2);
    let mut amps = vec![Complex64::new(0.0, 0.0); (cutoff_1 + 1) * (cutoff_2 + 1)];
    let mut c = 1.0 / r.cosh();
    for n in 0..=n_max {
        amps[n * (cutoff_2 + 1) + n] = Complex64::new(c, 0.0);
        c *= -lambda;
    }
    let leak = lambda.powi(2 * (n_max as i32 + 1));
    MultiModeState::from_amplitudes(&[mode_1, mode_2], &[cutoff_1, cutoff_2], amps, leak)
}

/// Squeezing of Eve's purifying pair for a given single-mode quadrature
/// variance `V = cosh(2 r_E)`.
pub fn eve_squeezing(variance: f64) -> Result<f64> {
    if !(variance >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eve_variance",
            value: variance,
            domain: "[1, inf)",
        });
    }
    Ok(variance.acosh() / 2.0)
}
