//! Covariance-based lower bound on the secret key rate.
//!
//! For any state the rate computed from its covariance matrix alone lower
//! bounds the true rate (Gaussian states minimize it for fixed second
//! moments), so heralded non-Gaussian states are handled with the same
//! machinery as Gaussian ones.

mod covariance;
pub mod gaussian;
mod symplectic;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use covariance::{covariance_matrix, CovarianceMatrix};
pub use symplectic::{symplectic_eigenvalues, symplectic_form, symplectic_spectrum, UNPHYSICAL_TOLERANCE};

use crate::error::{Error, Result};
use crate::fock::ModeLabel;
use crate::optics::{run_scenario, ChannelModel, ScenarioConfig, ScenarioOutput};

/// Allowed deviation from the `V I` / `c I` / `c Z` block forms.
pub const FORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateBreakdown {
    pub i_ab: f64,
    pub chi_be: f64,
    pub success_probability: f64,
    pub reconciliation_efficiency: f64,
    /// `P_s (beta I_AB - chi_BE)`, possibly negative.
    pub k_raw: f64,
    pub k_effective: f64,
    pub norm_leak: f64,
}

impl KeyRateBreakdown {
    pub fn new(
        i_ab: f64,
        chi_be: f64,
        success_probability: f64,
        reconciliation_efficiency: f64,
        norm_leak: f64,
    ) -> Self {
        let k_raw = success_probability * (reconciliation_efficiency * i_ab - chi_be);
        KeyRateBreakdown {
            i_ab,
            chi_be,
            success_probability,
            reconciliation_efficiency,
            k_raw,
            k_effective: k_raw.max(0.0),
            norm_leak,
        }
    }
}

/// `I_AB = 1/2 log2(V_BB / V_B|A)` with `V_B|A = V_BB - V_AB^2 / V_AA`.
pub fn mutual_information(m_ab: &CovarianceMatrix) -> Result<f64> {
    if m_ab.modes().len() != 2 {
        return Err(Error::ModeCount {
            expected: 2,
            found: m_ab.modes().len(),
        });
    }
    let (a, b) = (m_ab.modes()[0], m_ab.modes()[1]);
    let v_aa = m_ab.local_variance(a, FORM_TOLERANCE)?;
    let v_bb = m_ab.local_variance(b, FORM_TOLERANCE)?;
    let v_ab = m_ab.cross_scalar(a, b, true, FORM_TOLERANCE)?;
    let conditional = v_bb - v_ab * v_ab / v_aa;
    if !(conditional > 0.0) {
        return Err(Error::NonPositiveVariance(conditional));
    }
    Ok(0.5 * (v_bb / conditional).log2())
}

/// Conditions Eve's pair on a homodyne (`q`) measurement of `B`:
/// `M_EF|B = M_EF - X diag(1/V_BB, 0) X^T` with `X = [V_EB I; V_FB Z]`.
pub fn condition_on_homodyne(
    m_ef: &CovarianceMatrix,
    v_bb: f64,
    v_eb: f64,
    v_fb: f64,
) -> Result<CovarianceMatrix> {
    if !(v_bb > 0.0) {
        return Err(Error::NonPositiveVariance(v_bb));
    }
    if m_ef.modes().len() != 2 {
        return Err(Error::ModeCount {
            expected: 2,
            found: m_ef.modes().len(),
        });
    }
    let x = DMatrix::from_row_slice(4, 2, &[v_eb, 0.0, 0.0, v_eb, v_fb, 0.0, 0.0, -v_fb]);
    let proj = DMatrix::from_row_slice(2, 2, &[1.0 / v_bb, 0.0, 0.0, 0.0]);
    let update = &x * proj * x.transpose();
    CovarianceMatrix::new(
        m_ef.modes().to_vec(),
        m_ef.matrix() - update,
        m_ef.mean().clone(),
    )
}

/// Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue `x`.
pub fn entropy_g(x: f64) -> f64 {
    let plus = (x + 1.0) / 2.0;
    let minus = (x - 1.0) / 2.0;
    let term = |y: f64| if y <= 0.0 { 0.0 } else { y * y.log2() };
    term(plus) - term(minus)
}

/// `chi_BE = sum g(nu^EF) - sum g(nu^EF|B)`.
pub fn holevo_bound(m_ef: &CovarianceMatrix, m_ef_given_b: &CovarianceMatrix) -> Result<f64> {
    let total: f64 = symplectic_eigenvalues(m_ef)?.into_iter().map(entropy_g).sum();
    let conditional: f64 = symplectic_eigenvalues(m_ef_given_b)?
        .into_iter()
        .map(entropy_g)
        .sum();
    Ok(total - conditional)
}

/// Key-rate breakdown from a joint covariance over `A, B, E, F`.
pub fn key_rate_from_covariance(
    joint: &CovarianceMatrix,
    success_probability: f64,
    reconciliation_efficiency: f64,
    norm_leak: f64,
) -> Result<KeyRateBreakdown> {
    use ModeLabel::*;
    let m_ab = joint.select(&[A, B])?;
    let m_ef = joint.select(&[E, F])?;
    let i_ab = mutual_information(&m_ab)?;
    let v_bb = joint.local_variance(B, FORM_TOLERANCE)?;
    let v_eb = joint.cross_scalar(E, B, false, FORM_TOLERANCE)?;
    let v_fb = joint.cross_scalar(F, B, true, FORM_TOLERANCE)?;
    let m_ef_b = condition_on_homodyne(&m_ef, v_bb, v_eb, v_fb)?;
    let chi_be = holevo_bound(&m_ef, &m_ef_b)?;
    Ok(KeyRateBreakdown::new(
        i_ab,
        chi_be,
        success_probability,
        reconciliation_efficiency,
        norm_leak,
    ))
}

/// Key rate from an already computed scenario output.
pub fn key_rate_from_output(
    config: &ScenarioConfig,
    output: &ScenarioOutput,
) -> Result<KeyRateBreakdown> {
    use ModeLabel::*;
    let joint = covariance_matrix(&output.state, &[A, B, E, F])?;
    key_rate_from_covariance(
        &joint,
        output.success_probability,
        config.reconciliation_efficiency,
        output.norm_leak,
    )
}

/// Runs the scenario and evaluates `K = P_s (I_AB - chi_BE)`.
pub fn key_rate(config: &ScenarioConfig) -> Result<KeyRateBreakdown> {
    if config.channel_model != ChannelModel::EvePurification {
        return Err(Error::Config(
            "key rate requires the eve-purification channel model".into(),
        ));
    }
    let output = run_scenario(config)?;
    key_rate_from_output(config, &output)
}
