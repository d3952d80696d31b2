//! Optical building blocks and the end-to-end scenario pipelines.

mod channel;
mod heralded;
mod kernel;
mod scenario;
mod states;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use channel::{apply_loss, LossChannel};
pub use heralded::{photon_subtract, quantum_scissors, Herald, HeraldedOutcome, HERALD_THRESHOLD};
pub use kernel::{bs_kernel, sector_generator, BSKernel};
pub use scenario::{
    run_scenario, ChannelModel, Scenario, ScenarioConfig, ScenarioOutput, DEFAULT_EVE_VARIANCE,
    DEFAULT_KAPPA_PS, DEFAULT_KAPPA_QS,
};
pub use states::{eve_squeezing, tmsv, tmsv_on};

use crate::fock::ModeLabel;

/// `r = ln(10^(dB/10)) / 2`
pub fn squeezing_from_db(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

/// `10 log10(e^(2r))`
pub fn squeezing_to_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// `eta = 10^(-dB/10)`
pub fn transmissivity_from_loss_db(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// Scissors gain for a given ancilla splitter transmissivity, `kappa = 1/(1+g^2)`.
pub fn gain_from_kappa(kappa: f64) -> f64 {
    ((1.0 - kappa) / kappa).sqrt()
}

pub fn kappa_from_gain(g: f64) -> f64 {
    1.0 / (1.0 + g * g)
}

/// Per-mode Fock cutoffs (maximum photon index, inclusive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoffs(BTreeMap<ModeLabel, usize>);

impl Default for Cutoffs {
    fn default() -> Self {
        use ModeLabel::*;
        Cutoffs(
            [(A, 20), (B, 20), (E, 20), (EPrime, 20), (F, 4), (C, 2), (CPrime, 2), (D, 2)]
                .into_iter()
                .collect(),
        )
    }
}

impl Cutoffs {
    /// Every mode at the same cutoff.
    pub fn uniform(cutoff: usize) -> Self {
        Cutoffs(ModeLabel::ALL.iter().map(|&m| (m, cutoff)).collect())
    }

    pub fn get(&self, mode: ModeLabel) -> usize {
        self.0[&mode]
    }

    pub fn set(&mut self, mode: ModeLabel, cutoff: usize) {
        self.0.insert(mode, cutoff);
    }

    pub fn with(mut self, mode: ModeLabel, cutoff: usize) -> Self {
        self.set(mode, cutoff);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeLabel, usize)> + '_ {
        self.0.iter().map(|(&m, &c)| (m, c))
    }
}
