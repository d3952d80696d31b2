use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    apply_loss, eve_squeezing, photon_subtract, quantum_scissors, squeezing_from_db,
    transmissivity_from_loss_db, tmsv_on, Cutoffs, HeraldedOutcome, LossChannel,
};
use crate::error::{Error, Result};
use crate::fock::{ModeLabel, MultiModeState};

pub const DEFAULT_KAPPA_PS: f64 = 0.95;
pub const DEFAULT_KAPPA_QS: f64 = 0.05;
pub const DEFAULT_EVE_VARIANCE: f64 = 1.002;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Tmsv,
    ReceiverPs,
    TransmitterPs,
    ReceiverQs,
    TransmitterQs,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Tmsv,
        Scenario::ReceiverPs,
        Scenario::TransmitterPs,
        Scenario::ReceiverQs,
        Scenario::TransmitterQs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Tmsv => "tmsv",
            Scenario::ReceiverPs => "receiver-ps",
            Scenario::TransmitterPs => "transmitter-ps",
            Scenario::ReceiverQs => "receiver-qs",
            Scenario::TransmitterQs => "transmitter-qs",
        }
    }

    pub fn is_subtraction(self) -> bool {
        matches!(self, Scenario::ReceiverPs | Scenario::TransmitterPs)
    }

    pub fn is_scissors(self) -> bool {
        matches!(self, Scenario::ReceiverQs | Scenario::TransmitterQs)
    }

    pub fn is_transmitter(self) -> bool {
        matches!(self, Scenario::TransmitterPs | Scenario::TransmitterQs)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelModel {
    VacuumEnvironment,
    EvePurification,
}

impl ChannelModel {
    pub fn name(self) -> &'static str {
        match self {
            ChannelModel::VacuumEnvironment => "vacuum-environment",
            ChannelModel::EvePurification => "eve-purification",
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum-environment" => Ok(ChannelModel::VacuumEnvironment),
            "eve-purification" => Ok(ChannelModel::EvePurification),
            other => Err(Error::Config(format!("unknown channel model '{other}'"))),
        }
    }
}

/// One experiment: scenario, squeezing and loss in dB, operation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub squeezing_db: f64,
    pub loss_db: f64,
    pub kappa_ps: f64,
    pub kappa_qs: f64,
    pub eve_variance: f64,
    pub channel_model: ChannelModel,
    pub cutoffs: Cutoffs,
    /// Multiplies the mutual information in the key rate.
    pub reconciliation_efficiency: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: Scenario::Tmsv,
            squeezing_db: 0.0,
            loss_db: 0.0,
            kappa_ps: DEFAULT_KAPPA_PS,
            kappa_qs: DEFAULT_KAPPA_QS,
            eve_variance: DEFAULT_EVE_VARIANCE,
            channel_model: ChannelModel::EvePurification,
            cutoffs: Cutoffs::default(),
            reconciliation_efficiency: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, squeezing_db: f64, loss_db: f64) -> Self {
        ScenarioConfig {
            scenario,
            squeezing_db,
            loss_db,
            ..Default::default()
        }
    }

    pub fn with_channel(mut self, model: ChannelModel) -> Self {
        self.channel_model = model;
        self
    }

    pub fn with_cutoffs(mut self, cutoffs: Cutoffs) -> Self {
        self.cutoffs = cutoffs;
        self
    }

    pub fn squeezing(&self) -> f64 {
        squeezing_from_db(self.squeezing_db)
    }

    pub fn eta(&self) -> f64 {
        transmissivity_from_loss_db(self.loss_db)
    }

    /// The splitter transmissivity of the active operation, if any.
    pub fn kappa(&self) -> Option<f64> {
        if self.scenario.is_subtraction() {
            Some(self.kappa_ps)
        } else if self.scenario.is_scissors() {
            Some(self.kappa_qs)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64, ok: bool, domain: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, domain })
            }
        };
        check("squeezing_db", self.squeezing_db, self.squeezing_db >= 0.0 && self.squeezing_db.is_finite(), "[0, inf)")?;
        check("loss_db", self.loss_db, self.loss_db >= 0.0 && self.loss_db.is_finite(), "[0, inf)")?;
        if self.scenario.is_subtraction() {
            check("kappa_ps", self.kappa_ps, self.kappa_ps > 0.0 && self.kappa_ps < 1.0, "(0, 1)")?;
        }
        if self.scenario.is_scissors() {
            check("kappa_qs", self.kappa_qs, self.kappa_qs > 0.0 && self.kappa_qs < 1.0, "(0, 1)")?;
        }
        check("eve_variance", self.eve_variance, self.eve_variance >= 1.0, "[1, inf)")?;
        check(
            "reconciliation_efficiency",
            self.reconciliation_efficiency,
            self.reconciliation_efficiency > 0.0 && self.reconciliation_efficiency <= 1.0,
            "(0, 1]",
        )?;
        for (mode, cutoff) in self.cutoffs.iter() {
            if cutoff < 1 {
                return Err(Error::InvalidCutoff { mode, cutoff });
            }
        }
        Ok(())
    }
}

/// Result of a scenario pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    /// Pure joint state over `A`, `B` and the channel's environment modes.
    pub state: MultiModeState,
    pub success_probability: f64,
    /// Truncation-error budget: probability discarded by cutoffs, relative
    /// to the heralded branch.
    pub norm_leak: f64,
}

fn herald(
    config: &ScenarioConfig,
    state: &MultiModeState,
) -> Result<HeraldedOutcome> {
    let cut = &config.cutoffs;
    if config.scenario.is_subtraction() {
        photon_subtract(state, ModeLabel::B, config.kappa_ps, cut.get(ModeLabel::D))
    } else {
        quantum_scissors(
            state,
            ModeLabel::B,
            config.kappa_qs,
            (cut.get(ModeLabel::C), cut.get(ModeLabel::CPrime)),
        )
    }
}

/// TMSV preparation, optional transmitter-side operation, lossy channel on
/// `B`, optional receiver-side operation.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    let cut = &config.cutoffs;
    let mut state = tmsv_on(
        config.squeezing(),
        (ModeLabel::A, cut.get(ModeLabel::A)),
        (ModeLabel::B, cut.get(ModeLabel::B)),
    )?;
    let mut success = 1.0;
    let mut carried_leak = 0.0;

    let op_here = |transmitter: bool| config.kappa().is_some() && config.scenario.is_transmitter() == transmitter;

    if op_here(true) {
        let out = herald(config, &state)?;
        success = out.success_probability;
        carried_leak = out.truncation_leak;
        state = out.state;
    }

    let channel = match config.channel_model {
        ChannelModel::VacuumEnvironment => LossChannel::VacuumEnvironment {
            env_cutoff: cut.get(ModeLabel::EPrime),
        },
        ChannelModel::EvePurification => LossChannel::EvePurification {
            eve: Some(tmsv_on(
                eve_squeezing(config.eve_variance)?,
                (ModeLabel::E, cut.get(ModeLabel::E)),
                (ModeLabel::F, cut.get(ModeLabel::F)),
            )?),
        },
    };
    state = apply_loss(&state, ModeLabel::B, config.eta(), &channel)?;

    if op_here(false) {
        let out = herald(config, &state)?;
        success = out.success_probability;
        carried_leak = out.truncation_leak;
        state = out.state;
    }

    let norm_leak = carried_leak + state.norm_leak();
    Ok(ScenarioOutput {
        state,
        success_probability: success,
        norm_leak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::tmsv;
    use ModeLabel::*;

    fn small_cutoffs() -> Cutoffs {
        Cutoffs::default()
            .with(A, 10)
            .with(B, 10)
            .with(E, 10)
            .with(EPrime, 10)
            .with(F, 3)
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
        }
        assert!("receiver".parse::<Scenario>().is_err());
    }

    #[test]
    fn tmsv_only_without_loss_is_the_input() {
        let cfg = ScenarioConfig::new(Scenario::Tmsv, 3.0, 0.0)
            .with_channel(ChannelModel::VacuumEnvironment)
            .with_cutoffs(small_cutoffs());
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.success_probability, 1.0);
        let rho = out.state.partial_trace(&[A, B]).unwrap();
        let expect = tmsv(cfg.squeezing(), 10).unwrap().density().unwrap();
        assert!((rho.matrix() - expect.matrix()).camax() < 1e-14);
    }

    #[test]
    fn sides_agree_without_loss() {
        for (tx, rx) in [
            (Scenario::TransmitterPs, Scenario::ReceiverPs),
            (Scenario::TransmitterQs, Scenario::ReceiverQs),
        ] {
            let a = run_scenario(&ScenarioConfig::new(tx, 2.0, 0.0).with_cutoffs(small_cutoffs())).unwrap();
            let b = run_scenario(&ScenarioConfig::new(rx, 2.0, 0.0).with_cutoffs(small_cutoffs())).unwrap();
            let ra = a.state.partial_trace(&[A, B]).unwrap();
            let rb = b.state.partial_trace(&[A, B]).unwrap();
            assert!((ra.matrix() - rb.matrix()).camax() < 1e-10);
            assert!((a.success_probability - b.success_probability).abs() < 1e-12);
        }
    }

    #[test]
    fn eve_channel_modes() {
        let out = run_scenario(&ScenarioConfig::new(Scenario::ReceiverQs, 2.0, 3.0).with_cutoffs(small_cutoffs())).unwrap();
        assert_eq!(out.state.modes(), &[A, B, E, F]);
        assert!(out.success_probability > 0.0 && out.success_probability < 1.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = ScenarioConfig::new(Scenario::ReceiverPs, 2.0, 3.0);
        cfg.kappa_ps = 1.0;
        assert!(run_scenario(&cfg).is_err());
        let cfg = ScenarioConfig::new(Scenario::Tmsv, -1.0, 3.0);
        assert!(run_scenario(&cfg).is_err());
    }

    #[test]
    fn subtraction_on_zero_squeezing_fails_to_herald() {
        let cfg = ScenarioConfig::new(Scenario::ReceiverPs, 0.0, 3.0)
            .with_channel(ChannelModel::VacuumEnvironment)
            .with_cutoffs(small_cutoffs());
        assert!(matches!(run_scenario(&cfg), Err(Error::HeraldFailure { .. })));
        // Eve's thermal photons leak into B, so the Eve channel does herald
        let cfg = cfg.with_channel(ChannelModel::EvePurification);
        assert!(run_scenario(&cfg).unwrap().success_probability > 0.0);
    }
}
