use super::bs_kernel;
use crate::error::{Error, Result};
use crate::fock::{ModeLabel, MultiModeState};

/// How the environment of a pure-loss channel is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum LossChannel {
    /// Fresh vacuum ancilla `E'` with the given cutoff, kept in the purification.
    VacuumEnvironment { env_cutoff: usize },
    /// Eve's pair `(E, F)` mixes with the signal on `E`. When `eve` is given
    /// it is attached first; otherwise the state must already contain `E` and `F`.
    EvePurification { eve: Option<MultiModeState> },
}

/// Sends `mode` through a beam splitter of transmissivity `eta` against the
/// channel's environment mode. Nothing is traced out.
pub fn apply_loss(
    state: &MultiModeState,
    mode: ModeLabel,
    eta: f64,
    channel: &LossChannel,
) -> Result<MultiModeState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            domain: "[0, 1]",
        });
    }
    let cutoff = state.cutoff_of(mode)?;
    let (joint, env) = match channel {
        LossChannel::VacuumEnvironment { env_cutoff } => {
            let vac = MultiModeState::vacuum(&[ModeLabel::EPrime], &[*env_cutoff])?;
            (state.tensor(&vac)?, ModeLabel::EPrime)
        }
        LossChannel::EvePurification { eve: Some(eve) } => {
            if !eve.contains(ModeLabel::E) || !eve.contains(ModeLabel::F) {
                return Err(Error::MissingEveState);
            }
            (state.tensor(eve)?, ModeLabel::E)
        }
        LossChannel::EvePurification { eve: None } => {
            if !state.contains(ModeLabel::E) || !state.contains(ModeLabel::F) {
                return Err(Error::MissingEveState);
            }
            (state.clone(), ModeLabel::E)
        }
    };
    let kernel = bs_kernel(eta, cutoff, joint.cutoff_of(env)?)?;
    joint.apply_two_mode_kernel(&kernel, mode, env)
}
