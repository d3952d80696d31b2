use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::entanglement::{entanglement_rate, log_negativity};
use crate::error::{Error, Result};
use crate::fock::ModeLabel;
use crate::keyrate::key_rate_from_output;
use crate::optics::{gain_from_kappa, run_scenario, ChannelModel, Scenario, ScenarioConfig};

/// Outcome of one grid point. Anything but `Ok` leaves the later columns empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    HeraldFailure,
    NoFeasibleKappa,
    Unphysical,
    Failed,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::HeraldFailure => "herald-failure",
            PointStatus::NoFeasibleKappa => "no-feasible-kappa",
            PointStatus::Unphysical => "unphysical",
            PointStatus::Failed => "failed",
        }
    }

    pub fn from_error(err: &Error) -> Self {
        match err {
            Error::HeraldFailure { .. } => PointStatus::HeraldFailure,
            Error::NoFeasibleKappa => PointStatus::NoFeasibleKappa,
            Error::Unphysical(_) | Error::NonPositiveVariance(_) | Error::NotStandardForm(_) => {
                PointStatus::Unphysical
            }
            _ => PointStatus::Failed,
        }
    }
}

/// One CSV row. Key-rate columns stay empty for the vacuum-environment
/// channel, which has no Eve modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub squeezing_db: f64,
    pub loss_db: f64,
    pub kappa: Option<f64>,
    pub g: Option<f64>,
    pub p_s: Option<f64>,
    pub e_n: Option<f64>,
    pub entanglement_rate: Option<f64>,
    pub i_ab: Option<f64>,
    pub chi_be: Option<f64>,
    pub k_raw: Option<f64>,
    pub k_effective: Option<f64>,
    pub norm_leak: Option<f64>,
    pub status: PointStatus,
    pub wall_time_s: f64,
}

pub const COLUMNS: [&str; 14] = [
    "scenario",
    "squeezing_db",
    "loss_db",
    "kappa",
    "g",
    "p_s",
    "e_n",
    "entanglement_rate",
    "i_ab",
    "chi_be",
    "k_raw",
    "k_effective",
    "norm_leak",
    "status",
];

impl SweepRecord {
    pub fn empty(config: &ScenarioConfig) -> Self {
        let kappa = config.kappa();
        SweepRecord {
            scenario: config.scenario,
            squeezing_db: config.squeezing_db,
            loss_db: config.loss_db,
            kappa,
            g: kappa.map(gain_from_kappa),
            p_s: None,
            e_n: None,
            entanglement_rate: None,
            i_ab: None,
            chi_be: None,
            k_raw: None,
            k_effective: None,
            norm_leak: None,
            status: PointStatus::Ok,
            wall_time_s: 0.0,
        }
    }

    /// Values in [`COLUMNS`] order; `None` becomes an empty field.
    pub fn fields(&self) -> Vec<String> {
        let num = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
        vec![
            self.scenario.name().to_string(),
            format!("{:?}", self.squeezing_db),
            format!("{:?}", self.loss_db),
            num(self.kappa),
            num(self.g),
            num(self.p_s),
            num(self.e_n),
            num(self.entanglement_rate),
            num(self.i_ab),
            num(self.chi_be),
            num(self.k_raw),
            num(self.k_effective),
            num(self.norm_leak),
            self.status.as_str().to_string(),
        ]
    }
}

fn fill(config: &ScenarioConfig, rec: &mut SweepRecord) -> Result<()> {
    let out = run_scenario(config)?;
    rec.p_s = Some(out.success_probability);
    rec.norm_leak = Some(out.norm_leak);
    let rho = out.state.partial_trace(&[ModeLabel::A, ModeLabel::B])?;
    let e_n = log_negativity(&rho)?.e_n;
    rec.e_n = Some(e_n);
    rec.entanglement_rate = Some(entanglement_rate(e_n, out.success_probability)?);
    if config.channel_model == ChannelModel::EvePurification {
        let k = key_rate_from_output(config, &out)?;
        rec.i_ab = Some(k.i_ab);
        rec.chi_be = Some(k.chi_be);
        rec.k_raw = Some(k.k_raw);
        rec.k_effective = Some(k.k_effective);
    }
    Ok(())
}

/// Runs one scenario and derives every column from the same output state.
/// Failures are recorded in `status`; columns computed before the failure are kept.
pub fn evaluate(config: &ScenarioConfig) -> SweepRecord {
    let start = Instant::now();
    let mut rec = SweepRecord::empty(config);
    if let Err(e) = fill(config, &mut rec) {
        rec.status = PointStatus::from_error(&e);
    }
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec
}
