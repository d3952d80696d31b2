use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::log_negativity;
use crate::error::{Error, Result};
use crate::fock::ModeLabel;
use crate::keyrate::key_rate_from_output;
use crate::optics::{run_scenario, ChannelModel, ScenarioConfig};

pub const KAPPA_MIN: f64 = 0.01;
pub const KAPPA_MAX: f64 = 0.99;
pub const COARSE_STEP: f64 = 0.01;
pub const REFINE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Log-negativity of the heralded state.
    EN,
    /// `P_s E_N`.
    EntanglementRate,
    /// Raw key rate `P_s (beta I_AB - chi_BE)`, which keeps a slope where the
    /// clipped rate is flat at zero.
    KeyRate,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::EN => "e-n",
            Objective::EntanglementRate => "entanglement-rate",
            Objective::KeyRate => "key-rate",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e-n" | "en" | "e_n" => Ok(Objective::EN),
            "entanglement-rate" => Ok(Objective::EntanglementRate),
            "key-rate" => Ok(Objective::KeyRate),
            other => Err(Error::Config(format!("unknown objective '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaOptimum {
    pub kappa: f64,
    pub value: f64,
}

/// Objective at the configuration as given.
pub fn objective_value(config: &ScenarioConfig, objective: Objective) -> Result<f64> {
    if objective == Objective::KeyRate && config.channel_model != ChannelModel::EvePurification {
        return Err(Error::Config(
            "key-rate objective requires the eve-purification channel model".into(),
        ));
    }
    let out = run_scenario(config)?;
    match objective {
        Objective::KeyRate => Ok(key_rate_from_output(config, &out)?.k_raw),
        Objective::EN | Objective::EntanglementRate => {
            let rho = out.state.partial_trace(&[ModeLabel::A, ModeLabel::B])?;
            let e_n = log_negativity(&rho)?.e_n;
            Ok(if objective == Objective::EN {
                e_n
            } else {
                e_n * out.success_probability
            })
        }
    }
}

fn with_kappa(config: &ScenarioConfig, kappa: f64) -> ScenarioConfig {
    let mut c = config.clone();
    c.kappa_ps = kappa;
    c.kappa_qs = kappa;
    c
}

/// Objective at `kappa`, or `None` where the point is infeasible.
fn probe(config: &ScenarioConfig, objective: Objective, kappa: f64) -> Option<f64> {
    objective_value(&with_kappa(config, kappa), objective)
        .ok()
        .filter(|v| v.is_finite())
}

/// Maximizes the objective over the scenario's splitter transmissivity.
///
/// A scan over `0.01, 0.02, ..., 0.99` picks the best grid value (the smaller
/// kappa on ties), then golden-section search on the neighbouring interval
/// refines it until the bracket is narrower than `1e-3`. The refined point is
/// kept only if it beats the grid value.
pub fn optimize_kappa(config: &ScenarioConfig, objective: Objective) -> Result<KappaOptimum> {
    if config.kappa().is_none() {
        return Err(Error::Config(format!(
            "scenario {} has no splitter transmissivity to optimize",
            config.scenario
        )));
    }
    with_kappa(config, 0.5).validate()?;
    if objective == Objective::KeyRate && config.channel_model != ChannelModel::EvePurification {
        return Err(Error::Config(
            "key-rate objective requires the eve-purification channel model".into(),
        ));
    }

    let n = ((KAPPA_MAX - KAPPA_MIN) / COARSE_STEP).round() as usize + 1;
    let grid: Vec<f64> = (0..n)
        .map(|i| ((KAPPA_MIN + i as f64 * COARSE_STEP) * 1e9).round() / 1e9)
        .collect();
    let values: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&k| probe(config, objective, k))
        .collect();

    let mut best: Option<(f64, f64)> = None;
    for (&k, v) in grid.iter().zip(&values) {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (k0, v0) = best.ok_or(Error::NoFeasibleKappa)?;

    let f = |k: f64| probe(config, objective, k).unwrap_or(f64::NEG_INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((k0 - COARSE_STEP).max(KAPPA_MIN), (k0 + COARSE_STEP).min(KAPPA_MAX));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a >= REFINE_TOLERANCE {
        // ties move the bracket toward smaller kappa
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let k1 = 0.5 * (a + b);
    let v1 = f(k1);
    Ok(if v1 > v0 {
        KappaOptimum { kappa: k1, value: v1 }
    } else {
        KappaOptimum { kappa: k0, value: v0 }
    })
}
