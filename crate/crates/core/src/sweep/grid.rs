use serde::{Deserialize, Serialize};

use super::Objective;
use crate::error::{Error, Result};
use crate::optics::{Scenario, ScenarioConfig};

/// Inclusive arithmetic range `min, min + step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let r = Range { min, max, step };
        r.validate()?;
        Ok(r)
    }

    pub fn single(value: f64) -> Self {
        Range {
            min: value,
            max: value,
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("range bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!("range step must be positive, got {}", self.step)));
        }
        if self.max < self.min {
            return Err(Error::Config(format!(
                "empty range: max {} below min {}",
                self.max, self.min
            )));
        }
        Ok(())
    }

    /// Grid values, computed as `min + i step` and rounded to 1e-9 so that
    /// decimal steps print cleanly.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((self.min + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

/// How the operation splitter transmissivity is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaChoice {
    /// `kappa_ps` / `kappa_qs` from the base configuration.
    Base,
    /// One value for whichever operation the scenario uses.
    Fixed(f64),
    /// Per-point optimization of the given objective.
    Optimize(Objective),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub scenarios: Vec<Scenario>,
    pub squeezing_db: Range,
    pub loss_db: Range,
    pub kappa: KappaChoice,
    /// Template for everything that is not swept (Eve, channel, cutoffs, ...).
    pub base: ScenarioConfig,
}

impl SweepGrid {
    pub fn new(scenarios: Vec<Scenario>, squeezing_db: Range, loss_db: Range) -> Self {
        SweepGrid {
            scenarios,
            squeezing_db,
            loss_db,
            kappa: KappaChoice::Base,
            base: ScenarioConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("sweep needs at least one scenario".into()));
        }
        self.squeezing_db.validate()?;
        self.loss_db.validate()?;
        if let KappaChoice::Fixed(k) = self.kappa {
            if !(k > 0.0 && k < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "kappa",
                    value: k,
                    domain: "(0, 1)",
                });
            }
        }
        for p in self.points() {
            p.validate()?;
        }
        Ok(())
    }

    /// Grid points in emission order: scenario name, then squeezing, then loss.
    pub fn points(&self) -> Vec<ScenarioConfig> {
        let mut scenarios = self.scenarios.clone();
        scenarios.sort_by_key(|s| s.name());
        scenarios.dedup();
        let sq = self.squeezing_db.values();
        let loss = self.loss_db.values();
        let mut out = Vec::with_capacity(scenarios.len() * sq.len() * loss.len());
        for &scenario in &scenarios {
            for &s in &sq {
                for &l in &loss {
                    let mut cfg = self.base.clone();
                    cfg.scenario = scenario;
                    cfg.squeezing_db = s;
                    cfg.loss_db = l;
                    if let KappaChoice::Fixed(k) = self.kappa {
                        cfg.kappa_ps = k;
                        cfg.kappa_qs = k;
                    }
                    out.push(cfg);
                }
            }
        }
        out
    }
}
