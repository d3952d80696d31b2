use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::figures::FigureOptions;
use super::grid::{KappaChoice, Range, SweepGrid};
use super::optimize::Objective;
use crate::error::{Error, Result};
use crate::fock::ModeLabel;
use crate::optics::{ChannelModel, Scenario, ScenarioConfig};

/// Run settings gathered from a config file and command-line flags.
///
/// The file format is one `key = value` per line; `#` starts a comment.
/// Keys match the long flag names with `_` for `-`:
///
/// ```text
/// scenario = receiver-ps, tmsv      # or "all"
/// squeezing_db = 8                  # single value, or
/// squeezing_min = 0
/// squeezing_max = 8
/// squeezing_step = 0.25
/// loss_db / loss_min / loss_max / loss_step
/// kappa = 0.9                       # fixed for both operations
/// kappa_ps = 0.95
/// kappa_qs = 0.05
/// kappa_min / kappa_max / kappa_step   # fig4 kappa axis
/// losses = 0, 5, 10                 # fig3/fig4 panels
/// squeezings = 8, 1                 # fig5 panels
/// optimize = e-n | entanglement-rate | key-rate
/// eve_variance = 1.002
/// channel = eve-purification | vacuum-environment
/// reconciliation_efficiency = 1
/// cutoff = B=30                     # repeatable
/// out = results/sweep.csv
/// threads = 8
/// timing = false
/// ```
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub scenarios: Option<Vec<Scenario>>,
    pub squeezing_db: Option<f64>,
    pub squeezing_min: Option<f64>,
    pub squeezing_max: Option<f64>,
    pub squeezing_step: Option<f64>,
    pub loss_db: Option<f64>,
    pub loss_min: Option<f64>,
    pub loss_max: Option<f64>,
    pub loss_step: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa_ps: Option<f64>,
    pub kappa_qs: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_step: Option<f64>,
    pub losses: Option<Vec<f64>>,
    pub squeezings: Option<Vec<f64>>,
    pub optimize: Option<Objective>,
    pub eve_variance: Option<f64>,
    pub channel: Option<ChannelModel>,
    pub reconciliation_efficiency: Option<f64>,
    pub cutoffs: BTreeMap<ModeLabel, usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub timing: Option<bool>,
}

pub const DEFAULT_SQUEEZING: Range = Range {
    min: 0.0,
    max: 8.0,
    step: 0.25,
};
pub const DEFAULT_LOSS: Range = Range {
    min: 0.0,
    max: 16.0,
    step: 0.5,
};
pub const DEFAULT_KAPPA_AXIS: Range = Range {
    min: 0.01,
    max: 0.99,
    step: 0.01,
};

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a number")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| number(key, v.trim()))
        .collect()
}

/// Parses `MODE=N`.
pub fn parse_cutoff(value: &str) -> Result<(ModeLabel, usize)> {
    let (mode, n) = value
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("cutoff '{value}' is not of the form MODE=N")))?;
    let mode: ModeLabel = mode.trim().parse()?;
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("cutoff '{value}': '{n}' is not a count")))?;
    Ok((mode, n))
}

/// Parses a comma-separated scenario list; `all` selects every scenario.
pub fn parse_scenarios(value: &str) -> Result<Vec<Scenario>> {
    if value.trim() == "all" {
        return Ok(Scenario::ALL.to_vec());
    }
    value.split(',').map(|s| s.trim().parse()).collect()
}

fn pick_range(
    single: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
    step: Option<f64>,
    default: Range,
) -> Result<Option<Range>> {
    if let Some(v) = single {
        if min.is_some() || max.is_some() {
            return Err(Error::Config(
                "give either a single value or a min/max range, not both".into(),
            ));
        }
        return Ok(Some(Range::single(v)));
    }
    if min.is_none() && max.is_none() && step.is_none() {
        return Ok(None);
    }
    Range::new(
        min.unwrap_or(default.min),
        max.unwrap_or(default.max),
        step.unwrap_or(default.step),
    )
    .map(Some)
}

impl Settings {
    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "scenario" | "scenarios" => self.scenarios = Some(parse_scenarios(v)?),
            "squeezing_db" => self.squeezing_db = Some(number(key, v)?),
            "squeezing_min" => self.squeezing_min = Some(number(key, v)?),
            "squeezing_max" => self.squeezing_max = Some(number(key, v)?),
            "squeezing_step" => self.squeezing_step = Some(number(key, v)?),
            "loss_db" => self.loss_db = Some(number(key, v)?),
            "loss_min" => self.loss_min = Some(number(key, v)?),
            "loss_max" => self.loss_max = Some(number(key, v)?),
            "loss_step" => self.loss_step = Some(number(key, v)?),
            "kappa" => self.kappa = Some(number(key, v)?),
            "kappa_ps" => self.kappa_ps = Some(number(key, v)?),
            "kappa_qs" => self.kappa_qs = Some(number(key, v)?),
            "kappa_min" => self.kappa_min = Some(number(key, v)?),
            "kappa_max" => self.kappa_max = Some(number(key, v)?),
            "kappa_step" => self.kappa_step = Some(number(key, v)?),
            "losses" => self.losses = Some(list(key, v)?),
            "squeezings" => self.squeezings = Some(list(key, v)?),
            "optimize" => self.optimize = Some(v.parse()?),
            "eve_variance" => self.eve_variance = Some(number(key, v)?),
            "channel" => self.channel = Some(v.parse()?),
            "reconciliation_efficiency" | "beta" => {
                self.reconciliation_efficiency = Some(number(key, v)?)
            }
            "cutoff" => {
                let (m, n) = parse_cutoff(v)?;
                self.cutoffs.insert(m, n);
            }
            k if k.starts_with("cutoff.") => {
                let (m, n) = parse_cutoff(&format!("{}={v}", &k["cutoff.".len()..]))?;
                self.cutoffs.insert(m, n);
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "threads" => {
                self.threads = Some(
                    v.parse()
                        .map_err(|_| Error::Config(format!("threads: '{v}' is not a count")))?,
                )
            }
            "timing" => {
                self.timing = Some(
                    v.parse()
                        .map_err(|_| Error::Config(format!("timing: '{v}' is not true/false")))?,
                )
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            s.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    /// `other` wins wherever it has a value; cutoffs are merged.
    pub fn overlay(mut self, other: Settings) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            scenarios, squeezing_db, squeezing_min, squeezing_max, squeezing_step, loss_db,
            loss_min, loss_max, loss_step, kappa, kappa_ps, kappa_qs, kappa_min, kappa_max,
            kappa_step, losses, squeezings, optimize, eve_variance, channel,
            reconciliation_efficiency, out, threads, timing
        );
        self.cutoffs.extend(other.cutoffs);
        self
    }

    /// Scenario template with every non-swept field applied.
    pub fn base_config(&self) -> ScenarioConfig {
        let mut c = ScenarioConfig::default();
        if let Some(k) = self.kappa_ps {
            c.kappa_ps = k;
        }
        if let Some(k) = self.kappa_qs {
            c.kappa_qs = k;
        }
        if let Some(v) = self.eve_variance {
            c.eve_variance = v;
        }
        if let Some(ch) = self.channel {
            c.channel_model = ch;
        }
        if let Some(b) = self.reconciliation_efficiency {
            c.reconciliation_efficiency = b;
        }
        for (&m, &n) in &self.cutoffs {
            c.cutoffs.set(m, n);
        }
        c
    }

    fn kappa_choice(&self) -> Result<KappaChoice> {
        match (self.kappa, self.optimize) {
            (Some(_), Some(_)) => Err(Error::Config("kappa and optimize are mutually exclusive".into())),
            (Some(k), None) => Ok(KappaChoice::Fixed(k)),
            (None, Some(o)) => Ok(KappaChoice::Optimize(o)),
            (None, None) => Ok(KappaChoice::Base),
        }
    }

    pub fn squeezing_range(&self) -> Result<Option<Range>> {
        pick_range(self.squeezing_db, self.squeezing_min, self.squeezing_max, self.squeezing_step, DEFAULT_SQUEEZING)
    }

    pub fn loss_range(&self) -> Result<Option<Range>> {
        pick_range(self.loss_db, self.loss_min, self.loss_max, self.loss_step, DEFAULT_LOSS)
    }

    pub fn grid(&self) -> Result<SweepGrid> {
        let grid = SweepGrid {
            scenarios: self.scenarios.clone().unwrap_or(Scenario::ALL.to_vec()),
            squeezing_db: self.squeezing_range()?.unwrap_or(DEFAULT_SQUEEZING),
            loss_db: self.loss_range()?.unwrap_or(DEFAULT_LOSS),
            kappa: self.kappa_choice()?,
            base: self.base_config(),
        };
        grid.validate()?;
        Ok(grid)
    }

    /// A single point: exactly one scenario and single squeezing and loss values.
    pub fn single_point(&self) -> Result<ScenarioConfig> {
        let scenario = match self.scenarios.as_deref() {
            Some([s]) => *s,
            _ => return Err(Error::Config("exactly one scenario is required".into())),
        };
        let (Some(sq), Some(loss)) = (self.squeezing_db, self.loss_db) else {
            return Err(Error::Config("squeezing_db and loss_db are required".into()));
        };
        let mut c = self.base_config();
        c.scenario = scenario;
        c.squeezing_db = sq;
        c.loss_db = loss;
        if let Some(k) = self.kappa {
            c.kappa_ps = k;
            c.kappa_qs = k;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn figure_options(&self) -> Result<FigureOptions> {
        let kappa_qs = pick_range(None, self.kappa_min, self.kappa_max, self.kappa_step, DEFAULT_KAPPA_AXIS)?;
        Ok(FigureOptions {
            base: self.base_config(),
            channel: self.channel,
            scenarios: self.scenarios.clone(),
            squeezing_db: self.squeezing_range()?,
            loss_db: self.loss_range()?,
            kappa_qs,
            losses: self.losses.clone(),
            squeezings: self.squeezings.clone(),
            timing: self.timing.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind_of_line() {
        let text = "\
# a comment
scenario = receiver-ps, tmsv
squeezing_min = 1
squeezing_max = 2
loss_db = 3   # trailing comment
cutoff = B=30
cutoff.E = 25
optimize = key-rate
losses = 0, 5
channel = vacuum-environment
timing = true
";
        let s = Settings::parse(text).unwrap();
        assert_eq!(s.scenarios, Some(vec![Scenario::ReceiverPs, Scenario::Tmsv]));
        assert_eq!(s.squeezing_range().unwrap(), Some(Range { min: 1.0, max: 2.0, step: 0.25 }));
        assert_eq!(s.loss_range().unwrap(), Some(Range::single(3.0)));
        assert_eq!(s.cutoffs[&ModeLabel::B], 30);
        assert_eq!(s.cutoffs[&ModeLabel::E], 25);
        assert_eq!(s.optimize, Some(Objective::KeyRate));
        assert_eq!(s.losses, Some(vec![0.0, 5.0]));
        assert_eq!(s.timing, Some(true));
        let base = s.base_config();
        assert_eq!(base.cutoffs.get(ModeLabel::B), 30);
        assert_eq!(base.channel_model, ChannelModel::VacuumEnvironment);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Settings::parse("loss_db = 1\nbogus = 2\n").unwrap_err();
        assert_eq!(err, Error::Config("line 2: invalid configuration: unknown key 'bogus'".into()));
        assert!(Settings::parse("loss_db 1").is_err());
        assert!(Settings::parse("loss_db = x").is_err());
        assert!(Settings::parse("cutoff = Q=3").is_err());
    }

    #[test]
    fn overlay_prefers_later_values() {
        let file = Settings::parse("loss_db = 1\nkappa_ps = 0.9\ncutoff = A=10").unwrap();
        let flags = Settings::parse("loss_db = 2\ncutoff = B=12").unwrap();
        let s = file.overlay(flags);
        assert_eq!(s.loss_db, Some(2.0));
        assert_eq!(s.kappa_ps, Some(0.9));
        assert_eq!(s.cutoffs.len(), 2);
    }

    #[test]
    fn kappa_and_optimize_conflict() {
        let s = Settings::parse("kappa = 0.5\noptimize = e-n").unwrap();
        assert!(s.grid().is_err());
    }

    #[test]
    fn single_point_needs_every_value() {
        assert!(Settings::parse("scenario = tmsv\nsqueezing_db = 1").unwrap().single_point().is_err());
        assert!(Settings::parse("scenario = all\nsqueezing_db = 1\nloss_db = 1").unwrap().single_point().is_err());
        let c = Settings::parse("scenario = receiver-qs\nsqueezing_db = 1\nloss_db = 2\nkappa = 0.2")
            .unwrap()
            .single_point()
            .unwrap();
        assert_eq!((c.scenario, c.kappa_qs), (Scenario::ReceiverQs, 0.2));
    }

    #[test]
    fn default_grid_matches_documented_steps() {
        let g = Settings::default().grid().unwrap();
        assert_eq!(g.squeezing_db.values().len(), 33);
        assert_eq!(g.loss_db.values().len(), 33);
        assert_eq!(g.scenarios.len(), 5);
    }
}
