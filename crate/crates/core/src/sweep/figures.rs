use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use super::config::{DEFAULT_KAPPA_AXIS, DEFAULT_LOSS, DEFAULT_SQUEEZING};
use super::grid::{KappaChoice, Range};
use super::output::{truncation_summary, write_csv_file, write_metadata};
use super::record::{SweepRecord, COLUMNS};
use super::{dominance_labels, evaluate_all};
use crate::error::{Error, Result};
use crate::optics::{ChannelModel, Scenario, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Log-negativity against squeezing at fixed losses.
    Fig3,
    /// Receiver-scissors entanglement rate over squeezing and `kappa_QS`.
    Fig4,
    /// Key rate against loss at fixed squeezing.
    Fig5,
    /// Key rate over squeezing and loss, with the dominant scenario.
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }

    fn default_channel(self) -> ChannelModel {
        match self {
            Figure::Fig3 | Figure::Fig4 => ChannelModel::VacuumEnvironment,
            Figure::Fig5 | Figure::Fig6 => ChannelModel::EvePurification,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}' (expected fig3, fig4, fig5 or fig6)")))
    }
}

/// Overrides for the built-in figure grids. `None` keeps the figure default.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureOptions {
    pub base: ScenarioConfig,
    pub channel: Option<ChannelModel>,
    pub scenarios: Option<Vec<Scenario>>,
    pub squeezing_db: Option<Range>,
    pub loss_db: Option<Range>,
    /// fig4 kappa axis.
    pub kappa_qs: Option<Range>,
    /// fig3 and fig4 panels.
    pub losses: Option<Vec<f64>>,
    /// fig5 panels.
    pub squeezings: Option<Vec<f64>>,
    pub timing: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            base: ScenarioConfig::default(),
            channel: None,
            scenarios: None,
            squeezing_db: None,
            loss_db: None,
            kappa_qs: None,
            losses: None,
            squeezings: None,
            timing: false,
        }
    }
}

/// One output file worth of records.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub stem: String,
    pub records: Vec<SweepRecord>,
    /// fig6 only: dominant scenario per row.
    pub dominance: Option<Vec<String>>,
}

fn points(
    base: &ScenarioConfig,
    scenarios: &[Scenario],
    squeezing: &[f64],
    loss: &[f64],
    kappa_qs: Option<&[f64]>,
) -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for &scenario in scenarios {
        for &s in squeezing {
            for &l in loss {
                let mut cfg = base.clone();
                cfg.scenario = scenario;
                cfg.squeezing_db = s;
                cfg.loss_db = l;
                match kappa_qs {
                    Some(ks) => out.extend(ks.iter().map(|&k| {
                        let mut c = cfg.clone();
                        c.kappa_qs = k;
                        c
                    })),
                    None => out.push(cfg),
                }
            }
        }
    }
    out
}

fn validate_all(points: &[ScenarioConfig]) -> Result<()> {
    points.iter().try_for_each(|p| p.validate())
}

/// Computes the tables of a figure without touching the filesystem.
pub fn figure_data(figure: Figure, opts: &FigureOptions) -> Result<Vec<FigureTable>> {
    let mut base = opts.base.clone();
    base.channel_model = opts.channel.unwrap_or(figure.default_channel());
    let all = Scenario::ALL.to_vec();
    let scenarios = opts.scenarios.clone().unwrap_or(match figure {
        Figure::Fig4 => vec![Scenario::ReceiverQs],
        _ => all,
    });
    if scenarios.is_empty() {
        return Err(Error::Config("figure needs at least one scenario".into()));
    }
    let squeezing = opts.squeezing_db.unwrap_or(DEFAULT_SQUEEZING);
    let loss = opts.loss_db.unwrap_or(DEFAULT_LOSS);
    squeezing.validate()?;
    loss.validate()?;

    let mut tables = Vec::new();
    match figure {
        Figure::Fig3 | Figure::Fig4 => {
            let default_losses = if figure == Figure::Fig3 { vec![0.0, 5.0, 10.0] } else { vec![10.0] };
            let losses = opts.losses.clone().unwrap_or(default_losses);
            let kappa_axis = if figure == Figure::Fig4 {
                let k = opts.kappa_qs.unwrap_or(DEFAULT_KAPPA_AXIS);
                k.validate()?;
                Some(k.values())
            } else {
                None
            };
            for l in losses {
                let p = points(&base, &scenarios, &squeezing.values(), &[l], kappa_axis.as_deref());
                validate_all(&p)?;
                tables.push(FigureTable {
                    stem: format!("{}_loss{}", figure.name(), l),
                    records: evaluate_all(&p, KappaChoice::Base),
                    dominance: None,
                });
            }
        }
        Figure::Fig5 => {
            let squeezings = opts.squeezings.clone().unwrap_or(vec![8.0, 1.0]);
            for s in squeezings {
                let p = points(&base, &scenarios, &[s], &loss.values(), None);
                validate_all(&p)?;
                tables.push(FigureTable {
                    stem: format!("fig5_sq{s}"),
                    records: evaluate_all(&p, KappaChoice::Base),
                    dominance: None,
                });
            }
        }
        Figure::Fig6 => {
            let p = points(&base, &scenarios, &squeezing.values(), &loss.values(), None);
            validate_all(&p)?;
            let records = evaluate_all(&p, KappaChoice::Base);
            let dominance = dominance_labels(&records);
            tables.push(FigureTable {
                stem: "fig6".into(),
                records,
                dominance: Some(dominance),
            });
        }
    }
    Ok(tables)
}

/// Computes a figure and writes `<stem>.csv` per table plus `<figure>.json`
/// metadata into `out_dir`. Returns the written paths.
pub fn figure_command(figure: Figure, opts: &FigureOptions, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let tables = figure_data(figure, opts)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for t in &tables {
        let path = out_dir.join(format!("{}.csv", t.stem));
        let extra = t.dominance.as_deref().map(|d| ("dominant", d));
        write_csv_file(&path, &t.records, extra, opts.timing)?;
        files.push(json!({
            "file": format!("{}.csv", t.stem),
            "rows": t.records.len(),
            "truncation": truncation_summary(&t.records),
        }));
        written.push(path);
    }
    let mut columns: Vec<&str> = COLUMNS.to_vec();
    if figure == Figure::Fig6 {
        columns.push("dominant");
    }
    if opts.timing {
        columns.push("wall_time_s");
    }
    let meta = json!({
        "tool": "heraldkey",
        "version": env!("CARGO_PKG_VERSION"),
        "figure": figure.name(),
        "options": opts,
        "channel_model": opts.channel.unwrap_or(figure.default_channel()),
        "columns": columns,
        "files": files,
    });
    let meta_path = out_dir.join(format!("{}.json", figure.name()));
    write_metadata(&meta_path, &meta)?;
    written.push(meta_path);
    Ok(written)
}
