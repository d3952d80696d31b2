//! Parameter sweeps, kappa optimization, figure data and their CSV/JSON output.

mod config;
mod figures;
mod grid;
mod optimize;
mod output;
mod record;

use std::cmp::Ordering;

use rayon::prelude::*;

pub use config::{parse_cutoff, parse_scenarios, Settings, DEFAULT_KAPPA_AXIS, DEFAULT_LOSS, DEFAULT_SQUEEZING};
pub use figures::{figure_data, figure_command, Figure, FigureOptions, FigureTable};
pub use grid::{KappaChoice, Range, SweepGrid};
pub use optimize::{
    objective_value, optimize_kappa, KappaOptimum, Objective, COARSE_STEP, KAPPA_MAX, KAPPA_MIN,
    REFINE_TOLERANCE,
};
pub use output::{truncation_summary, write_csv, write_metadata, TruncationSummary};
pub use record::{evaluate, PointStatus, SweepRecord, COLUMNS};

use crate::error::{Error, Result};
use crate::optics::ScenarioConfig;

/// Label used where no scenario has a positive raw key rate.
pub const NO_KEY_LABEL: &str = "none";

fn evaluate_point(config: &ScenarioConfig, kappa: KappaChoice) -> SweepRecord {
    match kappa {
        KappaChoice::Optimize(objective) if config.kappa().is_some() => {
            match optimize_kappa(config, objective) {
                Ok(opt) => {
                    let mut c = config.clone();
                    c.kappa_ps = opt.kappa;
                    c.kappa_qs = opt.kappa;
                    evaluate(&c)
                }
                Err(e) => SweepRecord {
                    status: PointStatus::from_error(&e),
                    kappa: None,
                    g: None,
                    ..SweepRecord::empty(config)
                },
            }
        }
        _ => evaluate(config),
    }
}

fn order(a: &SweepRecord, b: &SweepRecord) -> Ordering {
    a.scenario
        .name()
        .cmp(b.scenario.name())
        .then(a.squeezing_db.total_cmp(&b.squeezing_db))
        .then(a.loss_db.total_cmp(&b.loss_db))
        .then(a.kappa.unwrap_or(0.0).total_cmp(&b.kappa.unwrap_or(0.0)))
}

/// Evaluates a list of configurations in parallel and returns records sorted by
/// scenario name, squeezing, loss and kappa.
pub fn evaluate_all(points: &[ScenarioConfig], kappa: KappaChoice) -> Vec<SweepRecord> {
    let mut records: Vec<SweepRecord> = points
        .par_iter()
        .map(|p| evaluate_point(p, kappa))
        .collect();
    records.sort_by(order);
    records
}

/// Every grid point of every scenario, one record each. Per-point failures
/// show up in the status column.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    Ok(evaluate_all(&grid.points(), grid.kappa))
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("thread count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}"))),
    }
}

/// Dominant scenario per record's grid point: the largest effective key rate,
/// ties to the lexicographically first name, and [`NO_KEY_LABEL`] where every
/// raw key rate is at most zero. Returned in record order.
pub fn dominance_labels(records: &[SweepRecord]) -> Vec<String> {
    use std::collections::BTreeMap;
    let key = |r: &SweepRecord| (r.squeezing_db.to_bits(), r.loss_db.to_bits());
    let mut best: BTreeMap<(u64, u64), (&str, f64)> = BTreeMap::new();
    for r in records {
        let (Some(k_raw), Some(k_eff)) = (r.k_raw, r.k_effective) else {
            continue;
        };
        if k_raw <= 0.0 {
            continue;
        }
        let name = r.scenario.name();
        best.entry(key(r))
            .and_modify(|cur| {
                if k_eff > cur.1 || (k_eff == cur.1 && name < cur.0) {
                    *cur = (name, k_eff);
                }
            })
            .or_insert((name, k_eff));
    }
    records
        .iter()
        .map(|r| {
            best.get(&key(r))
                .map(|(n, _)| n.to_string())
                .unwrap_or_else(|| NO_KEY_LABEL.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::Scenario;

    fn rec(s: Scenario, sq: f64, k: Option<f64>) -> SweepRecord {
        let mut r = SweepRecord::empty(&ScenarioConfig::new(s, sq, 1.0));
        r.k_raw = k;
        r.k_effective = k.map(|x| x.max(0.0));
        r
    }

    #[test]
    fn dominance_picks_max_and_breaks_ties_by_name() {
        let records = vec![
            rec(Scenario::Tmsv, 1.0, Some(0.2)),
            rec(Scenario::ReceiverPs, 1.0, Some(0.2)),
            rec(Scenario::TransmitterQs, 1.0, Some(0.1)),
            rec(Scenario::Tmsv, 2.0, Some(-0.1)),
            rec(Scenario::ReceiverQs, 2.0, None),
            rec(Scenario::Tmsv, 3.0, Some(0.01)),
            rec(Scenario::TransmitterQs, 3.0, Some(0.3)),
        ];
        let labels = dominance_labels(&records);
        assert_eq!(labels[0], "receiver-ps");
        assert_eq!(labels[2], "receiver-ps");
        assert_eq!(labels[3], NO_KEY_LABEL);
        assert_eq!(labels[4], NO_KEY_LABEL);
        assert_eq!(labels[5], "transmitter-qs");
    }

    #[test]
    fn degenerate_grid() {
        let grid = SweepGrid::new(vec![Scenario::Tmsv], Range::single(0.0), Range::single(0.0));
        let rows = sweep(&grid).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].p_s, Some(1.0));
        // with zero squeezing nothing is shared
        assert!(rows[0].k_raw.unwrap().abs() < 1e-12);
        let grid = SweepGrid::new(vec![Scenario::Tmsv], Range::single(1.0), Range::single(0.0));
        assert!(sweep(&grid).unwrap()[0].k_raw.unwrap() > 0.0);
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(with_threads(Some(0), || ()).is_err());
        assert_eq!(with_threads(Some(2), || 5).unwrap(), 5);
    }
}
