use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use heraldkey::keyrate::key_rate;
use heraldkey::optics::{gain_from_kappa, ChannelModel};
use heraldkey::sweep::{
    figure_command, optimize_kappa, sweep, truncation_summary, with_threads, write_csv,
    write_metadata, Figure, Objective, PointStatus, Settings,
};
use heraldkey::Error;

const OUT_DIR_ENV: &str = "HERALDKEY_OUT_DIR";

#[derive(Parser)]
#[command(name = "heraldkey", version, about = "Heralded photon subtraction and quantum scissors on lossy TMSV links: entanglement and CV-QKD key rates")]
struct Cli {
    /// Flat `key = value` configuration file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for grid evaluation.
    #[arg(long, global = true, env = "HERALDKEY_THREADS", value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every (scenario, squeezing, loss) grid point and emit CSV.
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Optimize kappa per point for this objective.
        #[arg(long, value_name = "OBJECTIVE")]
        optimize: Option<Objective>,
        /// CSV path; a JSON sidecar is written next to it. Defaults to stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Append a wall_time_s column (breaks bit-identical output).
        #[arg(long)]
        timing: bool,
    },
    /// Best splitter transmissivity for one scenario point.
    OptimizeKappa {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "e-n", value_name = "OBJECTIVE")]
        objective: Objective,
    },
    /// Regenerate the data behind one of the figures (fig3, fig4, fig5, fig6).
    Figure {
        name: Figure,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// fig4 kappa axis.
        #[arg(long)]
        kappa_min: Option<f64>,
        #[arg(long)]
        kappa_max: Option<f64>,
        #[arg(long)]
        kappa_step: Option<f64>,
        /// fig3/fig4 loss panels in dB.
        #[arg(long, value_delimiter = ',')]
        losses: Option<Vec<f64>>,
        /// fig5 squeezing panels in dB.
        #[arg(long, value_delimiter = ',')]
        squeezings: Option<Vec<f64>>,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
    /// One scenario point; prints the key-rate breakdown as JSON.
    Single {
        #[command(flatten)]
        point: PointArgs,
    },
}

#[derive(Args)]
struct PointArgs {
    /// Scenario name, repeatable or comma separated; `all` for every scenario.
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<String>,
    #[arg(long)]
    squeezing_db: Option<f64>,
    #[arg(long)]
    loss_db: Option<f64>,
    /// Transmissivity for whichever operation the scenario uses.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    kappa_ps: Option<f64>,
    #[arg(long)]
    kappa_qs: Option<f64>,
    #[arg(long)]
    eve_variance: Option<f64>,
    /// eve-purification or vacuum-environment.
    #[arg(long)]
    channel: Option<ChannelModel>,
    /// Reconciliation efficiency.
    #[arg(long, alias = "reconciliation-efficiency")]
    beta: Option<f64>,
    /// Fock cutoff override, repeatable.
    #[arg(long = "cutoff", value_name = "MODE=N")]
    cutoffs: Vec<String>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    squeezing_min: Option<f64>,
    #[arg(long)]
    squeezing_max: Option<f64>,
    #[arg(long)]
    squeezing_step: Option<f64>,
    #[arg(long)]
    loss_min: Option<f64>,
    #[arg(long)]
    loss_max: Option<f64>,
    #[arg(long)]
    loss_step: Option<f64>,
}

impl PointArgs {
    fn apply(&self, s: &mut Settings) -> Result<(), Error> {
        if !self.scenarios.is_empty() {
            s.set("scenario", &self.scenarios.join(","))?;
        }
        s.squeezing_db = self.squeezing_db.or(s.squeezing_db);
        s.loss_db = self.loss_db.or(s.loss_db);
        s.kappa = self.kappa.or(s.kappa);
        s.kappa_ps = self.kappa_ps.or(s.kappa_ps);
        s.kappa_qs = self.kappa_qs.or(s.kappa_qs);
        s.eve_variance = self.eve_variance.or(s.eve_variance);
        s.channel = self.channel.or(s.channel);
        s.reconciliation_efficiency = self.beta.or(s.reconciliation_efficiency);
        for c in &self.cutoffs {
            s.set("cutoff", c)?;
        }
        Ok(())
    }
}

impl GridArgs {
    fn apply(&self, s: &mut Settings) {
        s.squeezing_min = self.squeezing_min.or(s.squeezing_min);
        s.squeezing_max = self.squeezing_max.or(s.squeezing_max);
        s.squeezing_step = self.squeezing_step.or(s.squeezing_step);
        s.loss_min = self.loss_min.or(s.loss_min);
        s.loss_max = self.loss_max.or(s.loss_max);
        s.loss_step = self.loss_step.or(s.loss_step);
        // a range flag replaces a single value from the config file
        if self.squeezing_min.is_some() || self.squeezing_max.is_some() {
            s.squeezing_db = None;
        }
        if self.loss_min.is_some() || self.loss_max.is_some() {
            s.loss_db = None;
        }
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(io::Error::from)
        .and_then(|_| writeln!(out))
        .map_err(|e| Error::Output {
            path: "<stdout>".into(),
            message: e.to_string(),
        })
}

fn status_json(e: &Error) -> serde_json::Value {
    json!({ "status": PointStatus::from_error(e).as_str(), "error": e.to_string() })
}

fn out_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    if cli.threads.is_some() {
        settings.threads = cli.threads;
    }
    let threads = settings.threads;

    match cli.command {
        Command::Sweep {
            point,
            grid,
            optimize,
            out,
            timing,
        } => {
            point.apply(&mut settings)?;
            grid.apply(&mut settings);
            settings.optimize = optimize.or(settings.optimize);
            if timing {
                settings.timing = Some(true);
            }
            let grid = settings.grid()?;
            let records = with_threads(threads, || sweep(&grid))??;
            let timing = settings.timing.unwrap_or(false);
            let target = out
                .or(settings.out.clone())
                .or_else(|| out_dir_from_env().map(|d| d.join("sweep.csv")));
            match target {
                None => write_csv(io::stdout().lock(), &records, None, timing).map_err(|e| Error::Output {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })?,
                Some(path) => {
                    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                        std::fs::create_dir_all(dir).map_err(|e| Error::Output {
                            path: dir.display().to_string(),
                            message: e.to_string(),
                        })?;
                    }
                    let file = std::fs::File::create(&path).map_err(|e| Error::Output {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    write_csv(file, &records, None, timing).map_err(|e| Error::Output {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    let meta = json!({
                        "tool": "heraldkey",
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": "sweep",
                        "grid": grid,
                        "rows": records.len(),
                        "truncation": truncation_summary(&records),
                    });
                    write_metadata(&path.with_extension("json"), &meta)?;
                }
            }
        }
        Command::OptimizeKappa { point, objective } => {
            point.apply(&mut settings)?;
            let cfg = settings.single_point()?;
            let result = with_threads(threads, || optimize_kappa(&cfg, objective))?;
            let value = match result {
                Ok(opt) => json!({
                    "scenario": cfg.scenario,
                    "squeezing_db": cfg.squeezing_db,
                    "loss_db": cfg.loss_db,
                    "objective": objective,
                    "kappa": opt.kappa,
                    "g": gain_from_kappa(opt.kappa),
                    "value": opt.value,
                    "status": "ok",
                }),
                Err(e @ Error::Config(_)) | Err(e @ Error::InvalidParameter { .. }) => return Err(e),
                Err(e) => status_json(&e),
            };
            print_json(&value)?;
        }
        Command::Figure {
            name,
            point,
            grid,
            kappa_min,
            kappa_max,
            kappa_step,
            losses,
            squeezings,
            out,
            timing,
        } => {
            point.apply(&mut settings)?;
            grid.apply(&mut settings);
            settings.kappa_min = kappa_min.or(settings.kappa_min);
            settings.kappa_max = kappa_max.or(settings.kappa_max);
            settings.kappa_step = kappa_step.or(settings.kappa_step);
            settings.losses = losses.or(settings.losses);
            settings.squeezings = squeezings.or(settings.squeezings);
            if timing {
                settings.timing = Some(true);
            }
            let opts = settings.figure_options()?;
            let dir = out
                .or(settings.out.clone())
                .or_else(out_dir_from_env)
                .unwrap_or_else(|| PathBuf::from("."));
            let written = with_threads(threads, || figure_command(name, &opts, Path::new(&dir)))??;
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Single { point } => {
            point.apply(&mut settings)?;
            let cfg = settings.single_point()?;
            if cfg.channel_model != ChannelModel::EvePurification {
                return Err(Error::Config(
                    "single needs the eve-purification channel to evaluate a key rate".into(),
                ));
            }
            let value = match key_rate(&cfg) {
                Ok(b) => serde_json::to_value(b).expect("breakdown serializes"),
                Err(e) => status_json(&e),
            };
            print_json(&value)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heraldkey: {e}");
            match e {
                Error::Output { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
