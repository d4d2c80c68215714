use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use crsnoma_cli::config::ConfigFile;
use crsnoma_cli::output::{read_csv, run_metadata, write_csv, write_json, RunDocument};
use crsnoma_cli::presets::{preset, PRESET_NAMES};
use crsnoma_cli::slope::{fit_outage_slope, SlopeWindow};
use crsnoma_cli::sweep::{run_variants, SweepSpec};
use crsnoma_cli::CliError;
use crsnoma_core::model::db_to_linear;
use crsnoma_core::optimizer::{optimize_a2, PowerSearchSpec, SearchMetric};
use crsnoma_core::SystemConfig;

#[derive(Parser)]
#[command(
    name = "crsnoma",
    version,
    about = "Rate and outage sweeps for underlay cooperative-relaying NOMA"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write a CSV table.
    Run {
        /// JSON file overriding scenario and sweep fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bundled sweep to start from.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        preset: Option<String>,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a JSON document with rows and run metadata.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Fit large-Q outage slopes from a sweep CSV.
    Slope {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 40.0)]
        min_db: f64,
        #[arg(long)]
        max_db: Option<f64>,
    },
    /// Grid search for the power split at one Q.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        q_db: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Closed)]
        metric: MetricArg,
        #[arg(long, default_value_t = 24)]
        points: u32,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Closed,
    Mc,
}

fn writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(
    config: Option<PathBuf>,
    preset_name: Option<String>,
    out: Option<PathBuf>,
    json: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<u64>,
) -> Result<bool> {
    let (mut variants, mut spec) = match preset_name.as_deref() {
        Some(name) => {
            let p =
                preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
            (p.variants, p.spec)
        }
        None => (
            vec![("base".to_string(), SystemConfig::reference())],
            SweepSpec::default(),
        ),
    };
    if let Some(path) = &config {
        let file = ConfigFile::load(path)?;
        for (_, cfg) in &mut variants {
            file.apply_system(cfg);
        }
        file.apply_sweep(&mut spec);
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(n) = trials {
        spec.n_trials = n;
    }

    let rows = run_variants(&spec, &variants)?;
    let mut w = writer(out.as_ref())?;
    write_csv(&rows, &mut w)?;
    w.flush()?;
    if let Some(path) = &json {
        let doc = RunDocument {
            metadata: run_metadata(preset_name.as_deref(), &variants, &spec)?,
            rows: &rows,
        };
        let mut w = writer(Some(path))?;
        write_json(&doc, &mut w)?;
        w.flush()?;
    }
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} rows failed; see the error column",
            rows.len()
        );
    }
    Ok(failed == 0)
}

fn slope(input: PathBuf, min_db: f64, max_db: Option<f64>) -> Result<()> {
    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let rows = read_csv(file)?;
    let window = SlopeWindow {
        q_db_min: min_db,
        q_db_max: max_db.unwrap_or(f64::INFINITY),
    };
    let report = fit_outage_slope(&rows, window)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for fit in &report.fits {
        w.serialize(fit).map_err(CliError::from)?;
    }
    w.flush()?;
    for g in &report.insufficient {
        eprintln!("skipped {g}");
    }
    Ok(())
}

fn optimize(
    config: Option<PathBuf>,
    q_db: f64,
    metric: MetricArg,
    points: u32,
    trials: u64,
    seed: u64,
) -> Result<()> {
    let mut cfg = SystemConfig::reference();
    if let Some(path) = &config {
        ConfigFile::load(path)?.apply_system(&mut cfg);
    }
    cfg.q_peak = db_to_linear(q_db);
    let spec = PowerSearchSpec {
        m_points: points,
        metric: match metric {
            MetricArg::Closed => SearchMetric::SumRateClosed,
            MetricArg::Mc => SearchMetric::SumRateMc,
        },
        mc_trials: trials,
        seed,
    };
    let result = optimize_a2(&cfg, &spec).map_err(CliError::from)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<CliError>())
        .map(|e| e.exit_code() as u8)
        .unwrap_or(3)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| -> Result<bool> {
        if let Some(n) = cli.workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("starting worker pool")?;
        }
        match cli.command {
            Command::Run {
                config,
                preset,
                out,
                json,
                seed,
                trials,
            } => run(config, preset, out, json, seed, trials),
            Command::Slope {
                input,
                min_db,
                max_db,
            } => slope(input, min_db, max_db).map(|()| true),
            Command::Optimize {
                config,
                q_db,
                metric,
                points,
                trials,
                seed,
            } => optimize(config, q_db, metric, points, trials, seed).map(|()| true),
        }
    })();
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
