//! Command-line entry point.
//!
//! `ncrsim --scenario fig3 --seed 1 --trials 200 --out results/` writes
//! `results/fig3.csv` and `results/manifest.txt`. Flags override config-file
//! values. `NCRSIM_THREADS` caps the worker count (0 or unset = automatic);
//! outputs are byte-identical regardless.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ncrsim::config::{
    self, parse_config_document_onto, preset_params, RunConfig, ScenarioKind, SystemParams,
    DEFAULT_SEED, DEFAULT_TRIALS,
};
use ncrsim::error::SimError;
use ncrsim::report::{self, RunManifest};
use ncrsim::scenarios;

#[derive(Parser)]
#[command(name = "ncrsim", version, about = "Deterministic repeater/surface link-level simulator")]
struct Cli {
    /// Plain-text config file (`key = value` lines); flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment to run
    #[arg(long, value_enum)]
    scenario: Option<ScenarioKind>,

    /// Master seed for Monte Carlo substreams
    #[arg(long)]
    seed: Option<u64>,

    /// Trials per sweep point
    #[arg(long)]
    trials: Option<usize>,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Also dump per-trial records to <scenario>_raw.csv
    #[arg(long)]
    raw: bool,
}

fn init_thread_pool() -> ncrsim::Result<()> {
    if let Ok(v) = std::env::var("NCRSIM_THREADS") {
        let n: usize = v.parse().map_err(|_| SimError::RangeViolation {
            key: "NCRSIM_THREADS".into(),
            reason: format!("not an integer: \"{v}\""),
        })?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| SimError::RangeViolation {
                    key: "NCRSIM_THREADS".into(),
                    reason: e.to_string(),
                })?;
        }
    }
    Ok(())
}

fn resolve(cli: &Cli) -> ncrsim::Result<(SystemParams, RunConfig)> {
    let config_text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path)?),
        None => None,
    };

    // scenario first (flag wins), then re-read the document over its preset
    let from_file = match &config_text {
        Some(text) => config::parse_config_document(text)?,
        None => Default::default(),
    };
    let scenario = cli
        .scenario
        .or(from_file.scenario)
        .ok_or(SimError::MissingKey { key: "scenario" })?;

    let cfg = match &config_text {
        Some(text) => parse_config_document_onto(text, preset_params(scenario))?,
        None => config::ParsedConfig {
            params: preset_params(scenario),
            ..Default::default()
        },
    };

    let trials = cli.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(SimError::RangeViolation {
            key: "trials".into(),
            reason: "must be at least 1".into(),
        });
    }
    Ok((
        cfg.params,
        RunConfig {
            scenario,
            seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            trials,
        },
    ))
}

fn run(cli: Cli) -> ncrsim::Result<()> {
    init_thread_pool()?;
    let (params, run_cfg) = resolve(&cli)?;

    let output = match run_cfg.scenario {
        ScenarioKind::Fig3 => {
            scenarios::run_fig3(&params, run_cfg.seed, run_cfg.trials, None)?
        }
        ScenarioKind::Fig4 => {
            scenarios::run_fig4(&params, run_cfg.seed, run_cfg.trials, None)?.1
        }
        ScenarioKind::Fig5 => {
            scenarios::run_fig5(&params, run_cfg.seed, run_cfg.trials, None)?
        }
        ScenarioKind::Fig7 => {
            scenarios::run_fig7(&params, run_cfg.seed, run_cfg.trials, None)?
        }
    };

    std::fs::create_dir_all(&cli.out)?;
    let csv_path = cli.out.join(format!("{}.csv", run_cfg.scenario));
    report::write_csv(run_cfg.scenario, &output.aggregates, &csv_path)?;
    let mut outputs = vec![csv_path.display().to_string()];

    if cli.raw {
        let raw_path = cli.out.join(format!("{}_raw.csv", run_cfg.scenario));
        std::fs::write(&raw_path, report::render_raw_csv(&output.raw)?)?;
        outputs.push(raw_path.display().to_string());
    }

    let effective_config = config::serialize_config(&params, &run_cfg);
    let manifest = RunManifest {
        scenario: run_cfg.scenario,
        config_digest: report::config_digest(&effective_config),
        master_seed: run_cfg.seed,
        trials: run_cfg.trials,
        tool_version: env!("CARGO_PKG_VERSION"),
        outputs: outputs.clone(),
    };
    let manifest_path = cli.out.join("manifest.txt");
    std::fs::write(&manifest_path, manifest.render())?;
    outputs.push(manifest_path.display().to_string());

    for o in &outputs {
        println!("wrote {o}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ncrsim: {e}");
            ExitCode::FAILURE
        }
    }
}
