use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aoa_mcrb::experiments::{
    cmd_bounds, cmd_fig1, cmd_fig2, cmd_fig3, cmd_montecarlo, ExperimentConfig, Output,
    RunOptions,
};
use aoa_mcrb::Error;
use clap::{Args, Parser, Subcommand};

/// Cramér-Rao and misspecified Cramér-Rao bounds for ULA angle-of-arrival
/// estimation under spoofing.
#[derive(Debug, Parser)]
#[command(name = "aoa-mcrb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate CRB, mismatch penalty and MCRB over the SNR sweep.
    Bounds,
    /// Monte-Carlo MSE of the ML estimator against CRB and MCRB per offset.
    Fig1,
    /// Mismatch penalty over the offset grid for several array sizes.
    Fig2,
    /// Average (random phase) vs worst-case MCRB for multi-antenna attackers.
    Fig3,
    /// Generic Monte-Carlo MSE sweep without a figure.
    Montecarlo,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML config file; missing keys fall back to defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Shorthand for `--mc.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// SVG output path (figure commands only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Worker threads for Monte-Carlo trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override any config key, e.g. `--set fig3.counts=[2,4,8]`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Number of array elements.
    #[arg(long = "geometry.elements", value_name = "M", global = true)]
    geometry_elements: Option<String>,
    /// Element spacing over wavelength.
    #[arg(long = "geometry.spacing_ratio", value_name = "D_OVER_LAMBDA", global = true)]
    geometry_spacing_ratio: Option<String>,
    /// True direction of arrival in degrees.
    #[arg(long = "scenario.theta_deg", value_name = "DEG", global = true)]
    scenario_theta_deg: Option<String>,
    /// Attacker antennas L.
    #[arg(long = "attacker.count", value_name = "L", global = true)]
    attacker_count: Option<String>,
    /// Spoofing offsets as a TOML list.
    #[arg(long = "attacker.offsets_deg", value_name = "[DEG,..]", global = true)]
    attacker_offsets_deg: Option<String>,
    /// explicit, random_phase, worst_case or worst_case_unconstrained_magnitudes.
    #[arg(long = "attacker.strategy", value_name = "NAME", global = true)]
    attacker_strategy: Option<String>,
    /// Random-phase draws averaged by fig3.
    #[arg(long = "attacker.realizations", value_name = "N", global = true)]
    attacker_realizations: Option<String>,
    /// SNR sweep in dB as [start, stop, step].
    #[arg(long = "sweep.snr_db", value_name = "[START,STOP,STEP]", global = true)]
    sweep_snr_db: Option<String>,
    /// Monte-Carlo trials per point.
    #[arg(long = "mc.trials", value_name = "N", global = true)]
    mc_trials: Option<String>,
    /// Master seed.
    #[arg(long = "mc.seed", value_name = "SEED", global = true)]
    mc_seed: Option<String>,
}

impl GlobalArgs {
    /// Dotted-key overrides in increasing precedence: `--set`, named flags, `--seed`.
    fn overrides(&self) -> Result<Vec<(String, String)>, Error> {
        let mut out = Vec::new();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
                key: kv.clone(),
                message: "expected KEY=VALUE".into(),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = [
            ("geometry.elements", &self.geometry_elements),
            ("geometry.spacing_ratio", &self.geometry_spacing_ratio),
            ("scenario.theta_deg", &self.scenario_theta_deg),
            ("attacker.count", &self.attacker_count),
            ("attacker.offsets_deg", &self.attacker_offsets_deg),
            ("attacker.strategy", &self.attacker_strategy),
            ("attacker.realizations", &self.attacker_realizations),
            ("sweep.snr_db", &self.sweep_snr_db),
            ("mc.trials", &self.mc_trials),
            ("mc.seed", &self.mc_seed),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                out.push((key.to_string(), v.clone()));
            }
        }
        if let Some(seed) = self.seed {
            out.push(("mc.seed".into(), seed.to_string()));
        }
        Ok(out)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<i32, Error> {
    let overrides = cli.global.overrides()?;
    let cfg = match &cli.global.config {
        Some(path) => ExperimentConfig::load(path, &overrides)?,
        None => ExperimentConfig::from_sources(None, &overrides)?,
    };
    if cli.global.threads == Some(0) {
        return Err(Error::Config {
            key: "threads".into(),
            message: "must be at least 1".into(),
        });
    }
    let opts = RunOptions {
        threads: cli.global.threads,
    };
    let output: Output = match cli.command {
        Command::Bounds => cmd_bounds(&cfg)?,
        Command::Fig1 => cmd_fig1(&cfg, opts)?,
        Command::Fig2 => cmd_fig2(&cfg)?,
        Command::Fig3 => cmd_fig3(&cfg, opts)?,
        Command::Montecarlo => cmd_montecarlo(&cfg, opts)?,
    };

    let csv_path = cli.global.out.or_else(|| cfg.output.csv.clone().map(PathBuf::from));
    match csv_path {
        Some(path) => write_file(&path, &output.csv)?,
        None => print!("{}", output.csv),
    }
    let svg_path = cli.global.svg.or_else(|| cfg.output.svg.clone().map(PathBuf::from));
    if let Some(path) = svg_path {
        match &output.svg {
            Some(svg) => write_file(&path, svg)?,
            None => eprintln!("warning: this command draws no figure; --svg ignored"),
        }
    }
    if output.failed_rows > 0 {
        eprintln!("error: {} row(s) hit a degenerate scenario", output.failed_rows);
    }
    Ok(output.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
