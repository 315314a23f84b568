//! Experiment runner. Exit codes: 0 all asserted criteria pass, 1 a
//! criterion failed, 2 usage or configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use micropolar_cli::config::{parse_r, RunConfig};
use micropolar_cli::experiments;

use micropolar::calibration::{load_calibration, save_calibration, Calibration};
use micropolar::report::ExperimentReport;

#[derive(Parser)]
#[command(name = "micropolar", version, about = "Frequency-space experiments for the 3-D micropolar system")]
struct Cli {
    /// TOML configuration file (flat dotted keys); defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition-of-unity and block-support checks.
    LpCheck,
    /// Symbol algebra and semigroup verification.
    SemigroupVerify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Nonlinear mild-solution run with structure diagnostics.
    Simulate {
        /// Also write trajectory checkpoints under the output directory.
        #[arg(long)]
        save_fields: bool,
    },
    /// Picard-expansion diagnostics (n-linearity, truncation order).
    Picard,
    /// Norm-inflation experiment at one (N, delta, r, space).
    Inflate {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        /// Summability index: a number or "inf".
        #[arg(long)]
        r: Option<String>,
        /// "fb" or "besov".
        #[arg(long)]
        space: Option<String>,
    },
    /// Small-data fixed point at the calibrated smallness.
    Smalldata,
    /// Kernel sign bounds over j = 2..=8.
    KernelCheck {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Data-norm scaling slopes for r in {2, 4, inf}.
    DataScaling,
    /// Cube-quadrature versus lattice second-iterate comparison.
    CrossCheck {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long, default_value_t = 64)]
        lattice: usize,
        /// Also run the doubled lattice and require the deviation to shrink.
        #[arg(long)]
        refine: bool,
    },
    /// Run the calibration corpora and write the constants file.
    Calibrate {
        /// Overwrite an existing calibration file.
        #[arg(long)]
        force: bool,
    },
    /// Check a stored calibration against fresh corpus runs.
    CalibrationConsistency,
    /// Merge and summarize the reports in the output directory.
    Report,
    /// Dump the symbol matrices at one frequency.
    SymbolDump {
        /// Frequency as "x,y,z".
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn calibration_path(cfg: &RunConfig) -> PathBuf {
    cfg.calibration_file
        .clone()
        .unwrap_or_else(|| PathBuf::from("calibration.json"))
}

fn try_load_calibration(cfg: &RunConfig) -> Option<Calibration> {
    load_calibration(&calibration_path(cfg)).ok()
}

fn write_report(cfg: &RunConfig, name: &str, report: &ExperimentReport) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(format!("{name}.json"));
    report.write(&path)?;
    Ok(path)
}

fn finish(cfg: &RunConfig, name: &str, report: ExperimentReport, started: Instant) -> anyhow::Result<bool> {
    let path = write_report(cfg, name, &report)?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    eprintln!(
        "{name}: wrote {} in {:.2}s",
        path.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(report.pass)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let started = Instant::now();
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::LpCheck => {
            let report = experiments::lp_check(&cfg)?;
            finish(&cfg, "lp-check", report, started)
        }
        Command::SemigroupVerify { samples } => {
            let report = experiments::semigroup_verify(&cfg, samples)?;
            finish(&cfg, "semigroup-verify", report, started)
        }
        Command::Simulate { save_fields } => {
            let report = experiments::simulate(&cfg, save_fields)?;
            finish(&cfg, "simulate", report, started)
        }
        Command::Picard => {
            let report = experiments::picard_check(&cfg)?;
            finish(&cfg, "picard", report, started)
        }
        Command::Inflate { n, delta, r, space } => {
            if let Some(n) = n {
                cfg.experiment.n = n;
            }
            if let Some(d) = delta {
                cfg.experiment.delta = d;
            }
            if let Some(rs) = r {
                cfg.experiment.r = micropolar_cli::config::RIndex(parse_r(&rs)?);
            }
            if let Some(space) = space {
                cfg.experiment.space = space;
            }
            cfg.validate()?;
            let cal = try_load_calibration(&cfg);
            let (report, csv) = experiments::inflate(&cfg, cal.as_ref())?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            std::fs::write(cfg.output_dir.join("inflate-integrands.csv"), csv)?;
            finish(&cfg, "inflate", report, started)
        }
        Command::Smalldata => {
            let cal = try_load_calibration(&cfg).ok_or_else(|| {
                anyhow::anyhow!(
                    "smalldata needs a calibration file; run `micropolar calibrate` first"
                )
            })?;
            let report = experiments::smalldata(&cfg, &cal)?;
            finish(&cfg, "smalldata", report, started)
        }
        Command::KernelCheck { samples } => {
            let report = experiments::kernel_report(&cfg, samples)?;
            finish(&cfg, "kernel-check", report, started)
        }
        Command::DataScaling => {
            let report = experiments::data_scaling_report(&cfg)?;
            finish(&cfg, "data-scaling", report, started)
        }
        Command::CrossCheck { n, lattice, refine } => {
            if let Some(n) = n {
                cfg.experiment.n = n;
            }
            let report = experiments::cross_check(&cfg, lattice, refine)?;
            finish(&cfg, "cross-check", report, started)
        }
        Command::Calibrate { force } => {
            let path = calibration_path(&cfg);
            if path.exists() && !force {
                anyhow::bail!(
                    "{} exists; pass --force to overwrite",
                    path.display()
                );
            }
            let (cal, report) = experiments::calibrate_cmd(&cfg)?;
            save_calibration(&path, &cal)?;
            eprintln!("calibrate: wrote {}", path.display());
            finish(&cfg, "calibrate", report, started)
        }
        Command::CalibrationConsistency => {
            let cal = try_load_calibration(&cfg)
                .ok_or_else(|| anyhow::anyhow!("no calibration file found"))?;
            let report = experiments::calibration_consistency(&cfg, &cal)?;
            finish(&cfg, "calibration-consistency", report, started)
        }
        Command::Report => {
            let mut all_pass = true;
            let mut entries: Vec<(String, ExperimentReport)> = Vec::new();
            for entry in std::fs::read_dir(&cfg.output_dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json")
                    && path.file_name().is_some_and(|f| f != "manifest.json")
                {
                    if let Ok(report) =
                        serde_json::from_str::<ExperimentReport>(&std::fs::read_to_string(&path)?)
                    {
                        entries.push((path.display().to_string(), report));
                    }
                }
            }
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (path, report) in &entries {
                println!("== {path} ({})", if report.pass { "pass" } else { "FAIL" });
                for line in report.summary_lines() {
                    println!("   {line}");
                }
                all_pass &= report.pass;
            }
            if entries.is_empty() {
                println!("no reports under {}", cfg.output_dir.display());
            }
            Ok(all_pass)
        }
        Command::SymbolDump { xi, t } => {
            let parts: Vec<f64> = xi
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| anyhow::anyhow!("--xi expects three comma-separated numbers"))?;
            anyhow::ensure!(parts.len() == 3, "--xi expects three comma-separated numbers");
            print!("{}", experiments::symbol_dump([parts[0], parts[1], parts[2]], t)?);
            Ok(true)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    // Numeric failures from the core library map to 3, configuration and
    // usage problems to 2.
    if err.downcast_ref::<micropolar::Error>().is_some() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
