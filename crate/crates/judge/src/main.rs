use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use diagram_judge::harness::{run_eval, DataDirs};
use diagram_judge::io::{load_detections, load_image, load_spec};
use diagram_judge::{emit_report, generate_audit_suite, load_config, load_manifest, JudgeError, ReportFormat};
use diagram_judge_core::synth::default_catalog;
use diagram_judge_core::{evaluate, ThresholdConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_AUDIT: u8 = 2;
const EXIT_MANIFEST: u8 = 3;

/// Judge rendered math diagrams against constraint specs.
#[derive(Parser, Debug)]
#[command(name = "diagram-judge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every problem in a manifest and print the report.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        detections: Option<PathBuf>,
        /// key = value threshold overrides
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Generate the synthetic audit suite and check every verdict.
    Audit {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
    /// Judge a single image and print the verdict.
    VerifyOne {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        detections: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn config(path: &Option<PathBuf>) -> anyhow::Result<ThresholdConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ThresholdConfig::default()),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run { manifest, images, detections, config: cfg_path, workers, out, format } => {
            let cfg = config(&cfg_path)?;
            let records = match load_manifest(&manifest) {
                Ok(r) => r,
                Err(e @ JudgeError::Manifest(_)) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(EXIT_MANIFEST));
                }
                Err(e) => return Err(e.into()),
            };
            let report = run_eval(&records, &DataDirs { images, detections }, &cfg, workers);
            let text = emit_report(&report, format);
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Audit { out, config: cfg_path, workers } => {
            let cfg = config(&cfg_path)?;
            let started = std::time::Instant::now();
            let outcome = generate_audit_suite(&default_catalog(), &cfg, &out, workers)?;
            print!("{}", emit_report(&outcome.report, ReportFormat::Table));
            println!(
                "audit: {}/{} verdicts as expected in {:.1}s",
                outcome.agreement(),
                outcome.rows.len(),
                started.elapsed().as_secs_f64()
            );
            if !outcome.disagreements.is_empty() {
                for id in &outcome.disagreements {
                    eprintln!("disagreement: {id}");
                }
                return Ok(ExitCode::from(EXIT_AUDIT));
            }
        }
        Command::VerifyOne { image, spec, detections, config: cfg_path } => {
            let cfg = config(&cfg_path)?;
            let spec = load_spec(&spec)?;
            let img = load_image(&image, cfg.eval_resolution)?;
            let det = detections.as_deref().map(load_detections).transpose()?;
            let verdict = evaluate(&img, &spec, &cfg, det.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&verdict)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
