//! `prd5` — split a file into quintuple-parity shards, scrub and repair
//! them, reassemble after drive loss, and run fault-injection campaigns.
//!
//! Exit codes: 0 clean, 1 corrected, 2 uncorrectable, 64 usage error,
//! 70 operational error (I/O and friends).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use prd5::faultlab::{run_campaign, TrialSpec};
use prd5::shardset::{
    cmd_encode, cmd_inject, cmd_reassemble, cmd_scrub, FieldChoice, StripeStatus,
};

#[derive(Parser)]
#[command(name = "prd5", version, about = "Quintuple-parity shard tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a payload file into k data shards plus 5 parity shards.
    Encode {
        /// Input payload file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory for shard files (created if needed).
        #[arg(long)]
        out_dir: PathBuf,
        /// Number of data shards.
        #[arg(long)]
        k: usize,
        /// Field width, optionally with a primitive polynomial in hex:
        /// `m` or `m:poly` (e.g. 8 or 8:11d). Widths: 4, 8, 16.
        #[arg(long, default_value = "8")]
        field: FieldChoice,
    },
    /// Rebuild the payload from a shard directory (up to 4 shards may be
    /// absent).
    Reassemble {
        /// Directory containing the shard files.
        #[arg(long)]
        dir: PathBuf,
        /// Output payload path.
        #[arg(long)]
        out: PathBuf,
        /// Extra shard indices to treat as missing, comma separated.
        #[arg(long, value_delimiter = ',')]
        missing: Vec<usize>,
    },
    /// Check every stripe of a complete shard set for corruption.
    Scrub {
        /// Directory containing all k+5 shard files.
        #[arg(long)]
        dir: PathBuf,
        /// Apply corrections to the shard files in place.
        #[arg(long)]
        repair: bool,
        /// For uncorrectable stripes, list the 3-failure candidates.
        #[arg(long)]
        list_candidates: bool,
    },
    /// XOR a value into one symbol of one shard (fault injection).
    Inject {
        /// Shard file to mutate.
        #[arg(long)]
        shard: PathBuf,
        /// Stripe index.
        #[arg(long)]
        stripe: u64,
        /// Value to XOR in, hex (nonzero, within the field width).
        #[arg(long, value_parser = parse_hex)]
        xor: u64,
    },
    /// Verification harness subcommands.
    Faultlab {
        #[command(subcommand)]
        command: FaultlabCommand,
    },
}

#[derive(Subcommand)]
enum FaultlabCommand {
    /// Run a seeded Monte Carlo fault-injection campaign.
    Campaign {
        /// Trial specification (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Where to write the campaign report (JSON).
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_hex(s: &str) -> Result<u64, String> {
    u64::from_str_radix(s.trim_start_matches("0x"), 16)
        .map_err(|e| format!("bad hex value {s:?}: {e}"))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Encode {
            input,
            out_dir,
            k,
            field,
        } => {
            let summary = cmd_encode(&input, &out_dir, k, field)
                .with_context(|| format!("encoding {}", input.display()))?;
            println!(
                "encoded {} bytes into {} shards ({} stripes) under {}",
                summary.payload_len,
                summary.shard_paths.len(),
                summary.stripe_count,
                out_dir.display()
            );
            Ok(0)
        }
        Command::Reassemble { dir, out, missing } => {
            cmd_reassemble(&dir, &out, &missing)
                .with_context(|| format!("reassembling from {}", dir.display()))?;
            println!("reassembled payload written to {}", out.display());
            Ok(0)
        }
        Command::Scrub {
            dir,
            repair,
            list_candidates,
        } => {
            let report = cmd_scrub(&dir, repair, list_candidates)
                .with_context(|| format!("scrubbing {}", dir.display()))?;
            for finding in &report.findings {
                println!("stripe {} {}", finding.stripe, finding.status);
                if let Some(candidates) = &finding.candidates {
                    for cand in candidates.iter() {
                        println!("stripe {} candidate {}", finding.stripe, cand);
                    }
                }
                if matches!(finding.status, StripeStatus::Corrected(_)) && repair {
                    println!("stripe {} repaired", finding.stripe);
                }
            }
            println!(
                "{} stripes: {} clean, {} corrected, {} uncorrectable",
                report.stripes, report.clean, report.corrected, report.uncorrectable
            );
            Ok(report.exit_code() as u8)
        }
        Command::Inject { shard, stripe, xor } => {
            cmd_inject(&shard, stripe, xor)
                .with_context(|| format!("injecting into {}", shard.display()))?;
            println!(
                "stripe {stripe} of {} xored with {xor:#x}",
                shard.display()
            );
            Ok(0)
        }
        Command::Faultlab { command } => match command {
            FaultlabCommand::Campaign { spec, out } => {
                let text = std::fs::read_to_string(&spec)
                    .with_context(|| format!("reading {}", spec.display()))?;
                let spec: TrialSpec =
                    serde_json::from_str(&text).context("parsing trial spec")?;
                let report = run_campaign(&spec)?;
                std::fs::write(&out, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", out.display()))?;
                println!(
                    "{} trials: {} clean, {} corrected, {} miscorrected, {} detected, {} silent",
                    report.trials,
                    report.counts.clean,
                    report.counts.corrected_exact,
                    report.counts.miscorrected,
                    report.counts.detected_uncorrectable,
                    report.counts.silent
                );
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not usage errors.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(70)
        }
    }
}
