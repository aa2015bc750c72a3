//! `bellfacets`: batch runs over correlation Bell inequality catalogs.
//!
//! Exit status is 0 when every check passes, 2 when a catalog entry is not a
//! tight facet or its bound does not match (a finding), and 1 on usage or IO
//! errors.

use anyhow::{bail, Context, Result};
use bellfacets::catalog::{
    attach_lift, attach_quantum, catalog_from_report, catalog_to_csv, read_catalog, reduce_catalog, to_json,
    verification_to_csv, verify_catalog, CatalogEntry,
};
use bellfacets::enumerate::DEFAULT_CHECKPOINT_INTERVAL;
use bellfacets::{classify_enumeration, Checkpoint, Enumeration, EnumerationMode, EnumerationReport, SeesawOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bellfacets", version, about = "Correlation Bell inequalities from admissible sign functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate admissible sign functions and write one certified inequality per symmetry class.
    Enumerate {
        #[arg(long)]
        parties: usize,
        /// Checkpoint file; an existing one is resumed.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT_INTERVAL)]
        checkpoint_interval: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check the local bound and tightness of every catalog entry.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Attach see-saw quantum values to every catalog entry.
    Violate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write the catalog of sign functions depending on the first variable of each party only.
    Reduce {
        #[arg(long)]
        parties: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Attach lifted (setting 0 fixed to outcome +1) forms to every catalog entry.
    Lift {
        #[command(flatten)]
        input: Input,
        /// Also record the inequality in joint and marginal probabilities.
        #[arg(long)]
        probability_form: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write the symmetry-class report of the admissible functions.
    Classify {
        #[arg(long)]
        parties: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Input {
    /// Catalog written by `enumerate`, `reduce` or a previous run.
    #[arg(long = "in")]
    input: PathBuf,
    /// Reject catalogs whose entries are not for this many parties.
    #[arg(long)]
    parties: Option<usize>,
}

#[derive(Args)]
struct Common {
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, env = "BELLFACETS_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Whether the run produced findings.
#[derive(PartialEq, Eq)]
enum Status {
    Clean,
    Findings,
}

fn require_parties(parties: usize, allowed: &[usize], command: &str) -> Result<()> {
    if !allowed.contains(&parties) {
        bail!("{command} supports --parties {allowed:?}, got {parties}");
    }
    Ok(())
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Input, allowed: &[usize], command: &str) -> Result<Vec<CatalogEntry>> {
    let entries = read_catalog(&input.input).with_context(|| format!("reading {}", input.input.display()))?;
    for e in &entries {
        require_parties(e.parties, allowed, command).with_context(|| format!("entry {}", e.id))?;
        if input.parties.is_some_and(|n| n != e.parties) {
            bail!("entry {} is for {} parties, expected {}", e.id, e.parties, input.parties.unwrap());
        }
    }
    Ok(entries)
}

fn write_catalog(common: &Common, entries: &[CatalogEntry]) -> Result<Status> {
    let text = match common.format {
        Format::Json => to_json(entries)?,
        Format::Csv => catalog_to_csv(entries),
    };
    emit(common, &text)?;
    let loose: Vec<&str> = entries.iter().filter(|e| !e.tight).map(|e| e.id.as_str()).collect();
    for id in &loose {
        eprintln!("NOT TIGHT {id}");
    }
    Ok(if loose.is_empty() { Status::Clean } else { Status::Findings })
}

fn report_csv(report: &EnumerationReport) -> String {
    let mut out = String::from("representative,orbit_size,factorable\n");
    for c in &report.canonical_classes {
        out.push_str(&format!("{},{},{}\n", c.representative, c.orbit_size, c.factorable));
    }
    out
}

fn enumeration(parties: usize, workers: usize, checkpoint: Option<&Path>, interval: usize) -> Result<Enumeration> {
    let mut run = Enumeration::new(parties, EnumerationMode::Backtracking)?.workers(workers);
    if let Some(path) = checkpoint {
        if path.exists() {
            let saved = Checkpoint::read(path).with_context(|| format!("reading {}", path.display()))?;
            eprintln!("resuming from {} tables", saved.tables.len());
            run = run.resume(saved)?;
        }
        run = run.checkpoint(path, interval);
    }
    Ok(run)
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Enumerate { parties, checkpoint, checkpoint_interval, common } => {
            require_parties(parties, &[2, 3], "enumerate")?;
            let run = enumeration(parties, common.workers, checkpoint.as_deref(), checkpoint_interval)?;
            let report = classify_enumeration(&run)?;
            eprintln!(
                "{} admissible, {} classes in {:.3} s",
                report.total_admissible,
                report.canonical_classes.len(),
                report.wall_time
            );
            write_catalog(&common, &catalog_from_report(&report)?)
        }
        Command::Classify { parties, common } => {
            require_parties(parties, &[2, 3], "classify")?;
            let report = classify_enumeration(&enumeration(parties, common.workers, None, 1)?)?;
            eprintln!(
                "{} admissible, {} factorable, {} classes",
                report.total_admissible,
                report.factorable_count,
                report.canonical_classes.len()
            );
            let text = match common.format {
                Format::Json => to_json(&report)?,
                Format::Csv => report_csv(&report),
            };
            emit(&common, &text)?;
            Ok(Status::Clean)
        }
        Command::Verify { input, common } => {
            let entries = load(&input, &[2, 3, 4], "verify")?;
            let records = verify_catalog(&entries)?;
            let text = match common.format {
                Format::Json => to_json(&records)?,
                Format::Csv => verification_to_csv(&records),
            };
            emit(&common, &text)?;
            let mut status = Status::Clean;
            for r in records.iter().filter(|r| !r.pass) {
                let what = if r.tight { "BOUND MISMATCH" } else { "NOT TIGHT" };
                eprintln!("{what} {}", r.id);
                status = Status::Findings;
            }
            eprintln!("{} of {} entries pass", records.iter().filter(|r| r.pass).count(), records.len());
            Ok(status)
        }
        Command::Violate { input, seed, restarts, common } => {
            let mut entries = load(&input, &[2, 3, 4], "violate")?;
            let opts = SeesawOptions { seed, restarts, workers: common.workers, ..Default::default() };
            attach_quantum(&mut entries, &opts)?;
            for e in &entries {
                if let Some(q) = &e.quantum {
                    eprintln!("{} ratio {:.9}", e.id, q.ratio);
                }
            }
            write_catalog(&common, &entries)
        }
        Command::Reduce { parties, common } => {
            require_parties(parties, &[2, 3], "reduce")?;
            write_catalog(&common, &reduce_catalog(parties)?)
        }
        Command::Lift { input, probability_form, common } => {
            let mut entries = load(&input, &[2, 3, 4], "lift")?;
            attach_lift(&mut entries, probability_form)?;
            write_catalog(&common, &entries)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
