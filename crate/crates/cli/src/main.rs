//! `dirlab`: run declarative experiments and compare their outputs.
//!
//! Exit status: 0 when every hard audit passes, 1 when one fails (or a
//! comparison exceeds tolerance), 2 for bad configs or mismatched runs,
//! 3 for numerical failures.

mod compare;
mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{ExperimentConfig, Kind};
use run::{RunError, RunOutput, Status};

#[derive(Parser)]
#[command(name = "dirlab", version, about = "Dirichlet spectra, killed diffusions and their scaling laws")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the config output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Column-wise differences between two run directories.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List experiment kinds.
    ListKinds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run {
            config,
            seed,
            workers,
            out,
        } => run_cmd(&config, seed, workers, out),
        Cmd::Compare { run_a, run_b, out } => compare_cmd(&run_a, &run_b, out),
        Cmd::ListKinds => {
            for k in Kind::ALL {
                println!("{:<15} {}", k.name(), k.about());
            }
            ExitCode::SUCCESS
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("dirlab: {msg}");
    ExitCode::from(code)
}

fn run_cmd(path: &Path, seed: Option<u64>, workers: Option<usize>, out: Option<PathBuf>) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(2, format!("{}: {e}", path.display())),
    };
    let mut cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(2, format!("{}: {e}", path.display())),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("dirlab-out"));
    cfg.output_dir = None;
    let cfg = cfg.resolve();
    if let Some(w) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            return fail(2, format!("--workers: {e}"));
        }
    }
    let output = match run::execute(&cfg) {
        Ok(o) => o,
        Err(RunError::Config(e)) => return fail(2, format!("{}: {e}", path.display())),
        Err(RunError::Numerical(e)) => return fail(3, format!("{} ({}): {e}", path.display(), cfg.kind.name())),
    };
    if let Err(e) = write_outputs(&dir, &cfg, &output) {
        return fail(3, format!("{}: {e}", dir.display()));
    }
    let hard_fail = output.audits.iter().filter(|a| a.hard && a.status == Status::Fail).count();
    for a in &output.audits {
        let tag = match a.status {
            Status::Pass => "pass",
            Status::Fail if a.hard => "FAIL",
            Status::Fail => "fail (soft)",
            Status::Skipped => "skipped",
        };
        println!("{:<12} {:<34} {:<11} {}", a.module, a.name, tag, a.detail);
    }
    if hard_fail > 0 {
        eprintln!("dirlab: {hard_fail} hard audit(s) failed");
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_outputs(dir: &Path, cfg: &ExperimentConfig, o: &RunOutput) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(dir.join("results.csv"))
        .map_err(|e| e.to_string())?;
    w.write_record(&o.table.header).map_err(|e| e.to_string())?;
    for row in &o.table.rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    let count = |s: Status, hard: bool| o.audits.iter().filter(|a| a.status == s && (a.hard || !hard)).count();
    let report = json!({
        "kind": cfg.kind.name(),
        "seed": cfg.seed,
        "audits": o.audits,
        "summary": {
            "pass": count(Status::Pass, false),
            "fail": count(Status::Fail, false),
            "hard_fail": count(Status::Fail, true),
            "skipped": count(Status::Skipped, false),
        },
        "results": o.results,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("resolved_config.toml"), cfg.to_toml()).map_err(|e| e.to_string())?;
    Ok(())
}

fn compare_cmd(a: &Path, b: &Path, out: Option<PathBuf>) -> ExitCode {
    let rep = match compare::compare(a, b) {
        Ok(r) => r,
        Err(e) => return fail(2, e),
    };
    let text = serde_json::to_string_pretty(&rep).expect("serialisable") + "\n";
    print!("{text}");
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(dir.join("compare.json"), &text)) {
            return fail(3, format!("{}: {e}", dir.display()));
        }
    }
    if rep.exceeded > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
