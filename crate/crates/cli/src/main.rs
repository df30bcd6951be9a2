use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use capdiag_core::io::{emit_reports, explain};
use capdiag_core::ledger::{verify_audit_log, AuditLog};
use capdiag_core::pipeline::{
    run_inputs, InputLabels, PipelineConfig, PipelineError, Precision, ReportBundle,
};
use capdiag_core::{fixtures, run_pipeline};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capdiag", version, about = "Audited diagnostic indicators from provenance-tagged statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write reports.
    Run(RunArgs),
    /// Re-check an existing audit log by recomputation.
    Verify {
        /// Path to an audit.log file.
        audit: PathBuf,
    },
    /// Print the lineage of one result from an audit log.
    Explain {
        /// Result id, e.g. `eu_cagr` or `cf:finance:2024`.
        id: String,
        #[arg(long, default_value = "audit.log")]
        audit: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Use the bundled fixture inputs instead of files.
    #[arg(long, conflicts_with_all = ["dataset", "defs", "rules", "hypotheses", "cfindex"])]
    fixture: bool,
    #[arg(long, required_unless_present = "fixture")]
    dataset: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    defs: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    rules: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    hypotheses: Option<PathBuf>,
    /// Friction-index config (TOML).
    #[arg(long)]
    cfindex: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn summarize(b: &ReportBundle) {
    println!(
        "sources accepted {}, rejected {}, definitions blocked {}",
        b.sources.len(),
        b.rejected.len(),
        b.blocked.len()
    );
    println!(
        "derived {}, audit records {}, verified {}/{}",
        b.all_derived().count(),
        b.audit.len(),
        b.verification.passed,
        b.verification.total
    );
    for h in &b.hypotheses {
        println!("{}\t{}", h.id, h.verdict);
    }
    if !b.unmapped.is_empty() {
        println!("unmapped {}", b.unmapped.len());
    }
}

fn run(args: RunArgs) -> Result<ExitCode, PipelineError> {
    let bundle = if args.fixture {
        let bundle = run_inputs(&fixtures::inputs(true), &InputLabels::default())?;
        emit_reports(&bundle, &args.out)?;
        bundle
    } else {
        let config = PipelineConfig {
            dataset: args.dataset.expect("required by clap"),
            defs: args.defs.expect("required by clap"),
            rules: args.rules.expect("required by clap"),
            hypotheses: args.hypotheses.expect("required by clap"),
            cfindex: args.cfindex,
            out: args.out,
            precision: Precision::default(),
        };
        run_pipeline(&config)?
    };
    summarize(&bundle);
    let mismatches = bundle.mismatches();
    if mismatches.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("audit mismatch: {}", mismatches.join(", "));
        Ok(ExitCode::from(bundle.exit_code() as u8))
    }
}

fn verify(path: PathBuf) -> anyhow::Result<ExitCode> {
    let log = AuditLog::load(&path).with_context(|| format!("reading {}", path.display()))?;
    let report = verify_audit_log(&log);
    println!(
        "total {}, passed {}, superseded {}, failed {}",
        report.total,
        report.passed,
        report.superseded,
        report.failed.len()
    );
    for f in &report.failed {
        println!("FAIL\t{}\trecord {}\t{}", f.result_id, f.position, f.reason);
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn explain_cmd(id: &str, path: PathBuf) -> anyhow::Result<ExitCode> {
    let log = AuditLog::load(&path).with_context(|| format!("reading {}", path.display()))?;
    let text = explain(&log, id, &Precision::default())
        .with_context(|| format!("no audit record for `{id}`"))?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }),
        Command::Verify { audit } => verify(audit).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }),
        Command::Explain { id, audit } => explain_cmd(&id, audit).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }),
    }
}
