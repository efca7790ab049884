use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fwl::harness::{self, Config, Record, RunOptions};
use fwl::Error;

#[derive(Parser)]
#[command(
    name = "fwl",
    version,
    about = "First-variation laboratory for weighted epigraph measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Source {
    /// Scenario file (JSON with a `scenarios` array).
    #[arg(long, conflicts_with = "suite")]
    config: Option<PathBuf>,
    /// Built-in suite.
    #[arg(long, value_parser = ["standard"])]
    suite: Option<String>,
}

#[derive(clap::Args)]
struct Common {
    /// Grid intervals per axis for grid-track scenarios (repeatable).
    #[arg(long)]
    grid: Vec<usize>,
    /// Number of finite-difference halvings.
    #[arg(long)]
    steps: Option<usize>,
    /// Tolerance value (absolute on the exact track, relative on the grid track).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file, or a directory to write `results.{csv,json}` into.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and report both sides of each identity.
    Run {
        #[command(flatten)]
        source: Source,
        /// Only run these scenarios (repeatable).
        #[arg(long)]
        scenario: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Error against grid resolution for one scenario.
    Convergence {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// List scenario names and what they verify.
    List {
        #[command(flatten)]
        source: Source,
    },
}

fn load(source: &Source) -> fwl::Result<Config> {
    match &source.config {
        Some(p) => Config::load(p),
        None => Ok(Config::standard()),
    }
}

fn options(c: &Common) -> RunOptions {
    RunOptions {
        grid: c.grid.clone(),
        steps: c.steps,
        tol: c.tol,
        seed: c.seed,
    }
}

fn emit(text: &str, out: Option<&Path>, stem: &str, format: Format) -> fwl::Result<()> {
    let Some(out) = out else {
        print!("{text}");
        return Ok(());
    };
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = if out.extension().is_some() {
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        out.to_path_buf()
    } else {
        std::fs::create_dir_all(out)?;
        out.join(format!("{stem}.{ext}"))
    };
    std::fs::write(&path, text)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn summarize(records: &[Record]) {
    for r in records {
        match &r.result {
            Ok(rep) => eprintln!(
                "{} {:<40} lhs={:<22} rhs={:<22} err={:.3e}",
                if rep.pass { "PASS" } else { "FAIL" },
                rep.scenario,
                rep.lhs,
                rep.rhs_total,
                rep.abs_err
            ),
            Err(e) => eprintln!("FAIL {:<40} error: {e}", r.scenario),
        }
    }
}

fn config_failure(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    fwl::configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::List { source } => {
            let c = match load(&source) {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            for s in &c.scenarios {
                println!("{}\t{}", s.name, s.verifies);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            source,
            scenario,
            common,
        } => {
            let c = match load(&source) {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            let selected = match c.select(&scenario) {
                Ok(s) => s,
                Err(e) => return config_failure(&e),
            };
            let records = harness::run_scenarios(&selected, &options(&common));
            summarize(&records);
            let text = match common.format {
                Format::Csv => harness::reports_csv(&records),
                Format::Json => harness::reports_json(&records),
            };
            if let Err(e) = text.and_then(|t| emit(&t, common.out.as_deref(), "results", common.format)) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if records.iter().any(|r| r.config_error) {
                ExitCode::from(2)
            } else if records.iter().all(Record::passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Convergence {
            source,
            scenario,
            common,
        } => {
            let c = match load(&source) {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            let s = match c.select(std::slice::from_ref(&scenario)) {
                Ok(s) => s[0],
                Err(e) => return config_failure(&e),
            };
            let o = options(&common);
            let table = match harness::convergence(s, &common.grid, &o) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let order = table.order.map_or_else(|| "n/a".into(), |p| format!("{p:.3}"));
            eprintln!("{}: fitted order {order}, monotone {}", table.scenario, table.monotone);
            let text = match common.format {
                Format::Csv => harness::convergence_csv(&table),
                Format::Json => harness::convergence_json(&table),
            };
            if let Err(e) = text.and_then(|t| emit(&t, common.out.as_deref(), "convergence", common.format)) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if table.rows.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
