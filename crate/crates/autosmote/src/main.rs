//! Command-line entry point: run experiments, compare their reports, and
//! generate the toy dataset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use autosmote::engine::{
    compare, load_config, make_toy, run, write_toy_csv, RunReport, ToyConfig,
};
use autosmote::Result;

#[derive(Parser)]
#[command(
    name = "autosmote",
    version,
    about = "Automated over-sampling for imbalanced binary classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML or JSON config file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
    },
    /// Rank methods across finished run reports (lower rank is better).
    Compare {
        /// Two or more report JSON files covering the same cells.
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
    },
    /// Generate the two-cluster toy dataset as a CSV file.
    MakeToy {
        /// Where to write the CSV.
        #[arg(long)]
        out: PathBuf,
        /// Majority rows in the central blob.
        #[arg(long)]
        majority: Option<usize>,
        /// Imbalance ratio; the minority count is round(majority / ir).
        #[arg(long)]
        ir: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config } => {
            let config = load_config(&config)?;
            let outcome = run(&config)?;
            let report = &outcome.report;
            println!(
                "{} on {} ({} rows, IR {:.2}), classifier {}, metric {}",
                report.method,
                report.dataset,
                report.dataset_summary.rows,
                report.dataset_summary.imbalance_ratio,
                report.classifier.kind_name(),
                report.metric.name()
            );
            for seed in &report.seeds {
                println!(
                    "  seed {:>3}: validation {:.4}  test {:.4}  ({:.1}s)",
                    seed.seed,
                    seed.validation_score,
                    seed.test_score,
                    seed.wall_clock_seconds
                );
            }
            println!(
                "  mean validation {:.4}  mean test {:.4}  median test {:.4}",
                report.summary.mean_validation,
                report.summary.mean_test,
                report.summary.median_test
            );
            println!("report written to {}", outcome.report_path.display());
            for artifact in &outcome.artifacts {
                println!("artifact {}", artifact.display());
            }
            Ok(())
        }
        Command::Compare { reports } => {
            let loaded = reports
                .iter()
                .map(RunReport::load)
                .collect::<Result<Vec<_>>>()?;
            let table = compare(&loaded)?;
            print!("{}", table.to_text());
            Ok(())
        }
        Command::MakeToy {
            out,
            majority,
            ir,
            seed,
        } => {
            let mut config = ToyConfig::default();
            if let Some(majority) = majority {
                config.majority = majority;
            }
            if let Some(ir) = ir {
                config.ir = ir;
            }
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let ds = make_toy(&config)?;
            write_toy_csv(&ds, &out)?;
            println!(
                "wrote {} rows ({} majority, {} minority) to {}",
                ds.n_rows(),
                ds.n_majority(),
                ds.n_minority(),
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
