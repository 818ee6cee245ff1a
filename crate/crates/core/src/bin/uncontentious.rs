use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uncontentious::cli::{self, OnlineOverrides, Report};
use uncontentious::descriptor::{ModeSpec, OrderSpec};
use uncontentious::rational::{self, Rational};

#[derive(Parser)]
#[command(version, about = "Exact contention resolution on small matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the summary lines.
    #[arg(long, global = true)]
    json: bool,
    /// Write per-element ratios as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact alpha*, witness set and optimal contention resolution map.
    Alpha {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long)]
        dist: PathBuf,
    },
    /// Built-in examples and closure-property checks.
    Examples {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Improving-elements distribution and its guarantees.
    Improving {
        #[arg(long)]
        matroid: PathBuf,
        /// Comma-separated weights, e.g. `5,3,1/2`.
        #[arg(long, value_parser = parse_weights)]
        weights: Weights,
        #[arg(long, value_parser = rational::parse)]
        p: Rational,
    },
    /// Online scenario: weight mixtures, fixed-order bounds, single weights, blueprint.
    Online {
        scenario: PathBuf,
        #[arg(long)]
        mode: Option<ModeSpec>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// `random` or `fixed:[0,1,2]`.
        #[arg(long)]
        order: Option<OrderSpec>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone)]
struct Weights(Vec<Rational>);

fn parse_weights(text: &str) -> Result<Weights, String> {
    text.split(',')
        .map(|t| rational::parse(t).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(Weights)
}

fn emit(report: &Report, output: &Output) -> std::io::Result<()> {
    let mut stdout = std::io::stdout().lock();
    let printed = if output.json {
        writeln!(stdout, "{}", report.to_json())
    } else {
        report.lines.iter().try_for_each(|line| writeln!(stdout, "{line}"))
    };
    // a closed pipe (e.g. `| head`) is not an error
    match printed {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e),
        _ => {}
    }
    if let Some(path) = &output.out {
        std::fs::write(path, report.to_json())?;
    }
    if let Some(path) = &output.csv {
        if let Some(csv) = report.ratios_csv() {
            std::fs::write(path, csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let report = match &args.command {
        Command::Alpha { matroid, dist } => cli::cmd_alpha(matroid, dist),
        Command::Examples { jobs } => cli::cmd_examples(*jobs),
        Command::Improving { matroid, weights, p } => cli::cmd_improving(matroid, &weights.0, p),
        Command::Online {
            scenario,
            mode,
            trials,
            seed,
            order,
            jobs,
        } => cli::cmd_online(
            scenario,
            &OnlineOverrides {
                mode: *mode,
                trials: *trials,
                seed: *seed,
                order: order.clone(),
                jobs: *jobs,
            },
        ),
    };
    if let Err(e) = emit(&report, &args.output) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.status.exit_code() as u8)
}
