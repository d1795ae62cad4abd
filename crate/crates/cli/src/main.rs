use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod run;

/// Simulate, optimise and regulate a GenAI/forum user ecosystem.
#[derive(Debug, Parser)]
#[command(name = "ecosim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-round trajectory CSV for one training scheme.
    Simulate(CommonArgs),
    /// Revenue- or welfare-maximising scheme report.
    Optimize(CommonArgs),
    /// Long-run revenue table for cyclic (and alternating) schemes.
    Cyclic(CommonArgs),
    /// Regulator bounds and verdict for a training window.
    Regulate(CommonArgs),
    /// Price of anarchy of the instance.
    Poa(CommonArgs),
    /// Cumulative welfare of no training, the revenue optimum and the welfare
    /// optimum against the forum-only baseline.
    Figure1(CommonArgs),
    /// Share per round for several starting shares.
    Figure2(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scheme spec: bit string, cyclic:k, alternating:a1:a2, optimal:brute,
    /// optimal:arms:eps, welfare-opt or none:x0.
    #[arg(long)]
    scheme: Option<String>,
    /// Grid step (optimize) or estimate radius (regulate).
    #[arg(long)]
    eps: Option<f64>,
    /// Window length for the regulator.
    #[arg(long)]
    delta: Option<usize>,
    /// Estimated share at the training round.
    #[arg(long = "p-hat")]
    p_hat: Option<f64>,
    /// Largest cycle length in the cyclic table.
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    /// Largest horizon solved by exhaustive enumeration.
    #[arg(long = "brute-cap")]
    brute_cap: Option<usize>,
    /// Starting shares for figure2, comma separated.
    #[arg(long = "p1", value_delimiter = ',')]
    p1_values: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = run::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let (kind, args) = match cli.command {
        Command::Simulate(a) => (run::Kind::Simulate, a),
        Command::Optimize(a) => (run::Kind::Optimize, a),
        Command::Cyclic(a) => (run::Kind::Cyclic, a),
        Command::Regulate(a) => (run::Kind::Regulate, a),
        Command::Poa(a) => (run::Kind::Poa, a),
        Command::Figure1(a) => (run::Kind::Figure1, a),
        Command::Figure2(a) => (run::Kind::Figure2, a),
    };
    let overrides = run::Overrides {
        out: args.out,
        scheme: args.scheme,
        eps: args.eps,
        delta: args.delta,
        p_hat: args.p_hat,
        k_max: args.k_max,
        brute_cap: args.brute_cap,
        p1_values: args.p1_values,
    };
    match run::execute(kind, &args.config, overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
