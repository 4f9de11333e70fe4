use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod args;
mod commands;

use args::Common;

#[derive(Parser)]
#[command(name = "cuspcert", version)]
#[command(about = "Certify anisotropic maximal tori with characters in general position")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the witness torus and character for each (family, rank, q).
    /// Exits 0 when every case passes, 1 otherwise.
    Certify(Common),
    /// Twisted conjugacy classes of the Weyl group with anisotropy and |T(k)|.
    Classify(Common),
    /// Enumerate characters in general position for the witness torus.
    Search(SearchArgs),
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,

    /// Orbit representatives to list per case
    #[arg(long, default_value_t = 20)]
    limit: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Certify(c) => commands::certify(c),
        Command::Classify(c) => commands::classify(c),
        Command::Search(s) => commands::search(&s.common, s.limit),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
