use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use cluster_cli::commands::{self, Format, Output};
use cluster_cli::error::CliError;
use cluster_cli::input::{load_seed, parse_directions};
use cluster_cli::server;
use cluster_core::cartan::CartanMatrix;
use cluster_core::explorer::EnumLimits;

/// Cluster algebras of geometric type: mutation, exchange graphs, finite
/// type, denominator vectors, double Bruhat cells.
///
/// SEED arguments are a path to seed JSON, `-` for stdin, or `@PRESET`
/// (`@A3`, `@G2`, `@rank2:1,4`, `@sl3`).
#[derive(Debug, Parser)]
#[command(name = "cluster", version)]
struct Cli {
    /// Enumeration cap on the number of seeds (also bounds classification).
    #[arg(long, global = true, default_value_t = 100_000)]
    cap_vertices: usize,
    /// Enumeration cap on BFS depth.
    #[arg(long, global = true, default_value_t = 64)]
    cap_depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Random seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mutate a seed along 1-based directions, e.g. `1,2,1`.
    Mutate {
        seed_file: String,
        #[arg(default_value = "")]
        directions: String,
    },
    /// Enumerate the exchange graph.
    Graph { seed_file: String },
    /// Decide finite type of the principal part.
    Classify { seed_file: String },
    /// Extended exchange matrix, minors and exchange checks of a double reduced word.
    Dbc {
        /// Rank of the Cartan matrix.
        r: usize,
        /// Comma-separated signed entries, e.g. `1,2,1,2,1,-1,-2,-1`.
        #[arg(allow_hyphen_values = true)]
        word: String,
        /// Cartan-Killing family letter.
        #[arg(long, default_value = "A")]
        family: String,
        /// Random determinant-1 points per exchange.
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
    /// Denominator vectors; for a Cartan type such as `A3` also the root bijection report.
    Denoms {
        target: String,
        /// Degree bound for cluster monomials in the distinctness check.
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Run the acceptance suite.
    Verify,
    /// Serve the session API for the explorer UI.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Persist sessions as JSON snapshots here.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

fn limits(cli: &Cli) -> Result<EnumLimits, CliError> {
    EnumLimits::new(cli.cap_vertices, cli.cap_depth).map_err(CliError::from)
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Mutate { seed_file, directions } => {
            let seed = load_seed(seed_file)?;
            commands::mutate(&seed, &parse_directions(directions)?, cli.format)
        }
        Command::Graph { seed_file } => commands::graph(&load_seed(seed_file)?, limits(cli)?, cli.format),
        Command::Classify { seed_file } => {
            let limits = limits(cli)?;
            commands::classify_seed(&load_seed(seed_file)?, limits.max_vertices, cli.format)
        }
        Command::Dbc {
            r,
            word,
            family,
            points,
        } => commands::dbc(*r, word, family, *points, cli.seed, cli.format),
        Command::Denoms { target, degree } => {
            let limits = limits(cli)?;
            let is_path = target.starts_with('@') || target == "-" || std::path::Path::new(target).exists();
            if is_path {
                commands::denoms_of_seed(&load_seed(target)?, limits, cli.format)
            } else {
                let a = CartanMatrix::from_str(target)
                    .map_err(|_| CliError::Input(format!("`{target}` is neither a seed source nor a Cartan type")))?;
                commands::denoms_of_type(&a, limits, *degree, cli.format)
            }
        }
        Command::Verify => commands::verify(cli.format),
        Command::Serve { .. } => unreachable!("handled in main"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve { port, state_dir } = &cli.command {
        let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
        return match runtime.block_on(server::serve(*port, state_dir.clone())) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let result = run(&cli).and_then(|out| {
        match &cli.output {
            Some(path) => std::fs::write(path, &out.body).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?,
            None => print!("{}", out.body),
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
