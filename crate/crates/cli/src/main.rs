use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ternlab_cli::commands::{self, load_instance};
use ternlab_cli::instance_file::IdealFile;
use ternlab_cli::report::Report;
use ternlab_cli::{CliError, Options};

#[derive(Parser)]
#[command(name = "ternlab", version, about = "Finite-dimensional C*-ternary rings and their standard embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all sampled checks.
    #[arg(long, env = "TERNLAB_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Number of random samples per check.
    #[arg(long, default_value_t = 500, global = true)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Residual tolerance for pass/fail decisions.
    #[arg(long, default_value_t = 1e-8, global = true)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the ternary ring axioms.
    Verify { file: PathBuf },
    /// Split into TRO-like and anti-TRO-like parts.
    Decompose { file: PathBuf },
    /// Build the standard embedding and audit its representation.
    Embed { file: PathBuf },
    /// Compute the ternary radical.
    Radical { file: PathBuf },
    /// Quotient by an ideal given in a JSON file (`basis` or `generators`).
    Quotient {
        file: PathBuf,
        #[arg(long)]
        ideal: PathBuf,
    },
    /// Solve for an algebra isomorphism of the standard embedding onto a matrix algebra.
    Wedderburn {
        file: PathBuf,
        /// Size n of the target M_n; defaults to the square root of the embedding dimension.
        #[arg(long)]
        target_dim: Option<usize>,
    },
    /// Run a bundled instance.
    Demo {
        /// One of m2-anti, scalar-tro, scalar-anti, mixed-2, diag-tro-2.
        name: String,
        /// Print the instance file instead of running it.
        #[arg(long)]
        emit_instance: bool,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::Decompose { .. } => "decompose",
        Command::Embed { .. } => "embed",
        Command::Radical { .. } => "radical",
        Command::Quotient { .. } => "quotient",
        Command::Wedderburn { .. } => "wedderburn",
        Command::Demo { .. } => "demo",
    }
}

fn run(cli: &Cli, opts: &Options) -> Result<Report, CliError> {
    match &cli.command {
        Command::Verify { file } => Ok(commands::verify(&load_instance(file)?.1, opts)),
        Command::Decompose { file } => commands::decompose(&load_instance(file)?.1, opts),
        Command::Embed { file } => commands::embed(&load_instance(file)?.1, opts),
        Command::Radical { file } => commands::radical(&load_instance(file)?.1, opts),
        Command::Quotient { file, ideal } => {
            let (_, m) = load_instance(file)?;
            let text = std::fs::read_to_string(ideal).map_err(|e| CliError::Input(format!("{}: {e}", ideal.display())))?;
            commands::quotient_cmd(&m, &IdealFile::parse(&text)?, opts)
        }
        Command::Wedderburn { file, target_dim } => commands::wedderburn(&load_instance(file)?.1, *target_dim, opts),
        Command::Demo { name, .. } => commands::demo(name, opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { seed: cli.seed, samples: cli.samples, tol: cli.tol };
    if let Command::Demo { name, emit_instance: true } = &cli.command {
        return match commands::demo_instance(name) {
            Ok(f) => {
                println!("{}", f.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }
    let (report, code) = match run(&cli, &opts) {
        Ok(r) => {
            let code = if r.passed { 0 } else { 1 };
            (r, code)
        }
        Err(e) => {
            eprintln!("{e}");
            if let CliError::Input(_) = e {
                return ExitCode::from(2);
            }
            let mut r = Report::new(command_name(&cli.command));
            r.passed = false;
            r.set("error", e.to_string());
            (r, e.exit_code())
        }
    };
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    ExitCode::from(code as u8)
}
