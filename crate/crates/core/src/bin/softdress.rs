use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use softdress::cli_io::{parse_config, run, OutputFormat, Overrides, Subcommand};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "softdress",
    version,
    about = "Soft-photon dressing factors for charged qubits"
)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted and the config names no path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// IR cutoff(s), comma separated; replaces [regulators] lambda_list.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Shrink the first dressing speed by this amount.
    #[arg(long)]
    offshell: Option<f64>,
    /// Spin state preset: singlet, triplet, product, custom.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error [{}]: {e}", e.kind());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let overrides = Overrides {
        lambda: cli.lambda,
        offshell: cli.offshell,
        preset: cli.preset,
        workers: cli.workers,
        format: cli.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
    };
    if let Err(e) = overrides.apply(&mut cfg) {
        eprintln!("config error [{}]: {e}", e.kind());
        return ExitCode::from(EXIT_CONFIG);
    }
    let table = match run(cli.subcommand, &cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let bytes = table.render(cfg.output.format);
    let dest = cli.out.or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    let written = match dest {
        Some(path) => std::fs::write(&path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes.as_bytes())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: write failed: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
