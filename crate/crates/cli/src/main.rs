//! `bbgkz`: verification harness for the rank-2 better-behaved GKZ systems.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
//! 3 numerical degeneracy.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use bbgkz_core::config::RunConfig;
use bbgkz_core::error::Error;
use bbgkz_core::verifier::{self, Report};

#[derive(Parser)]
#[command(name = "bbgkz", version, about = "rank-2 better-behaved GKZ verification harness")]
struct Cli {
    /// Path to the JSON configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Roots of f with residuals and separations
    Roots,
    /// All contour solution tables with branch records
    Solve,
    /// Pairing matrix, rank and constancy checks
    Pair,
    /// Euler pairing of the stack cohomology: M, G, χ, χ⁻¹ and relation checks
    Chi,
    /// Gamma-series duality ⟨Γ,Γ°⟩ = -(n/4π²) χ⁻¹
    Gamma {
        /// Also emit the Gamma solution tables
        #[arg(long)]
        emit_tables: bool,
    },
    /// Root tracking and pairing invariance along loops
    Monodromy,
    /// The whole suite
    VerifyAll,
}

enum Output {
    Report(Report),
    Payload(serde_json::Value),
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) => 2,
        Error::Degenerate(_) | Error::Quadrature(_) | Error::Tracking(_) | Error::Truncation(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<(Output, bool, Option<PathBuf>), Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <file> is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let cfg = RunConfig::from_json(&text)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let cfg_out = cfg.out.clone().map(PathBuf::from);
    let (output, pass) = match &cli.command {
        Command::Roots => (Output::Payload(verifier::run_roots(&cfg, seed)?), true),
        Command::Solve => (Output::Payload(verifier::run_solve(&cfg, seed)?), true),
        Command::Chi => (Output::Payload(verifier::run_chi(&cfg, seed)?), true),
        Command::Pair => {
            let r = verifier::run_pair(&cfg, seed)?;
            let ok = r.all_pass();
            (Output::Report(r), ok)
        }
        Command::Gamma { emit_tables } => {
            let r = verifier::run_gamma(&cfg, seed)?;
            let ok = r.all_pass();
            if *emit_tables {
                let mut v = serde_json::to_value(&r).map_err(Error::Json)?;
                v["tables"] = verifier::gamma_tables_payload(&cfg, seed)?;
                (Output::Payload(v), ok)
            } else {
                (Output::Report(r), ok)
            }
        }
        Command::Monodromy => {
            let r = verifier::run_monodromy(&cfg, seed)?;
            let ok = r.all_pass();
            (Output::Report(r), ok)
        }
        Command::VerifyAll => {
            let r = verifier::verify_all(&cfg, seed)?;
            let ok = r.all_pass();
            (Output::Report(r), ok)
        }
    };
    Ok((output, pass, cfg_out))
}

fn render(output: &Output, format: Format) -> String {
    match (output, format) {
        (Output::Report(r), Format::Text) => r.to_text(),
        (Output::Report(r), Format::Json) => r.to_json_string(),
        (Output::Payload(v), _) => serde_json::to_string_pretty(v).expect("payload serializes"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, pass, cfg_out)) => {
            let text = render(&output, cli.format);
            let target = cli.out.clone().or(cfg_out);
            if let Some(out) = &target {
                if let Err(e) = std::fs::write(out, text.as_bytes()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            } else {
                println!("{text}");
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
