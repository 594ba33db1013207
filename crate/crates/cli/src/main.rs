//! `gradnorm <command> <config> [--set k=v] [--format csv|jsonl] [--out DIR]`
//!
//! Exit codes: 0 ok, 2 config error, 3 audit failure with a witness, 4 internal error.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::RunError;
use config::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gradnorm",
    version,
    about = "Exact experiments with graded norms"
)]
struct Args {
    /// spectrum, vol, asymptotics, theorem-b, theorem-c, okounkov, chebyshev, equidistribution or fujita
    command: String,
    /// JSON experiment config
    config: PathBuf,
    /// Override a config field, e.g. `--set seed=7` or `--set a.n=2`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the table and a manifest here instead of printing the table
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// The generator for audit number `stream` of a run: one seed, independent streams.
pub(crate) fn audit_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const EXIT_CONFIG: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("gradnorm: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(&args)) {
        Ok(code) => code,
        Err(_) => fail(EXIT_INTERNAL, "internal error (panic)"),
    }
}

fn run(args: &Args) -> ExitCode {
    let start = Instant::now();
    let cmd = match Command::parse(&args.command) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, &e.0),
    };
    let loaded = match config::load(&args.config, &args.set) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_CONFIG, &e.0),
    };
    if let Some(c) = loaded.config.command {
        if c != cmd {
            return fail(
                EXIT_CONFIG,
                &format!(
                    "config: field `command` is `{}` but `{}` was requested",
                    c.name(),
                    cmd.name()
                ),
            );
        }
    }
    let loaded_at = start.elapsed();
    let outcome = match commands::run(cmd, &loaded) {
        Ok(o) => o,
        Err(RunError::Config(m)) => return fail(EXIT_CONFIG, &m),
        Err(RunError::Internal(m)) => return fail(EXIT_INTERNAL, &m),
    };
    let ran_at = start.elapsed();
    let body = match args.format {
        Format::Csv => outcome.table.to_csv(),
        Format::Jsonl => outcome.table.to_jsonl(),
    };
    match &args.out {
        None => print!("{body}"),
        Some(dir) => {
            let table_name = format!("{}.{}", cmd.name(), args.format.extension());
            let canonical = serde_json::to_string(&loaded.doc).expect("config serializes");
            let manifest = json!({
                "command": cmd.name(),
                "config": loaded.doc,
                "config_sha256": format!("{:x}", Sha256::digest(canonical.as_bytes())),
                "seed": loaded.config.seed,
                "format": args.format.extension(),
                "versions": {
                    "gradnorm": gradnorm::VERSION,
                    "gradnorm-cli": env!("CARGO_PKG_VERSION"),
                },
                "runtime_ms": {
                    "load": loaded_at.as_secs_f64() * 1e3,
                    "run": (ran_at - loaded_at).as_secs_f64() * 1e3,
                    "total": start.elapsed().as_secs_f64() * 1e3,
                },
                "outputs": [table_name],
                "summary": outcome.summary,
                "status": if outcome.violation.is_some() { "violation" } else { "ok" },
                "witness": outcome.violation,
            });
            let written = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(&table_name), &body))
                .and_then(|_| {
                    std::fs::write(
                        dir.join("manifest.json"),
                        serde_json::to_string_pretty(&manifest).expect("manifest serializes")
                            + "\n",
                    )
                });
            if let Err(e) = written {
                return fail(
                    EXIT_INTERNAL,
                    &format!("cannot write to {}: {e}", dir.display()),
                );
            }
        }
    }
    match outcome.violation {
        Some(w) => fail(EXIT_VIOLATION, &format!("audit failed: {w}")),
        None => ExitCode::SUCCESS,
    }
}
