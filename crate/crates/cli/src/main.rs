use std::process::ExitCode;

use clap::Parser;
use tsallis_cli::{execute, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(record) => {
            let c = &record.summary.counts;
            eprintln!(
                "{}: {} verified, {} violated, {} inconclusive",
                record.command, c.verified, c.violated, c.inconclusive
            );
            ExitCode::from(record.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
