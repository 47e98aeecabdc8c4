use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qebert_cli::{run, Cli, ExitKind};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(ExitKind::Usage as u8),
            };
        }
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli, &mut out)));
    let _ = out.flush();
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.kind as u8)
        }
        Err(_) => ExitCode::from(ExitKind::Internal as u8),
    }
}
