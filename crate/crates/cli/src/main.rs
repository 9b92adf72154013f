use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use pellian_cli::error::CliError;
use pellian_cli::{execute, Cli, Settings};

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::resolve(&cli) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let out = match execute(&cli, &settings) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let mut stdout = std::io::stdout().lock();
    let written = match settings.out {
        Some(p) if p.as_os_str() == "-" => stdout.write_all(out.artifact.as_bytes()),
        Some(p) => std::fs::write(&p, &out.artifact).and_then(|_| stdout.write_all(out.summary.as_bytes())),
        None => stdout.write_all(out.summary.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(CliError::Io(e)),
    }
}
