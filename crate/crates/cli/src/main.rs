use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use regulator_cli::{exit_code, run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; help and version are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = RunConfig::from(cli);
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &config.output {
        Some(path) => report.write_json(path),
        None => report.to_json().map(|s| {
            let _ = std::io::stdout().write_all(s.as_bytes());
        }),
    }
    .and_then(|_| match &config.csv {
        Some(path) => report.write_csv(path),
        None => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(t) = report.wall_time_seconds {
        eprintln!("wall time {t:.3} s");
    }
    ExitCode::from(exit_code(&report) as u8)
}
