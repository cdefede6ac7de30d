mod args;
mod error;
mod report;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};
use error::CliError;
use run::{run, RunConfig};

fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(t) = cfg.output.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::invalid(format!("cannot start {t} worker threads: {e}")))?;
    }
    let report = run(cfg)?;
    let (sink, label): (Box<dyn Write>, String) = match &cfg.output.out {
        Some(path) => (Box::new(File::create(path).map_err(|e| CliError::io(path, e))?), path.display().to_string()),
        None => (Box::new(io::stdout().lock()), "standard output".into()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.output.format {
        Format::Json => report.write_json(&mut sink),
        Format::Csv => report.write_csv(&mut sink, cfg.output.precision),
    }
    .and_then(|_| sink.flush())
    .map_err(|e| CliError::Io(format!("{label}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                // Includes a bare invocation, which prints help but is still a usage error.
                _ => ExitCode::from(3),
            };
        }
    };
    let cfg = RunConfig::from_command(cli.command);
    match execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
