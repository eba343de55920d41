use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use purity_cli::args::{Cli, Command};
use purity_cli::{commands, CliError};

fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let prec = cli.precision_bits;
    match &cli.command {
        Command::Moments(a) => commands::moments(a),
        Command::Verify(a) => {
            let (out, passed) = commands::verify(a, prec)?;
            if passed {
                Ok(out)
            } else {
                print!("{out}");
                Err(CliError::Verification("see the failing checks above".into()))
            }
        }
        Command::Mc(a) => commands::mc(a),
        Command::Figure1(a) => commands::figure1(a),
        Command::Kernels(a) => commands::kernels(a, prec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
