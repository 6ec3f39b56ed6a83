use std::process::ExitCode;

use thermo_core::cli::{self, ParseFailure};

fn main() -> ExitCode {
    let config = match cli::parse(std::env::args()) {
        Ok(config) => config,
        Err(ParseFailure::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match cli::run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
