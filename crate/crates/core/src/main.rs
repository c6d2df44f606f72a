use std::process::ExitCode;

use mcflow_core::config::{parse_args, ArgError};
use mcflow_core::runner::{exit_code, run_scenario};

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(ArgError::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
        Err(ArgError::Config(e)) => {
            eprintln!("mcflow: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    match run_scenario(&cfg) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mcflow: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
