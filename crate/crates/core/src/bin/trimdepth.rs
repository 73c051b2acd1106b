use std::process::ExitCode;

use trimdepth::cli;

fn main() -> ExitCode {
    let result =
        cli::configure_threads().and_then(|()| cli::run(std::env::args().skip(1).collect()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
