use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gmchoice::cli::run(std::env::args()) as u8)
}
