use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mediancr::cli::run(std::env::args_os()))
}
