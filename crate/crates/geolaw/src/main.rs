use std::process::ExitCode;

fn main() -> ExitCode {
    geolaw::cli::run(std::env::args_os())
}
