use std::process::ExitCode;

fn main() -> ExitCode {
    phicalc::cli::dispatch(std::env::args_os())
}
