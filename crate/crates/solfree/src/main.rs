use std::process::ExitCode;

fn main() -> ExitCode {
    solfree::cli::main_with(std::env::args_os())
}
