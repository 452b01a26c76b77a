use std::process::ExitCode;

fn main() -> ExitCode {
    aoa_nlos_harness::cli::run(std::env::args_os())
}
