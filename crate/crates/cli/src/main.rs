use std::process::ExitCode;

fn main() -> ExitCode {
    renyicap_cli::main_with(std::env::args_os())
}
