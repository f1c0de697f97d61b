use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qwalk::cli::main_with_args(std::env::args_os()))
}
