use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mbi_core::cli::run(std::env::args_os()))
}
