use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = cgm_core::cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code as u8)
}
