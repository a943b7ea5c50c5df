use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match lowlight::cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    ExitCode::from(lowlight::cli::run(&config) as u8)
}
