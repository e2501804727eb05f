use std::process::ExitCode;

fn main() -> ExitCode {
    tilegemm::cli::run()
}
