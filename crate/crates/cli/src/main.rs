use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let tol = std::env::var(coopgame_cli::TOLERANCE_ENV).ok();
    let out = coopgame_cli::run(std::env::args_os(), tol.as_deref());
    // A closed pipe is not worth a panic.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
