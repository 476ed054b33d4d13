use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = repeaterlab::cli::main_with(std::env::args_os().skip(1));
    if out.written_to.is_none() {
        let mut stdout = std::io::stdout().lock();
        // a closed pipe is not worth a panic
        let _ = stdout.write_all(out.report.as_bytes());
    }
    ExitCode::from(out.exit_code.clamp(0, 255) as u8)
}
