use std::io::Write;

fn main() {
    let result = braidlab::cli::run(std::env::args_os());
    if let Some(payload) = &result.payload {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{payload}");
        let _ = out.flush();
    }
    if !result.diagnostics.is_empty() {
        eprint!("{}", result.diagnostics);
    }
    std::process::exit(result.exit_code);
}
