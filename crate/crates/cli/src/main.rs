use std::io::{stderr, stdout};

fn main() {
    let code = crystalflex_cli::run_command(std::env::args(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}
