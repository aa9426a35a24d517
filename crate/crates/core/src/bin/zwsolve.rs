use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = zwsolve::cli::run(std::env::args_os(), &mut out, &mut io::stderr());
    let code = match out.flush() {
        Ok(()) => code,
        Err(_) => zwsolve::cli::EXIT_IO,
    };
    std::process::exit(code);
}
