use std::io;

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let status = missing_mass::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(status);
}
