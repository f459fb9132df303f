use std::io::Write;

fn main() {
    if let Err(msg) = bohr_cli::configure_threads(std::env::var(bohr_cli::THREADS_ENV).ok()) {
        eprintln!("error: {msg}");
        std::process::exit(bohr_cli::EXIT_USAGE);
    }
    let out = bohr_cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        std::process::exit(bohr_cli::EXIT_USAGE);
    }
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
