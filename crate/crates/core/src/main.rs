use std::io::Write;

fn main() {
    let outcome = treepat::cli::run(std::env::args_os());
    print!("{}", outcome.stdout);
    if !outcome.stderr.is_empty() {
        let _ = write!(std::io::stderr(), "{}", outcome.stderr);
    }
    std::process::exit(outcome.code);
}
