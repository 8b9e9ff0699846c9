use clap::Parser;
use uamo_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("{}", e.stderr_json());
        std::process::exit(e.code);
    }
}
