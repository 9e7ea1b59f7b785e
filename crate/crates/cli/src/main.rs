use clap::Parser;
use gevrey_nets_cli::{run_cli, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run_cli(&cli);
    if let Some(msg) = &outcome.message {
        eprintln!("{msg}");
    }
    std::process::exit(outcome.code);
}
