use clap::Parser;
use gridtopo::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
