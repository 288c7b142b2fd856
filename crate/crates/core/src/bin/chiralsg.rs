use clap::Parser;

use chiralsg::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
