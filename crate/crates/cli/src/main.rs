use std::process::ExitCode;

use clap::Parser;
use dtou::{run, CliConfig};

fn main() -> ExitCode {
    let config = CliConfig::parse();
    run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()).into()
}
