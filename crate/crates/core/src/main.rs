use clap::Parser;

use fema_fs::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Err(e) = run(cli) {
        eprintln!("femafs: {e}");
        std::process::exit(e.exit_code());
    }
}
