use std::process::ExitCode;

use clap::Parser;
use multisubset_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("MST_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // the global pool can only be configured once; ignore a repeat
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
