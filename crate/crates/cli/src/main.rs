use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sparse_ctrb_cli::commands::Cli;
use sparse_ctrb_cli::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(report) = &outcome.report {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{report}");
    }
    eprintln!("{}", outcome.summary);
    outcome.status.into()
}
