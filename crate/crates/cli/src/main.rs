use std::process::ExitCode;

use clap::Parser;
use ehmoduli_cli::{run, write_outputs, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let dir = RunConfig::resolve(cli.command.flags()).map(|c| c.out_dir()).unwrap_or_else(|_| ".".into());
    match write_outputs(&outcome, &dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    for c in &outcome.report.checks {
        println!(
            "{} {}: measured {:.6e}, expected {}, tolerance {:.0e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected,
            c.tolerance
        );
    }
    for (name, v) in &outcome.report.values {
        println!("value {name}: {v}");
    }
    if outcome.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
