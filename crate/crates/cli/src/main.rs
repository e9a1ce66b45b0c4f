mod config;
mod stages;

use std::process::ExitCode;

use clap::Parser;

use config::{Command, Flags, RunConfig};

#[derive(Parser)]
#[command(name = "valence-forge", version, about = "Build, verify and analyze finite-depth Cantor-type constructions")]
struct Cli {
    /// Stage to run; may instead come from the config file
    #[arg(value_enum)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli.command, &cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }
    match stages::run(&cfg) {
        Ok(reports) => {
            let failed = reports.iter().filter(|r| r.failed()).count();
            let passed = reports.iter().filter(|r| r.pass).count();
            println!("{passed} passed, {failed} failed, {} total", reports.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
