use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pimt_cli::{bench, run, Cli, Command};
use pimt_core::engine::Completion;
use pimt_core::oracle::Backend;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Run(args) => args
            .options()
            .and_then(|opts| run::run(&opts, &mut out))
            .map(|report| match report.completion {
                Completion::Complete => 0,
                Completion::Budget | Completion::Unknown => 1,
            }),
        Command::Bench(args) => {
            let backend = args.backend.as_deref().map(|b| Backend::parse(b, None));
            bench::bench(&args.manifest, backend.as_ref(), &mut out).map(|_| 0)
        }
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
