use std::process::ExitCode;

use bellcause_cli::args::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match bellcause_cli::run(&cli) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            println!("wrote {} files to {}", report.manifest.files.len() + 1, report.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bellcause: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
