use std::process::ExitCode;

use clap::Parser;
use phasegroup_cli::{run, Artifacts, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut art = Artifacts::new(&cli.out);
    let result = run(&cli, &mut art);
    for line in &art.notes {
        println!("{line}");
    }
    for f in &art.files {
        println!("wrote {}", f.display());
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
