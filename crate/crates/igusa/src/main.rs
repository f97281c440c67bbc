use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use igusa::cli::{run, Cli};
use igusa::json::to_json;

fn emit(path: Option<&std::path::Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (text, code) = match run(&cli) {
        Ok(report) => (report.document, report.exit_code),
        Err(e) => (to_json(&e.to_json()), e.exit_code()),
    };
    if let Err(e) = emit(cli.common.output.as_deref(), &text) {
        eprintln!("igusa: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
