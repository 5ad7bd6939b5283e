use std::io::Write;

use clap::Parser;
use explicate::cli::{error_json, run, Cli, Command, Format};
use tracing_subscriber::EnvFilter;

fn main() {
    let cli = Cli::parse();
    let default_level = if matches!(cli.command, Command::Serve(_)) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .with_writer(std::io::stderr)
        .init();
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = run(&cli, |k| std::env::var(k).ok(), &mut stdout) {
        if cli.format == Format::Json {
            // the reader may be gone already; nothing useful to do about it
            let _ = writeln!(stdout, "{}", error_json(&e));
        } else {
            eprintln!("error: {e}");
        }
        std::process::exit(e.exit_code());
    }
}
