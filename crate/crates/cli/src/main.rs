mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{build_job, merge, parse_config_text, Cli, SEED_ENV};

fn fail(code: u8, errors: &[String]) -> ExitCode {
    for e in errors {
        eprintln!("error: {e}");
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match parse_config_text(&text, cli.command) {
                Ok(map) => map,
                Err(errors) => return fail(2, &errors),
            },
            Err(e) => return fail(2, &[format!("--config {}: {e}", path.display())]),
        },
        None => Default::default(),
    };
    let (values, notes) = merge(file, &cli);
    for n in &notes {
        eprintln!("{n}");
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let (job, notes) = match build_job(cli.command, &values, env_seed.as_deref()) {
        Ok(v) => v,
        Err(errors) => return fail(2, &errors),
    };
    for n in &notes {
        eprintln!("{n}");
    }
    match commands::run(&job) {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(_) => fail(3, &["verify: at least one check failed".into()]),
        Err(e) => fail(e.exit_code() as u8, &[e.message().to_string()]),
    }
}
