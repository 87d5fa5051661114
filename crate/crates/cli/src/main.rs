mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use output::{envelope, Failure};

/// `VORTEX_THREADS` wins over `--threads`; 0 leaves the choice to rayon.
fn thread_count(flag: usize) -> Result<usize, Failure> {
    match std::env::var("VORTEX_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::validation(format!("VORTEX_THREADS must be a non-negative integer, got {v:?}"), serde_json::json!({}))
        }),
        Err(_) => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let f = Failure::validation(e.kind().to_string(), serde_json::json!({ "usage": e.render().to_string() }));
            let doc = serde_json::json!({ "version": output::VERSION, "error": f });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            eprint!("{e}");
            return ExitCode::from(f.exit);
        }
    };
    let start = Instant::now();
    let name = match &cli.command {
        Command::Area(_) => "area",
        Command::Solve(_) => "solve",
        Command::Optimize(_) => "optimize",
        Command::Threshold(_) => "threshold",
        Command::Sequence(_) => "sequence",
        Command::Symmetrize(_) => "symmetrize",
        Command::ValueCurve(_) => "value-curve",
    };
    let outcome = thread_count(cli.threads).and_then(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(e.to_string(), serde_json::json!({ "threads": n })))?;
        match &cli.command {
            Command::Area(a) => commands::area(a),
            Command::Solve(a) => commands::solve(a),
            Command::Optimize(a) => commands::optimize(a),
            Command::Threshold(a) => commands::threshold(a),
            Command::Sequence(a) => commands::sequence(a),
            Command::Symmetrize(a) => commands::symmetrize(a),
            Command::ValueCurve(a) => commands::curve(a),
        }
    });
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let doc = envelope(name, &cli, ms, &outcome);
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    match outcome {
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit)
        }
    }
}
