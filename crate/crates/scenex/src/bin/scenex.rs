use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scenex::commands::{cmd_compare, cmd_extract_many, cmd_synth, cmd_validate, config_from, CommandError};

#[derive(Parser)]
#[command(name = "scenex", version, about = "Extract cut-in and cut-out scenarios from drive logs into OpenDRIVE and OpenSCENARIO")]
struct Cli {
    /// TOML file of pipeline settings; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set samples=5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract scenarios from one or more drive logs.
    Extract {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Drives processed in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also write lane geometry and road sections for inspection.
        #[arg(long)]
        debug_dump: bool,
    },
    /// Generate a synthetic drive log and its ground truth.
    Synth {
        /// A drive spec TOML file or a built-in fixture name.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output drive log; the ground truth is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a generated scenario and compare it with its source drive.
    Compare {
        log: PathBuf,
        xosc: PathBuf,
        xodr: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-parse emitted OpenDRIVE/OpenSCENARIO files and report diagnostics.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn fail(e: &CommandError) -> u8 {
    eprintln!("error: {e}");
    e.exit_code() as u8
}

fn run(cli: Cli) -> u8 {
    let cfg = || config_from(cli.config.as_deref(), &cli.overrides);
    match &cli.command {
        Command::Extract { logs, out, jobs, debug_dump } => {
            let cfg = match cfg() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let mut code = 0;
            for (log, result) in logs.iter().zip(cmd_extract_many(logs, &cfg, out, *debug_dump, *jobs)) {
                match result {
                    Ok(r) => println!(
                        "{}: {} cut_in, {} cut_out, {} failed, {} junction-flagged -> {}",
                        log.display(),
                        r.counts.cut_in,
                        r.counts.cut_out,
                        r.counts.failed,
                        r.counts.junction_flags,
                        out.display()
                    ),
                    Err(e) => code = code.max(fail(&e)),
                }
            }
            code
        }
        Command::Synth { spec, seed, out } => match cmd_synth(spec, *seed, out) {
            Ok((log, truth)) => {
                println!("{} {}", log.display(), truth.display());
                0
            }
            Err(e) => fail(&e),
        },
        Command::Compare { log, xosc, xodr, out } => {
            let result = cfg().and_then(|cfg| cmd_compare(log, xosc, xodr, &cfg, out));
            match result {
                Ok((summary, _)) => {
                    let a = summary.adversary;
                    println!(
                        "{}: adversary rmse_s {:.3} m, rmse_t {:.3} m, rmse_speed {:.3} m/s over {} samples",
                        summary.scenario, a.rmse_s, a.rmse_t, a.rmse_speed, a.sample_count
                    );
                    0
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { files } => {
            let mut code = 0;
            for f in files {
                match cmd_validate(f) {
                    Ok(diags) => {
                        for d in &diags {
                            println!("{}: byte {}: {}", f.display(), d.offset, d.message);
                        }
                        println!("{}: ok ({} diagnostics)", f.display(), diags.len());
                    }
                    Err(e) => code = code.max(fail(&e)),
                }
            }
            code
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
