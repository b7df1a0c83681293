use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wallbounce::acceptance::{run_all, Hooks};
use wallbounce::scenario::{list_scenarios, run_scenario, Format, ScenarioConfig};
use wallbounce::{Error, Result};

/// Wave packets bouncing off an infinite wall.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a bundled scenario by name.
    Run {
        config: String,
        /// Output directory; overrides the scenario and the environment.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Run the acceptance criteria; exits non-zero if any fails.
    Accept {
        /// Existing directory that receives `acceptance.json`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Scale applied to the closed-form collision width (self-test of the gate).
        #[arg(long, default_value_t = 1.0, hide = true)]
        collision_beta_scale: f64,
    },
    /// List bundled scenarios.
    ListScenarios,
}

fn run(config: &str, output_dir: Option<&Path>, format: Option<FormatArg>) -> Result<()> {
    let mut config = ScenarioConfig::load(config)?;
    if let Some(format) = format {
        config.format = match format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        };
    }
    let dir = config.resolve_output_dir(output_dir);
    let out = run_scenario(&config, &dir)?;
    for warning in &out.summary.warnings {
        eprintln!("warning: {warning}");
    }
    println!("{}: {} rows written to {}", config.name, out.summary.rows, out.dir.display());
    if let Some(ratio) = out.summary.compression_ratio {
        println!("compression ratio at T_C: {ratio:.6}");
    }
    println!("norm drift: {:.3e}", out.summary.norm_drift);
    Ok(())
}

fn accept(output_dir: Option<&Path>, collision_beta_scale: f64) -> Result<bool> {
    if let Some(dir) = output_dir {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
            ));
        }
    }
    let report = run_all(&Hooks { collision_beta_scale });
    print!("{report}");
    if let Some(dir) = output_dir {
        let path = dir.join("acceptance.json");
        let text = serde_json::to_string_pretty(&report)? + "\n";
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Run {
            config,
            output_dir,
            format,
        } => run(&config, output_dir.as_deref(), format).map(|()| true),
        Command::Accept {
            output_dir,
            collision_beta_scale,
        } => accept(output_dir.as_deref(), collision_beta_scale),
        Command::ListScenarios => {
            for (name, description) in list_scenarios() {
                println!("{name:<18} {description}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
