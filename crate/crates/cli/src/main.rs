use std::path::PathBuf;
use std::process::ExitCode;

use attn_core::{Error, PipelineConfig};
use clap::{Parser, Subcommand};

mod commands;
mod common;

#[derive(Parser, Debug)]
#[command(
    name = "attn",
    version,
    about = "Turn gaze recordings into attention maps, fuse them with frames, train and evaluate",
    after_help = "Any config field can be overridden with a dotted flag, e.g. `--decay.rate 0.2`.\n\
                  Log level comes from ATTN_LOG (error, warn, info, debug, trace)."
)]
struct Cli {
    /// JSON pipeline config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved config as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    /// Worker threads (0 = one per core). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synchronize gaze with frames and render one attention map per frame.
    Build(commands::build::BuildArgs),
    /// Apply the configured augmentation ops to frames, maps, points and boxes.
    Augment(commands::augment::AugmentArgs),
    /// Fuse attention with frames (alpha channel or drawn marks).
    Fuse(commands::fuse::FuseArgs),
    /// Train the small attention predictor on a fused dataset.
    Train(commands::train::TrainArgs),
    /// Score detections, attention maps or driving commands.
    #[command(subcommand)]
    Eval(commands::eval::EvalCommand),
    /// Brightness-robustness and training-budget sweeps.
    #[command(subcommand)]
    Sweep(commands::sweep::SweepCommand),
}

/// Pulls `--a.b value` and `--a.b=value` config overrides out of the
/// argument list, leaving the rest for clap.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let key = arg.strip_prefix("--").filter(|k| {
            let name = k.split('=').next().unwrap_or("");
            name.contains('.') && !name.starts_with('.')
        });
        match key {
            Some(k) => match k.split_once('=') {
                Some((name, value)) => overrides.push((name.to_string(), value.to_string())),
                None => {
                    let value = it.next().unwrap_or_default();
                    overrides.push((k.to_string(), value));
                }
            },
            None => rest.push(arg),
        }
    }
    (rest, overrides)
}

fn exit_code(err: &Error) -> u8 {
    if err.is_io() {
        1
    } else {
        2
    }
}

fn run(cli: Cli, overrides: &[(String, String)]) -> attn_core::Result<()> {
    let cfg = PipelineConfig::resolve(cli.config.as_deref(), overrides)?;
    if cli.print_config {
        println!("{}", cfg.to_json_pretty());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Error::Config("no subcommand given; see `attn --help`".into()));
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    log::debug!("config hash {}", cfg.hash());
    pool.install(|| match command {
        Command::Build(a) => commands::build::run(&cfg, &a),
        Command::Augment(a) => commands::augment::run(&cfg, &a),
        Command::Fuse(a) => commands::fuse::run(&cfg, &a),
        Command::Train(a) => commands::train::run(&cfg, &a),
        Command::Eval(c) => commands::eval::run(&cfg, &c),
        Command::Sweep(c) => commands::sweep::run(&cfg, c),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ATTN_LOG", "warn")).init();
    let (args, overrides) = split_overrides(std::env::args().collect());
    let cli = Cli::parse_from(args);
    match run(cli, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overrides_are_split_out() {
        let (rest, ov) = split_overrides(strings(&[
            "attn",
            "--decay.rate",
            "0.2",
            "build",
            "--gaze",
            "g.jsonl",
            "--ingest.window_ns=-1",
        ]));
        assert_eq!(rest, strings(&["attn", "build", "--gaze", "g.jsonl"]));
        assert_eq!(
            ov,
            [
                ("decay.rate".to_string(), "0.2".to_string()),
                ("ingest.window_ns".to_string(), "-1".to_string())
            ]
        );
    }

    #[test]
    fn file_paths_are_not_overrides() {
        let (rest, ov) = split_overrides(strings(&["attn", "--config", "c.json"]));
        assert!(ov.is_empty());
        assert_eq!(rest.len(), 3);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
