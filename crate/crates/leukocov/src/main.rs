use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leukocov::commands::{self, Settings};
use leukocov::error::exit;
use leukocov::synth::{CellSpec, TEXTURE_CLASSES};

/// White-blood-cell classification with region covariance descriptors.
#[derive(Debug, Parser)]
#[command(name = "leukocov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML pipeline configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured split seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            config: self.config.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment one image and write its cleaned foreground mask.
    Segment {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Describe a class-per-directory dataset and train on its training split.
    Train {
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a model on the held-out split of a dataset.
    Eval {
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Confusion CSV path; defaults to `<model>.confusion.csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a single image.
    Predict {
        image: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write a synthetic textured-cell dataset.
    Synth {
        output: PathBuf,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
        #[arg(long, default_value_t = TEXTURE_CLASSES)]
        classes: usize,
        #[arg(long, default_value_t = 720)]
        width: usize,
        #[arg(long, default_value_t = 576)]
        height: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::OK as u8
            });
        }
    };
    let mut out = io::stdout().lock();
    let result = match &cli.command {
        Command::Segment { input, output, common } => commands::segment(input, output, &common.settings(), &mut out),
        Command::Train { dataset, model, common } => commands::train(dataset, model, &common.settings(), &mut out),
        Command::Eval {
            dataset,
            model,
            csv,
            common,
        } => commands::eval(dataset, model, csv.as_deref(), &common.settings(), &mut out),
        Command::Predict { image, model, common } => commands::predict(image, model, &common.settings(), &mut out),
        Command::Synth {
            output,
            per_class,
            classes,
            width,
            height,
            seed,
        } => commands::synth(
            output,
            CellSpec {
                width: *width,
                height: *height,
            },
            *classes,
            *per_class,
            *seed,
            &mut out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
