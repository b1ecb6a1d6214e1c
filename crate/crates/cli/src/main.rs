use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use infosum::features::FeatureMode;
use infosum::pipeline::{cmd_synth, Overrides, Pipeline};
use infosum::summarize::{BudgetMode, System};
use infosum::synth::SynthConfig;
use infosum::weak_label::LabelMode;
use infosum::{Error, Result};

/// Sentence importance detection and importance-driven summarization.
#[derive(Parser)]
#[command(name = "infosum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weakly label the training corpus.
    Label(RunArgs),
    /// Train the two-stage detector on the labels.
    Train(RunArgs),
    /// Score every test sentence with the trained model.
    Predict(RunArgs),
    /// Summarize the test corpus with the selected systems.
    Summarize(RunArgs),
    /// Score predictions and summaries against gold labels and references.
    Evaluate(RunArgs),
    /// Write a synthetic corpus, lexicons, gold votes and a config.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    label_mode: Option<LabelMode>,
    #[arg(long)]
    t_pos: Option<f64>,
    #[arg(long)]
    t_unl: Option<f64>,
    #[arg(long)]
    balance_ratio: Option<f64>,
    /// dictionary, dictionary-no-general or bow.
    #[arg(long)]
    feature_mode: Option<FeatureMode>,
    #[arg(long)]
    bins: Option<usize>,
    /// L2 strength for both stages.
    #[arg(long)]
    l2: Option<f64>,
    /// Epochs for both stages.
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    max_words: Option<usize>,
    /// whole-sentence or truncate-words, for every system.
    #[arg(long, value_parser = parse_budget_mode)]
    budget_mode: Option<BudgetMode>,
    /// Systems to run (repeatable): inforank, infofilter, leadwords, randomrank.
    #[arg(long = "system")]
    systems: Vec<System>,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write into.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    train_docs: Option<usize>,
    #[arg(long)]
    test_docs: Option<usize>,
}

fn parse_budget_mode(s: &str) -> std::result::Result<BudgetMode, String> {
    match s {
        "whole-sentence" => Ok(BudgetMode::WholeSentence),
        "truncate-words" => Ok(BudgetMode::TruncateWords),
        other => Err(format!("unknown budget mode `{other}`")),
    }
}

impl RunArgs {
    fn pipeline(&self) -> Result<Pipeline> {
        let overrides = Overrides {
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            label_mode: self.label_mode,
            t_pos: self.t_pos,
            t_unl: self.t_unl,
            balance_ratio: self.balance_ratio,
            feature_mode: self.feature_mode,
            bins: self.bins,
            l2: self.l2,
            epochs: self.epochs,
            max_words: self.max_words,
            budget_mode: self.budget_mode,
            systems: (!self.systems.is_empty()).then(|| self.systems.clone()),
        };
        Pipeline::load(&self.config, &overrides)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Label(args) => {
            let s = args.pipeline()?.cmd_label()?;
            println!(
                "positive {}  unlabeled {} (kept {})  excluded {}",
                s.all.positive, s.all.unlabeled, s.kept.unlabeled, s.all.excluded
            );
        }
        Command::Train(args) => {
            let p = args.pipeline()?;
            let r = p.cmd_train()?;
            println!(
                "e = {:.6}  examples {} (positive {}, unlabeled {})  calibration on {} {} rows",
                r.e, r.examples, r.positives, r.unlabeled, r.calibration_rows, r.calibration_source
            );
        }
        Command::Predict(args) => {
            let preds = args.pipeline()?.cmd_predict()?;
            let important = preds.iter().filter(|p| p.important).count();
            println!("{} sentences, {} predicted important", preds.len(), important);
        }
        Command::Summarize(args) => {
            let p = args.pipeline()?;
            for (system, results) in p.cmd_summarize(None)? {
                println!("{system}: {} summaries -> {}", results.len(), p.summaries_path(system).display());
            }
        }
        Command::Evaluate(args) => {
            let (_, table) = args.pipeline()?.cmd_evaluate()?;
            print!("{table}");
        }
        Command::Synth(args) => {
            let defaults = SynthConfig::default();
            let cfg = SynthConfig {
                train_docs: args.train_docs.unwrap_or(defaults.train_docs),
                test_docs: args.test_docs.unwrap_or(defaults.test_docs),
                ..defaults
            };
            let config = cmd_synth(&args.out, &cfg, args.seed)?;
            println!("{}", config.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if is_validation(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_validation(e: &Error) -> bool {
    e.is_validation() || matches!(e, Error::MissingSummary(_) | Error::TiePossible { .. })
}
